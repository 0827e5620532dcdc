#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "errors.hpp"
#include "rng.hpp"

namespace goas {

// Deterministic parameter-to-observation map with diagonal Gaussian noise.
struct ForwardModel {
    std::size_t param_dim = 0;
    std::function<std::vector<double>(std::span<const double>)> predict;
    std::vector<double> noise_var;
};

// ---------------------------------------------------------------------------
// Biochemical oxygen demand model. Closed-form forward map
//   G(t) = A (1 - exp(-B t)),
//   A = 0.4 + 0.4 (1 + erf(theta1 / sqrt(2))),
//   B = 0.01 + 0.15 (1 + erf(theta2 / sqrt(2))),
// observed at t = 1..5 with noise variance 1e-3 and a standard Gaussian
// prior. The data vector is fixed.
// ---------------------------------------------------------------------------

inline std::vector<double> bod_predict(std::span<const double> theta) {
    const double a = 0.4 + 0.4 * (1.0 + std::erf(theta[0] / std::sqrt(2.0)));
    const double b = 0.01 + 0.15 * (1.0 + std::erf(theta[1] / std::sqrt(2.0)));
    std::vector<double> out(5);
    for (int t = 1; t <= 5; ++t) out[t - 1] = a * (1.0 - std::exp(-b * t));
    return out;
}

inline const std::vector<double>& bod_data() {
    static const std::vector<double> y{0.18, 0.32, 0.42, 0.49, 0.54};
    return y;
}

inline double bod_posterior(std::span<const double> theta) {
    const auto pred = bod_predict(theta);
    const auto& y = bod_data();
    double misfit = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        misfit += (pred[i] - y[i]) * (pred[i] - y[i]);
    const double quad = theta[0] * theta[0] + theta[1] * theta[1];
    return std::exp(-0.5 * 1e3 * misfit - 0.5 * quad);
}

// ---------------------------------------------------------------------------
// Euler-Bernoulli cantilever beam, (E(x) u'')'' = f on [0, L], clamped at
// x = 0 (u = u' = 0) and free at x = L (u'' = (E u'')' = 0). The stiffness is
// a smoothed two-piece constant profile in theta = (theta1, theta2) with the
// transition at alpha = 0.1 of width 0.005. Finite differences on 601 nodes:
// the interior 5-point product stencil plus second-order one-sided closures,
// solved directly (sparse LU).
// ---------------------------------------------------------------------------

class EulerBernoulliBeam {
public:
    static constexpr std::size_t kNodes = 601;
    static constexpr std::size_t kObservations = 41;
    static constexpr double kLength = 1.0;
    static constexpr double kLoad = 1.0;
    static constexpr double kTransition = 0.1;
    static constexpr double kTransitionWidth = 0.005;

    static double sigmoid_step(double x, double alpha) {
        return 1.0 / (1.0 + std::exp(-(x - alpha) / kTransitionWidth));
    }

    static double stiffness(double x, double theta1, double theta2) {
        const double z = sigmoid_step(x, kTransition);
        return (1.0 - z) * theta1 + z * theta2;
    }

    // Displacement at every node for a given stiffness profile. Interior
    // rows use the 5-point product stencil for (E u'')''; the clamped end
    // closes with a third-order one-sided u', the free end with third-order
    // u'' and second-order u''' rows (the stiffness is constant there, so
    // vanishing shear is vanishing u'''). Rows are scaled to the interior
    // magnitude before the sparse LU solve. Throws SolverFailure when the
    // system does not factor (nonpositive stiffness leaking past the
    // caller's guard).
    static std::vector<double> solve_profile(const std::vector<double>& e, double load,
                                             double length) {
        const std::size_t m = e.size();
        const double h = length / static_cast<double>(m - 1);
        const double h4 = h * h * h * h;
        const double row_scale = 1.0 / h4;

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(5 * m + 10);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

        auto add = [&](std::size_t r, std::size_t c, double v) {
            trips.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
        };

        add(0, 0, row_scale); // u(0) = 0

        // u'(0) = 0, third-order one-sided
        add(1, 0, -11.0 * row_scale);
        add(1, 1, 18.0 * row_scale);
        add(1, 2, -9.0 * row_scale);
        add(1, 3, 2.0 * row_scale);

        for (std::size_t i = 2; i + 2 < m; ++i) {
            add(i, i - 2, e[i - 1] / h4);
            add(i, i - 1, (-2.0 * e[i - 1] - 2.0 * e[i]) / h4);
            add(i, i, (e[i - 1] + 4.0 * e[i] + e[i + 1]) / h4);
            add(i, i + 1, (-2.0 * e[i] - 2.0 * e[i + 1]) / h4);
            add(i, i + 2, e[i + 1] / h4);
            rhs[static_cast<Eigen::Index>(i)] = load;
        }

        // u''(L) = 0, third-order one-sided
        add(m - 2, m - 1, 35.0 * row_scale);
        add(m - 2, m - 2, -104.0 * row_scale);
        add(m - 2, m - 3, 114.0 * row_scale);
        add(m - 2, m - 4, -56.0 * row_scale);
        add(m - 2, m - 5, 11.0 * row_scale);

        // u'''(L) = 0, second-order one-sided
        add(m - 1, m - 1, 5.0 * row_scale);
        add(m - 1, m - 2, -18.0 * row_scale);
        add(m - 1, m - 3, 24.0 * row_scale);
        add(m - 1, m - 4, -14.0 * row_scale);
        add(m - 1, m - 5, 3.0 * row_scale);

        Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        a.setFromTriplets(trips.begin(), trips.end());
        a.makeCompressed();

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success)
            throw SolverFailure("beam: finite-difference system failed to factor");
        Eigen::VectorXd u = lu.solve(rhs);
        if (lu.info() != Eigen::Success)
            throw SolverFailure("beam: finite-difference solve failed");
        return std::vector<double>(u.data(), u.data() + m);
    }

    static std::vector<double> solve(double theta1, double theta2,
                                     std::size_t nodes = kNodes) {
        const double h = kLength / static_cast<double>(nodes - 1);
        std::vector<double> e(nodes);
        for (std::size_t j = 0; j < nodes; ++j)
            e[j] = stiffness(static_cast<double>(j) * h, theta1, theta2);
        return solve_profile(e, kLoad, kLength);
    }

    // 41 roughly equidistant grid nodes; the clamped left end is never
    // observed, the tip is.
    static const std::vector<std::size_t>& observation_nodes() {
        static const std::vector<std::size_t> nodes = [] {
            std::vector<std::size_t> idx(kObservations);
            for (std::size_t j = 1; j <= kObservations; ++j)
                idx[j - 1] = static_cast<std::size_t>(
                    std::llround(600.0 * static_cast<double>(j) / 41.0));
            return idx;
        }();
        return nodes;
    }

    static std::vector<double> observe(double theta1, double theta2) {
        const auto u = solve(theta1, theta2);
        const auto& nodes = observation_nodes();
        std::vector<double> out(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) out[j] = u[nodes[j]];
        return out;
    }
};

// Posterior for the beam problem: Gaussian likelihood over the 41 observed
// deflections times the N((1,1), diag(0.3^2, 0.5^2)) prior. Observation data
// is generated in-repo from theta = (1,1) plus seeded noise with standard
// deviation `noise_level` of the tip deflection.
class BeamPosterior {
public:
    explicit BeamPosterior(std::uint64_t noise_seed = 424242, double noise_level = 0.2) {
        const auto truth = EulerBernoulliBeam::observe(1.0, 1.0);
        const auto tip = EulerBernoulliBeam::solve(1.0, 1.0).back();
        noise_sigma_ = noise_level * std::abs(tip);
        RngStream rng(noise_seed, 0);
        data_.resize(truth.size());
        for (std::size_t j = 0; j < truth.size(); ++j)
            data_[j] = truth[j] + noise_sigma_ * rng.gaussian();
    }

    const std::vector<double>& data() const { return data_; }
    double noise_sigma() const { return noise_sigma_; }

    ForwardModel model() const {
        ForwardModel fm;
        fm.param_dim = 2;
        fm.predict = [](std::span<const double> th) {
            return EulerBernoulliBeam::observe(th[0], th[1]);
        };
        fm.noise_var.assign(data_.size(), noise_sigma_ * noise_sigma_);
        return fm;
    }

    double operator()(std::span<const double> theta) const {
        if (!(theta[0] > 0.0) || !(theta[1] > 0.0)) return 0.0;
        const auto pred = EulerBernoulliBeam::observe(theta[0], theta[1]);
        double misfit = 0.0;
        for (std::size_t j = 0; j < data_.size(); ++j)
            misfit += (pred[j] - data_[j]) * (pred[j] - data_[j]);
        const double lp = -0.5 * misfit / (noise_sigma_ * noise_sigma_)
                          - 0.5 * (theta[0] - 1.0) * (theta[0] - 1.0) / 0.09
                          - 0.5 * (theta[1] - 1.0) * (theta[1] - 1.0) / 0.25;
        return std::exp(lp);
    }

private:
    std::vector<double> data_;
    double noise_sigma_ = 0.0;
};

// ---------------------------------------------------------------------------
// Locating acoustic sources: far-field pattern of three point sources for the
// Helmholtz equation at wave number k,
//   u_inf(xhat) = -(e^{i pi/4} / sqrt(8 pi k)) sum_i e^{-i k xhat . z_i},
// measured at 200 uniform directions on the unit circle; real and imaginary
// parts stacked. Truth z = (1,3), (2,2.5), (1.5,3.5); prior N(2*1, I).
// ---------------------------------------------------------------------------

inline constexpr std::size_t kAcousticDirections = 200;
inline constexpr double kAcousticWaveNumber = 1.0;

inline std::vector<double> acoustic_far_field(std::span<const double> sources,
                                              std::size_t directions = kAcousticDirections,
                                              double k = kAcousticWaveNumber) {
    if (sources.size() % 2 != 0) throw DimensionMismatch("acoustic: odd parameter count");
    const std::size_t ns = sources.size() / 2;
    const double pi = 3.14159265358979323846;
    const std::complex<double> amp =
        -std::exp(std::complex<double>(0.0, pi / 4.0)) / std::sqrt(8.0 * pi * k);
    std::vector<double> out(2 * directions);
    for (std::size_t t = 0; t < directions; ++t) {
        const double ang = 2.0 * pi * static_cast<double>(t) / static_cast<double>(directions);
        const double cx = std::cos(ang), cy = std::sin(ang);
        std::complex<double> sum = 0.0;
        for (std::size_t i = 0; i < ns; ++i) {
            const double phase = -k * (cx * sources[2 * i] + cy * sources[2 * i + 1]);
            sum += std::exp(std::complex<double>(0.0, phase));
        }
        const std::complex<double> u = amp * sum;
        out[t] = u.real();
        out[directions + t] = u.imag();
    }
    return out;
}

inline const std::vector<double>& acoustic_truth() {
    static const std::vector<double> z{1.0, 3.0, 2.0, 2.5, 1.5, 3.5};
    return z;
}

class AcousticPosterior {
public:
    explicit AcousticPosterior(std::uint64_t noise_seed = 515151, double noise_level = 0.05) {
        const auto truth = acoustic_far_field(acoustic_truth());
        double peak = 0.0;
        for (std::size_t t = 0; t < kAcousticDirections; ++t)
            peak = std::max(peak, std::hypot(truth[t], truth[kAcousticDirections + t]));
        noise_sigma_ = noise_level * peak;
        RngStream rng(noise_seed, 0);
        data_.resize(truth.size());
        for (std::size_t j = 0; j < truth.size(); ++j)
            data_[j] = truth[j] + noise_sigma_ * rng.gaussian();
    }

    const std::vector<double>& data() const { return data_; }
    double noise_sigma() const { return noise_sigma_; }

    double operator()(std::span<const double> theta) const {
        const auto pred = acoustic_far_field(theta);
        double misfit = 0.0;
        for (std::size_t j = 0; j < data_.size(); ++j)
            misfit += (pred[j] - data_[j]) * (pred[j] - data_[j]);
        double quad = 0.0;
        for (double v : theta) quad += (v - 2.0) * (v - 2.0);
        return std::exp(-0.5 * misfit / (noise_sigma_ * noise_sigma_) - 0.5 * quad);
    }

private:
    std::vector<double> data_;
    double noise_sigma_ = 0.0;
};

} // namespace goas
