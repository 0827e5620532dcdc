#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "targets.hpp"

namespace goas {

// Weighted point cloud; weights are normalized to sum 1 at construction.
struct EmpiricalMeasure {
    std::size_t point_dim = 0;
    std::size_t count = 0;
    std::vector<double> points;  // count x point_dim
    std::vector<double> weights; // positive, sum 1

    EmpiricalMeasure() = default;

    EmpiricalMeasure(std::size_t dim, std::vector<double> pts, std::vector<double> w)
        : point_dim(dim), count(w.size()), points(std::move(pts)), weights(std::move(w)) {
        if (count == 0 || points.size() != count * point_dim)
            throw DimensionMismatch("EmpiricalMeasure: size mismatch");
        double sum = 0.0;
        for (double v : weights) {
            if (!(v > 0.0)) throw Error("EmpiricalMeasure: weights must be positive");
            sum += v;
        }
        for (double& v : weights) v /= sum;
    }

    static EmpiricalMeasure uniform(std::size_t dim, std::vector<double> pts) {
        const std::size_t n = pts.size() / dim;
        return EmpiricalMeasure(dim, std::move(pts),
                                std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * point_dim, point_dim};
    }
};

enum class GroundMetric { euclidean_plane, geodesic_sphere };

inline GroundMetric metric_from_string(const std::string& s) {
    if (s == "plane" || s == "euclidean_plane") return GroundMetric::euclidean_plane;
    if (s == "sphere" || s == "geodesic_sphere") return GroundMetric::geodesic_sphere;
    throw UnknownName("unknown ground metric '" + s + "'");
}

struct SinkhornOptions {
    std::size_t max_iterations = 50000;
    double marginal_tol = 1e-9;
    unsigned threads = 1;
};

struct SinkhornResult {
    double distance = 0.0;       // W_p
    double transport_cost = 0.0; // plan cost under c = d^p / p
    bool converged = false;
    std::size_t iterations = 0;
    double marginal_error = 0.0;
};

namespace detail {

inline double ground_distance(std::span<const double> x, std::span<const double> y,
                              GroundMetric metric) {
    if (metric == GroundMetric::euclidean_plane) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    }
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += x[i] * y[i];
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace detail

namespace detail {

// Deterministic argument ordering so the reported distance is exactly
// symmetric; the alternating scaling itself converges from either side but
// not to bitwise-identical partial iterates.
inline bool measure_precedes(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.count != b.count) return a.count < b.count;
    if (a.points != b.points) return a.points < b.points;
    return a.weights <= b.weights;
}

} // namespace detail

// Entropic-regularized transport cost between two empirical measures with
// ground cost c = d^p / p, solved by log-domain Sinkhorn scaling with
// epsilon-annealing down to `reg`. Returns W_p = (plan cost)^{1/p}; when the
// marginal tolerance is not reached within the iteration budget the best
// estimate is returned with converged = false.
inline SinkhornResult sinkhorn_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                           double p, double reg,
                                           GroundMetric metric = GroundMetric::euclidean_plane,
                                           SinkhornOptions opt = {}) {
    if (a.count == 0 || b.count == 0) throw Error("sinkhorn: empty measure");
    if (a.point_dim != b.point_dim) throw DimensionMismatch("sinkhorn: point dimension");
    if (!(p >= 1.0)) throw Error("sinkhorn: order p must be >= 1");
    if (!(reg > 0.0)) throw Error("sinkhorn: reg must be positive");
    if (!detail::measure_precedes(a, b)) return sinkhorn_wasserstein(b, a, p, reg, metric, opt);

    const std::size_t na = a.count, nb = b.count;
    std::vector<double> cost(na * nb);
    double cost_max = 0.0;
    parallel_for(na, opt.threads, [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < nb; ++j) {
                const double d = detail::ground_distance(a.point(i), b.point(j), metric);
                cost[i * nb + j] = std::pow(d, p) / p;
            }
    });
    for (double c : cost) cost_max = std::max(cost_max, c);

    std::vector<double> log_a(na), log_b(nb);
    for (std::size_t i = 0; i < na; ++i) log_a[i] = std::log(a.weights[i]);
    for (std::size_t j = 0; j < nb; ++j) log_b[j] = std::log(b.weights[j]);

    std::vector<double> f(na, 0.0), g(nb, 0.0);
    std::vector<double> scratch_col(nb, 0.0), scratch_row(na, 0.0);

    auto update_g = [&](double eps) {
        parallel_for(nb, opt.threads, [&](std::size_t lo, std::size_t hi, unsigned) {
            for (std::size_t j = lo; j < hi; ++j) {
                double peak = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < na; ++i)
                    peak = std::max(peak, (f[i] - cost[i * nb + j]) / eps + log_a[i]);
                double s = 0.0;
                for (std::size_t i = 0; i < na; ++i)
                    s += std::exp((f[i] - cost[i * nb + j]) / eps + log_a[i] - peak);
                g[j] = -eps * (peak + std::log(s));
            }
        });
    };
    auto update_f = [&](double eps) {
        parallel_for(na, opt.threads, [&](std::size_t lo, std::size_t hi, unsigned) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double* row = cost.data() + i * nb;
                double peak = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < nb; ++j)
                    peak = std::max(peak, (g[j] - row[j]) / eps + log_b[j]);
                double s = 0.0;
                for (std::size_t j = 0; j < nb; ++j)
                    s += std::exp((g[j] - row[j]) / eps + log_b[j] - peak);
                f[i] = -eps * (peak + std::log(s));
            }
        });
    };
    // L1 violation of the b-marginal; the a-marginal is exact right after an
    // f-update.
    auto marginal_error = [&](double eps) {
        double err = 0.0;
        for (std::size_t j = 0; j < nb; ++j) scratch_col[j] = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            const double* row = cost.data() + i * nb;
            for (std::size_t j = 0; j < nb; ++j)
                scratch_col[j] += std::exp((f[i] + g[j] - row[j]) / eps + log_a[i] + log_b[j]);
        }
        for (std::size_t j = 0; j < nb; ++j) err += std::abs(scratch_col[j] - b.weights[j]);
        return err;
    };

    SinkhornResult res;
    std::size_t used = 0;

    // annealing schedule: halve from the cost scale down to reg
    std::vector<double> schedule;
    for (double e = std::max(reg, cost_max > 0.0 ? 0.5 * cost_max : reg); e > reg; e *= 0.5)
        schedule.push_back(e);
    schedule.push_back(reg);

    double err = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const double eps = schedule[s];
        const bool final_stage = (s + 1 == schedule.size());
        const std::size_t stage_cap = final_stage ? opt.max_iterations : 50;
        for (std::size_t it = 0; it < stage_cap && used < opt.max_iterations; ++it) {
            update_g(eps);
            update_f(eps);
            ++used;
            if (final_stage && (it % 10 == 9 || it + 1 == stage_cap)) {
                err = marginal_error(eps);
                if (err < opt.marginal_tol) break;
            }
        }
    }
    err = marginal_error(reg);

    double plan_cost = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double* row = cost.data() + i * nb;
        double s = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
            s += std::exp((f[i] + g[j] - row[j]) / reg + log_a[i] + log_b[j]) * row[j];
        plan_cost += s;
    }

    res.transport_cost = plan_cost;
    res.distance = std::pow(std::max(plan_cost, 0.0), 1.0 / p);
    res.iterations = used;
    res.marginal_error = err;
    res.converged = err < opt.marginal_tol;
    return res;
}

// Markov chain with per-state log densities.
struct Chain {
    std::size_t dim = 0;
    std::vector<double> states; // length x dim
    std::vector<double> log_density;
    std::uint64_t accepted = 0;

    std::size_t length() const { return dim == 0 ? 0 : states.size() / dim; }
    std::span<const double> state(std::size_t t) const { return {states.data() + t * dim, dim}; }
    double acceptance_rate() const {
        const std::size_t steps = length() > 0 ? length() - 1 : 0;
        return steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps);
    }
};

struct EssResult {
    double ess = 0.0;
    double tau_max = 1.0;
    std::vector<double> tau;
    bool degenerate = false;
};

// Effective sample size N_s / tau_max, with the integrated autocorrelation
// time per dimension tau_i = 1 + 2 sum_k rho_k truncated by the initial
// positive sequence rule (the paper's untruncated sum is noise-dominated).
// A constant chain reports ESS = N_s with the degenerate flag set.
inline EssResult ess_series(std::size_t dim, std::span<const double> data) {
    const std::size_t n = dim == 0 ? 0 : data.size() / dim;
    if (n < 10) throw Error("ess: need at least 10 states");

    EssResult res;
    res.tau.assign(dim, 1.0);
    bool any_live = false;

    std::vector<double> x(n);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t t = 0; t < n; ++t) x[t] = data[t * dim + d];
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : x) v -= mean;

        double gamma0 = 0.0;
        for (double v : x) gamma0 += v * v;
        gamma0 /= static_cast<double>(n);
        double scale = 0.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
        if (gamma0 <= 1e-30 * (1.0 + mean * mean)) continue; // constant dimension

        any_live = true;
        auto rho = [&](std::size_t lag) {
            double s = 0.0;
            for (std::size_t t = 0; t + lag < n; ++t) s += x[t] * x[t + lag];
            return s / (static_cast<double>(n) * gamma0);
        };

        double tau = -1.0;
        for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
            const double gamma_pair = rho(2 * m) + rho(2 * m + 1);
            if (gamma_pair <= 0.0) break;
            tau += 2.0 * gamma_pair;
        }
        res.tau[d] = std::max(tau, 1.0);
    }

    res.degenerate = !any_live;
    res.tau_max = 1.0;
    for (double t : res.tau) res.tau_max = std::max(res.tau_max, t);
    res.ess = static_cast<double>(n) / res.tau_max;
    return res;
}

inline EssResult ess(const Chain& chain) { return ess_series(chain.dim, chain.states); }

// Per-dimension mean, variance (unbiased), skewness and non-excess kurtosis
// (a Gaussian reports 3).
struct Moments {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> skewness;
    std::vector<double> kurtosis;
};

inline Moments moments(std::size_t dim, std::span<const double> pts) {
    const std::size_t n = dim == 0 ? 0 : pts.size() / dim;
    if (n < 4) throw Error("moments: need at least 4 samples");
    Moments mo;
    mo.mean.resize(dim);
    mo.variance.resize(dim);
    mo.skewness.resize(dim);
    mo.kurtosis.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += pts[t * dim + d];
        mean /= static_cast<double>(n);
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double c = pts[t * dim + d] - mean;
            const double c2 = c * c;
            m2 += c2;
            m3 += c2 * c;
            m4 += c2 * c2;
        }
        m2 /= static_cast<double>(n);
        m3 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        if (m2 <= 1e-24 * (1.0 + mean * mean))
            throw DegenerateVariance("moments: dimension " + std::to_string(d) +
                                     " has (near) zero variance");
        mo.mean[d] = mean;
        mo.variance[d] = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
        mo.skewness[d] = m3 / std::pow(m2, 1.5);
        mo.kurtosis[d] = m4 / (m2 * m2);
    }
    return mo;
}

inline Moments moments(const std::vector<PlanePoint>& pts) {
    if (pts.empty()) throw Error("moments: empty input");
    const std::size_t dim = pts.front().dim();
    std::vector<double> flat;
    flat.reserve(pts.size() * dim);
    for (const auto& p : pts) flat.insert(flat.end(), p.coords().begin(), p.coords().end());
    return moments(dim, flat);
}

// Random-walk Metropolis with isotropic Gaussian proposals. The chain stores
// steps + 1 states including the start.
inline Chain rwmh(const TargetDensity& density, const PlanePoint& init, std::size_t steps,
                  double step_scale, RngStream rng) {
    const std::size_t n = density.dim();
    if (init.dim() != n) throw DimensionMismatch("rwmh: init dimension");
    double pi_cur = density(init);
    if (!(pi_cur > 0.0)) throw ZeroDensityInit("rwmh: density vanishes at the initial point");

    Chain chain;
    chain.dim = n;
    chain.states.reserve((steps + 1) * n);
    chain.log_density.reserve(steps + 1);
    std::vector<double> cur(init.coords().begin(), init.coords().end());
    chain.states.insert(chain.states.end(), cur.begin(), cur.end());
    chain.log_density.push_back(std::log(pi_cur));

    std::vector<double> prop(n);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t d = 0; d < n; ++d) prop[d] = cur[d] + step_scale * rng.gaussian();
        const double pi_prop = density.eval(prop);
        bool accept = false;
        if (pi_prop >= pi_cur) {
            accept = true;
        } else if (pi_prop > 0.0) {
            accept = rng.uniform01() < pi_prop / pi_cur;
        }
        if (accept) {
            cur = prop;
            pi_cur = pi_prop;
            ++chain.accepted;
        }
        chain.states.insert(chain.states.end(), cur.begin(), cur.end());
        chain.log_density.push_back(std::log(pi_cur));
    }
    return chain;
}

} // namespace goas
