#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "inverse_problems.hpp"
#include "rng.hpp"
#include "sequences.hpp"

namespace goas {

// Unnormalized density pi over a compact planar domain, with a metered
// evaluation counter shared across copies. The counter backs the offline /
// online accounting: online sampling must never touch it.
class TargetDensity {
public:
    TargetDensity(std::size_t dim, std::string label,
                  std::function<double(std::span<const double>)> fn)
        : dim_(dim), label_(std::move(label)), fn_(std::move(fn)),
          count_(std::make_shared<std::atomic<long>>(0)) {}

    std::size_t dim() const { return dim_; }
    const std::string& label() const { return label_; }

    double eval(std::span<const double> z) const {
        if (z.size() != dim_) throw DimensionMismatch("TargetDensity: point dimension mismatch");
        count_->fetch_add(1, std::memory_order_relaxed);
        const double v = fn_(z);
        if (std::isnan(v) || v < 0.0)
            throw Error("TargetDensity '" + label_ + "': invalid density value");
        return v;
    }

    double operator()(const PlanePoint& z) const { return eval(z.coords()); }

    long evaluations() const { return count_->load(std::memory_order_relaxed); }

private:
    std::size_t dim_;
    std::string label_;
    std::function<double(std::span<const double>)> fn_;
    std::shared_ptr<std::atomic<long>> count_;
};

// ---------------------------------------------------------------------------
// Synthetic two-dimensional stress densities. The geometric shapes follow the
// usual literature forms: Neal's funnel, a curved-ridge banana, an 8-mode
// ring mixture, a radial ring, and a cosine ridge.
// ---------------------------------------------------------------------------

namespace synthetic {

inline double funnel(double z1, double z2) {
    // N(z2; 0, 3^2) * N(z1; 0, e^{z2/2}); the z2-dependent normalizer of the
    // conditional is kept, constants dropped.
    return std::exp(-z2 * z2 / 18.0 - 0.25 * z2 - 0.5 * z1 * z1 * std::exp(-0.5 * z2));
}

inline double banana(double z1, double z2) {
    const double b = 0.5, sigma = 0.5;
    const double w = z2 + b * (z1 * z1 - 1.0);
    return std::exp(-0.5 * z1 * z1 - 0.5 * w * w / (sigma * sigma));
}

inline double mog(double z1, double z2) {
    const double r = 4.0, s2 = 0.36;
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / 8.0;
        const double dx = z1 - r * std::cos(a);
        const double dy = z2 - r * std::sin(a);
        sum += std::exp(-0.5 * (dx * dx + dy * dy) / s2);
    }
    return sum;
}

inline double ring(double z1, double z2) {
    const double r0 = 2.5, s = 0.25;
    const double r = std::hypot(z1, z2);
    return std::exp(-0.5 * (r - r0) * (r - r0) / (s * s));
}

inline double cosine(double z1, double z2) {
    const double s = 0.15, sigma = 2.0;
    const double w = z2 - std::cos(z1);
    return std::exp(-0.5 * w * w / (s * s) - 0.5 * z1 * z1 / (sigma * sigma));
}

} // namespace synthetic

inline double synthetic_density(const std::string& name, const PlanePoint& z) {
    if (z.dim() != 2) throw DimensionMismatch("synthetic_density: n = 2 required");
    const double a = z[0], b = z[1];
    if (name == "funnel") return synthetic::funnel(a, b);
    if (name == "banana") return synthetic::banana(a, b);
    if (name == "mog") return synthetic::mog(a, b);
    if (name == "ring") return synthetic::ring(a, b);
    if (name == "cosine") return synthetic::cosine(a, b);
    throw UnknownName("synthetic_density: unknown target '" + name + "'");
}

// A target bundles the density with the probe mechanism used for domain
// detection: Bayesian targets probe with prior draws, synthetic ones with a
// fixed wide bracket.
struct TargetSpec {
    TargetDensity density;
    std::function<std::vector<double>(RngStream&)> prior_draw; // empty for synthetic
    Box probe_bracket;

    bool has_prior() const { return static_cast<bool>(prior_draw); }
};

inline const std::vector<std::string>& target_names() {
    static const std::vector<std::string> names{
        "funnel", "banana", "mog", "ring", "cosine", "gaussian", "bod", "beam", "acoustic"};
    return names;
}

// Factory. Recognized params: noise_seed, noise_level (beam/acoustic).
inline TargetSpec make_target(const std::string& name,
                              const std::map<std::string, double>& params = {}) {
    auto param = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };

    if (name == "funnel" || name == "banana" || name == "mog" || name == "ring" ||
        name == "cosine") {
        TargetDensity d(2, name, [name](std::span<const double> z) {
            return synthetic_density(name, PlanePoint({z[0], z[1]}));
        });
        return TargetSpec{std::move(d), nullptr, Box({-12.0, -12.0}, {12.0, 12.0})};
    }
    if (name == "gaussian") {
        TargetDensity d(2, name, [](std::span<const double> z) {
            return std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1]));
        });
        return TargetSpec{std::move(d), nullptr, Box({-8.0, -8.0}, {8.0, 8.0})};
    }
    if (name == "bod") {
        TargetDensity d(2, name,
                        [](std::span<const double> z) { return bod_posterior(z); });
        auto prior = [](RngStream& rng) {
            return std::vector<double>{rng.gaussian(), rng.gaussian()};
        };
        return TargetSpec{std::move(d), prior, Box({-6.0, -6.0}, {6.0, 6.0})};
    }
    if (name == "beam") {
        auto post = std::make_shared<BeamPosterior>(
            static_cast<std::uint64_t>(param("noise_seed", 424242)), param("noise_level", 0.2));
        TargetDensity d(2, name,
                        [post](std::span<const double> z) { return (*post)(z); });
        auto prior = [](RngStream& rng) {
            return std::vector<double>{1.0 + 0.3 * rng.gaussian(), 1.0 + 0.5 * rng.gaussian()};
        };
        return TargetSpec{std::move(d), prior, Box({0.0, 0.0}, {3.0, 4.0})};
    }
    if (name == "acoustic") {
        auto post = std::make_shared<AcousticPosterior>(
            static_cast<std::uint64_t>(param("noise_seed", 515151)), param("noise_level", 0.05));
        TargetDensity d(6, name,
                        [post](std::span<const double> z) { return (*post)(z); });
        auto prior = [](RngStream& rng) {
            std::vector<double> v(6);
            for (auto& c : v) c = 2.0 + rng.gaussian();
            return v;
        };
        return TargetSpec{std::move(d), prior,
                          Box(std::vector<double>(6, -3.0), std::vector<double>(6, 7.0))};
    }
    throw UnknownName("make_target: unknown target '" + name + "'");
}

// Axis-aligned bounding box of the probe points whose density exceeds the
// threshold, inflated per side by `padding` (a fraction of the side length;
// degenerate sides fall back to an absolute margin of `padding`).
inline Box detect_domain(const TargetDensity& density, const std::vector<PlanePoint>& probes,
                         double threshold, double padding) {
    if (probes.empty()) throw EmptyDomain("detect_domain: no probe points");
    const std::size_t n = density.dim();
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    std::size_t hits = 0;
    for (const auto& p : probes) {
        if (density(p) <= threshold) continue;
        ++hits;
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    if (hits == 0) throw EmptyDomain("detect_domain: no probe point exceeds the threshold");
    for (std::size_t i = 0; i < n; ++i) {
        const double side = hi[i] - lo[i];
        const double pad = side > 0.0 ? padding * side : padding;
        lo[i] -= pad;
        hi[i] += pad;
        if (!(lo[i] < hi[i]))
            throw EmptyDomain("detect_domain: degenerate domain; needs padding > 0");
    }
    return Box(std::move(lo), std::move(hi));
}

// Lloyd k-means on chain states. Empty clusters are re-seeded from the point
// farthest from its current center.
inline std::vector<PlanePoint> kmeans_centers(const std::vector<PlanePoint>& chain,
                                              std::size_t k, RngStream rng,
                                              std::size_t max_iter = 100) {
    if (k == 0 || chain.size() < k) throw Error("kmeans_centers: need chain length >= k >= 1");
    const std::size_t n = chain.front().dim();
    const std::size_t m = chain.size();

    // distinct initial centers
    std::vector<std::size_t> pool(m);
    for (std::size_t i = 0; i < m; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + rng.index(m - i)]);
    std::vector<double> centers(k * n);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < n; ++j) centers[c * n + j] = chain[pool[c]][j];

    std::vector<std::size_t> member(m, 0);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        std::vector<double> dist(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = chain[i][j] - centers[c * n + j];
                    d2 += d * d;
                }
                if (d2 < best) { best = d2; arg = c; }
            }
            dist[i] = best;
            if (member[i] != arg) { member[i] = arg; changed = true; }
        }

        std::vector<double> sums(k * n, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            ++counts[member[i]];
            for (std::size_t j = 0; j < n; ++j) sums[member[i] * n + j] += chain[i][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                std::size_t far = 0;
                for (std::size_t i = 1; i < m; ++i)
                    if (dist[i] > dist[far]) far = i;
                for (std::size_t j = 0; j < n; ++j) centers[c * n + j] = chain[far][j];
                dist[far] = 0.0;
                changed = true;
                continue;
            }
            for (std::size_t j = 0; j < n; ++j)
                centers[c * n + j] = sums[c * n + j] / static_cast<double>(counts[c]);
        }
        if (!changed) break;
    }

    std::vector<PlanePoint> out;
    out.reserve(k);
    for (std::size_t c = 0; c < k; ++c)
        out.emplace_back(std::vector<double>(centers.begin() + c * n,
                                             centers.begin() + (c + 1) * n));
    return out;
}

// Discrete target measure: points z_i in the domain, lifted axes
// y_i = Q^{-1}(z_i), and energies g_i = beta pi(z_i) normalized so that
// sum g_i equals the total energy G.
struct DiscreteTargetMeasure {
    std::size_t dim = 0;   // n
    std::size_t count = 0; // K surviving points
    std::vector<double> points;      // K x n
    std::vector<double> raw_density; // pi(z_i)
    std::vector<double> axes;        // K x (n+1)
    std::vector<double> energies;    // g_i
    double total_energy = 0.0;

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * dim, dim};
    }
    std::span<const double> axis(std::size_t i) const {
        return {axes.data() + i * (dim + 1), dim + 1};
    }
};

enum class Scheme { grid, hammersley, random, chain };

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "grid") return Scheme::grid;
    if (s == "hammersley") return Scheme::hammersley;
    if (s == "random") return Scheme::random;
    if (s == "chain") return Scheme::chain;
    throw UnknownName("unknown discretization scheme '" + s + "'");
}

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::grid: return "grid";
        case Scheme::hammersley: return "hammersley";
        case Scheme::random: return "random";
        case Scheme::chain: return "chain";
    }
    return "?";
}

inline DiscreteTargetMeasure discretize_points(const TargetDensity& density,
                                               const std::vector<PlanePoint>& pts,
                                               double total_energy,
                                               double drop_threshold_rel = 0.0) {
    const std::size_t n = density.dim();
    DiscreteTargetMeasure t;
    t.dim = n;
    t.total_energy = total_energy;

    // one evaluation per candidate; the drop threshold is relative to the
    // strongest candidate ("density values greater than eps" selection)
    std::vector<double> values(pts.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        values[i] = density(pts[i]);
        peak = std::max(peak, values[i]);
    }
    const double cut = drop_threshold_rel * peak;

    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double pi = values[i];
        if (pi <= cut || pi <= 0.0) continue; // cannot route energy to a dead paraboloid
        const auto& z = pts[i];
        t.points.insert(t.points.end(), z.coords().begin(), z.coords().end());
        t.raw_density.push_back(pi);
        sum += pi;
    }
    t.count = t.raw_density.size();
    if (t.count == 0) throw AllPointsZeroDensity("discretize_target: every point has zero density");

    t.axes.resize(t.count * (n + 1));
    for (std::size_t i = 0; i < t.count; ++i)
        flat::stereographic_lift({t.points.data() + i * n, n},
                                 {t.axes.data() + i * (n + 1), n + 1});

    const double beta = total_energy / sum;
    t.energies.resize(t.count);
    for (std::size_t i = 0; i < t.count; ++i) t.energies[i] = beta * t.raw_density[i];
    return t;
}

// Points from the chosen scheme, then lift + normalize. `chain` is required
// by the chain scheme and ignored otherwise; K-means runs on it and centers
// are dropped like any low-density point.
inline DiscreteTargetMeasure discretize_target(const TargetDensity& density, const Box& domain,
                                               std::size_t k, Scheme scheme, double total_energy,
                                               RngStream rng,
                                               const std::vector<PlanePoint>* chain = nullptr,
                                               double drop_threshold_rel = 0.0) {
    if (k == 0) throw Error("discretize_target: K must be >= 1");
    const std::size_t n = density.dim();
    if (domain.dim() != n) throw DimensionMismatch("discretize_target: domain dimension");

    std::vector<PlanePoint> pts;
    switch (scheme) {
        case Scheme::grid: {
            const auto per = static_cast<std::size_t>(std::max<long long>(
                1, std::llround(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(n)))));
            pts = grid_points(domain, std::vector<std::size_t>(n, per));
            break;
        }
        case Scheme::hammersley:
            pts = hammersley(k, n, domain);
            break;
        case Scheme::random:
            pts.reserve(k);
            for (std::size_t i = 0; i < k; ++i) {
                std::vector<double> z(n);
                for (std::size_t j = 0; j < n; ++j)
                    z[j] = rng.uniform(domain.lower[j], domain.upper[j]);
                pts.emplace_back(std::move(z));
            }
            break;
        case Scheme::chain: {
            if (chain == nullptr || chain->size() < k)
                throw Error("discretize_target: chain scheme needs a chain of length >= K");
            pts = kmeans_centers(*chain, k, rng);
            break;
        }
    }
    return discretize_points(density, pts, total_energy, drop_threshold_rel);
}

} // namespace goas
