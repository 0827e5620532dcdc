#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "sequences.hpp"
#include "targets.hpp"

namespace goas {

// Convex reflectors are the inner envelope of the supporting paraboloids
// (polar radius min_i p_i, rays assigned by argmin); concave ones are the
// outer envelope (max / argmax) and are driven by increments of the
// opposite sign.
enum class Orientation { convex, concave };

inline Orientation orientation_from_string(const std::string& s) {
    if (s == "convex") return Orientation::convex;
    if (s == "concave") return Orientation::concave;
    throw UnknownName("unknown orientation '" + s + "'");
}

inline std::string to_string(Orientation o) {
    return o == Orientation::convex ? "convex" : "concave";
}

// Piecewise-paraboloid reflecting surface R_K = (d_1, ..., d_K) over fixed
// axes y_i. d_1 keeps its construction value; the build loop never moves it.
struct Reflector {
    std::size_t sphere_dim = 0; // n
    std::size_t cell_count = 0; // K
    Orientation orientation = Orientation::convex;
    std::vector<double> axes;     // K x (n+1)
    std::vector<double> focal;    // d_i > 0
    std::vector<double> energies; // g_i
    double total_energy = 0.0;
    double d1 = 1.0;
    double achieved_residual = 0.0;
    std::uint64_t iterations = 0;

    std::span<const double> axis(std::size_t i) const {
        return {axes.data() + i * (sphere_dim + 1), sphere_dim + 1};
    }
};

// Per-axis energies received by the reflector on a ray set. Energies are
// ray counts times the common ray weight, so conservation is exact at the
// integer level: sum(counts) == N always.
struct MeasureVector {
    std::vector<double> mu;
    std::vector<std::int64_t> counts;

    double total(double ray_weight) const {
        std::int64_t n = 0;
        for (auto c : counts) n += c;
        return static_cast<double>(n) * ray_weight;
    }
};

class IterationCapExceeded : public Error {
public:
    IterationCapExceeded(Reflector best_iterate, const std::string& msg)
        : Error(msg), best(std::move(best_iterate)) {}
    Reflector best;
};

namespace detail {

// Batch assignment of rays to supporting paraboloids. The gap reciprocals
// r_ij = 1/(1 - x_j . y_i) do not change while focal parameters iterate, so
// they are precomputed once when the N x K table fits the memory cap.
class AssignmentKernel {
public:
    AssignmentKernel(const RaySet& rays, std::span<const double> axes, std::size_t cells,
                     Orientation orientation, unsigned threads,
                     std::size_t cache_cap = 60000000)
        : rays_(&rays), axes_(axes), cells_(cells), orientation_(orientation),
          threads_(std::max(1u, threads)) {
        if (rays.count * cells <= cache_cap) {
            cache_.resize(rays.count * cells);
            const std::size_t m = rays.sphere_dim + 1;
            parallel_for(rays.count, threads_, [&](std::size_t b, std::size_t e, unsigned) {
                for (std::size_t j = b; j < e; ++j) {
                    const double* x = rays.coords.data() + j * m;
                    double* row = cache_.data() + j * cells;
                    for (std::size_t i = 0; i < cells; ++i) {
                        const double* y = axes_.data() + i * m;
                        double dp = 0.0;
                        for (std::size_t c = 0; c < m; ++c) dp += x[c] * y[c];
                        row[i] = 1.0 / (1.0 - dp);
                    }
                }
            });
        }
    }

    std::size_t ray_count() const { return rays_->count; }

    // argmin_i d_i * r_ij (argmax for concave), ties to the lowest index.
    std::size_t assign_one(std::size_t j, std::span<const double> focal) const {
        if (!cache_.empty()) return scan(cache_.data() + j * cells_, focal);
        std::vector<double> row(cells_);
        fill_row(j, row.data());
        return scan(row.data(), focal);
    }

    void assign_all(std::span<const double> focal, std::vector<std::int32_t>& out) const {
        out.resize(rays_->count);
        parallel_for(rays_->count, threads_, [&](std::size_t b, std::size_t e, unsigned) {
            std::vector<double> scratch(cache_.empty() ? cells_ : 0);
            for (std::size_t j = b; j < e; ++j) {
                const double* row;
                if (!cache_.empty()) {
                    row = cache_.data() + j * cells_;
                } else {
                    fill_row(j, scratch.data());
                    row = scratch.data();
                }
                out[j] = static_cast<std::int32_t>(scan(row, focal));
            }
        });
    }

    MeasureVector measure(std::span<const double> focal) const {
        MeasureVector mv;
        mv.counts.assign(cells_, 0);
        std::vector<std::vector<std::int64_t>> partial(threads_);
        parallel_for(rays_->count, threads_, [&](std::size_t b, std::size_t e, unsigned w) {
            auto& counts = partial[w];
            counts.assign(cells_, 0);
            std::vector<double> scratch(cache_.empty() ? cells_ : 0);
            for (std::size_t j = b; j < e; ++j) {
                const double* row;
                if (!cache_.empty()) {
                    row = cache_.data() + j * cells_;
                } else {
                    fill_row(j, scratch.data());
                    row = scratch.data();
                }
                ++counts[scan(row, focal)];
            }
        });
        for (const auto& counts : partial) {
            if (counts.empty()) continue;
            for (std::size_t i = 0; i < cells_; ++i) mv.counts[i] += counts[i];
        }
        mv.mu.resize(cells_);
        for (std::size_t i = 0; i < cells_; ++i)
            mv.mu[i] = static_cast<double>(mv.counts[i]) * rays_->ray_weight;
        return mv;
    }

private:
    void fill_row(std::size_t j, double* row) const {
        const std::size_t m = rays_->sphere_dim + 1;
        const double* x = rays_->coords.data() + j * m;
        for (std::size_t i = 0; i < cells_; ++i) {
            const double* y = axes_.data() + i * m;
            double dp = 0.0;
            for (std::size_t c = 0; c < m; ++c) dp += x[c] * y[c];
            row[i] = 1.0 / (1.0 - dp);
        }
    }

    std::size_t scan(const double* row, std::span<const double> focal) const {
        std::size_t arg = 0;
        double best = focal[0] * row[0];
        if (orientation_ == Orientation::convex) {
            for (std::size_t i = 1; i < cells_; ++i) {
                const double v = focal[i] * row[i];
                if (v < best) { best = v; arg = i; }
            }
        } else {
            for (std::size_t i = 1; i < cells_; ++i) {
                const double v = focal[i] * row[i];
                if (v > best) { best = v; arg = i; }
            }
        }
        return arg;
    }

    const RaySet* rays_;
    std::span<const double> axes_;
    std::size_t cells_;
    Orientation orientation_;
    unsigned threads_;
    std::vector<double> cache_;
};

inline double residual_norm(const MeasureVector& mv, std::span<const double> energies) {
    double s = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double d = mv.mu[i] - energies[i];
        s += d * d;
    }
    return s;
}

} // namespace detail

// Index of the supporting paraboloid that reflects x: the one closest to the
// source (farthest for concave surfaces). Ties break to the lowest index.
inline std::size_t assign(const UnitDirection& x, const Reflector& r) {
    if (x.sphere_dim() != r.sphere_dim) throw DimensionMismatch("assign: ray dimension");
    const std::size_t m = r.sphere_dim + 1;
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < r.cell_count; ++i) {
        const double* y = r.axes.data() + i * m;
        double dp = 0.0;
        for (std::size_t c = 0; c < m; ++c) dp += x[c] * y[c];
        const double v = r.focal[i] * (1.0 / (1.0 - dp));
        if (i == 0 || (r.orientation == Orientation::convex ? v < best : v > best)) {
            best = v;
            arg = i;
        }
    }
    return arg;
}

// Monte-Carlo estimate of the measure mu_{R_K}(y_i): the energy of the rays
// whose supporting paraboloid is P(y_i).
inline MeasureVector evaluate_measure(const Reflector& r, const RaySet& rays,
                                      unsigned threads = 1) {
    if (rays.count == 0) throw Error("evaluate_measure: empty ray set");
    if (rays.sphere_dim != r.sphere_dim)
        throw DimensionMismatch("evaluate_measure: ray dimension");
    detail::AssignmentKernel kernel(rays, r.axes, r.cell_count, r.orientation, threads);
    return kernel.measure(r.focal);
}

struct BuildOptions {
    double eps = 1e-4;
    double d1 = 1.0;
    double alpha = 2.0;
    Orientation orientation = Orientation::convex;
    std::uint64_t max_iterations = 0; // 0: default cap 10 K^2 / eps
    double delta_divisor = 3.0;       // reset step Delta d_i = d_i / divisor
    unsigned threads = 1;
    std::vector<std::string>* warnings = nullptr;
};

namespace detail {

inline Reflector make_reflector(const DiscreteTargetMeasure& target, const BuildOptions& opt) {
    Reflector r;
    r.sphere_dim = target.dim;
    r.cell_count = target.count;
    r.orientation = opt.orientation;
    r.axes = target.axes;
    r.energies = target.energies;
    r.total_energy = target.total_energy;
    r.d1 = opt.d1;
    r.focal.assign(target.count, opt.d1);
    return r;
}

// Escalates alpha by doubling until the class condition
// mu_i <= g_i + eps/sqrt(K(K-1)), i >= 2, holds.
inline void push_into_class(Reflector& r, const AssignmentKernel& kernel, double eps,
                            double alpha) {
    const std::size_t k = r.cell_count;
    if (k < 2) return;
    if (!(alpha > 1.0)) throw Error("initial reflector: alpha must exceed 1");
    const double slack = eps / std::sqrt(static_cast<double>(k) * static_cast<double>(k - 1));
    const bool convex = r.orientation == Orientation::convex;

    double a = alpha;
    for (int attempt = 0; attempt < 1100; ++attempt) {
        for (std::size_t i = 1; i < k; ++i) r.focal[i] = convex ? r.d1 * a : r.d1 / a;
        const auto mv = kernel.measure(r.focal);
        bool ok = true;
        for (std::size_t i = 1; i < k; ++i)
            if (mv.mu[i] > r.energies[i] + slack) { ok = false; break; }
        if (ok) return;
        a *= 2.0;
    }
    throw Error("initial reflector: could not reach the admissible class");
}

} // namespace detail

// Initial surface R_K^0 = (d1, alpha d1, ..., alpha d1), with alpha doubled
// until the surface lies in the admissible class (concave surfaces divide
// by alpha instead).
inline Reflector initial_reflector(const DiscreteTargetMeasure& target, const RaySet& rays,
                                   double eps, double d1 = 1.0, double alpha = 2.0,
                                   Orientation orientation = Orientation::convex,
                                   unsigned threads = 1) {
    BuildOptions opt;
    opt.eps = eps;
    opt.d1 = d1;
    opt.alpha = alpha;
    opt.orientation = orientation;
    opt.threads = threads;
    Reflector r = detail::make_reflector(target, opt);
    detail::AssignmentKernel kernel(rays, r.axes, r.cell_count, r.orientation, threads);
    detail::push_into_class(r, kernel, eps, alpha);
    return r;
}

// Supporting paraboloid iteration: scale the focal parameters until the
// measured distribution matches the target energies within eps, by the
// accept / revert-and-halve schedule on the increments. d_1 never moves.
inline Reflector build_reflector(const DiscreteTargetMeasure& target, const RaySet& rays,
                                 const BuildOptions& opt = {}) {
    const std::size_t k = target.count;
    if (k == 0) throw Error("build_reflector: empty target");
    if (rays.count == 0) throw Error("build_reflector: empty ray set");
    if (!(opt.eps > 0.0)) throw Error("build_reflector: eps must be positive");

    const double g_total = target.total_energy;
    if (std::abs(rays.total_energy() - g_total) > 1e-9 * std::max(1.0, std::abs(g_total)))
        throw EnergyMismatch("build_reflector: source energy " +
                             std::to_string(rays.total_energy()) + " != target energy " +
                             std::to_string(g_total));

    auto warn = [&](const std::string& msg) {
        if (opt.warnings) opt.warnings->push_back(msg);
    };

    const double noise_floor = g_total * g_total / static_cast<double>(rays.count);
    if (opt.eps < noise_floor)
        warn("eps " + std::to_string(opt.eps) + " is below the statistical noise floor " +
             std::to_string(noise_floor) + " of N = " + std::to_string(rays.count) + " rays");
    {
        const double axis_floor = g_total / std::sqrt(static_cast<double>(rays.count));
        std::size_t below = 0;
        std::size_t first = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (target.energies[i] < axis_floor) {
                if (below == 0) first = i;
                ++below;
            }
        if (below > 0)
            warn(std::to_string(below) + " axes (first: " + std::to_string(first) +
                 ") carry energy below the per-axis noise floor G/sqrt(N) = " +
                 std::to_string(axis_floor));
    }

    Reflector r = detail::make_reflector(target, opt);
    detail::AssignmentKernel kernel(rays, r.axes, r.cell_count, r.orientation, opt.threads);

    if (k == 1) {
        const auto mv = kernel.measure(r.focal);
        r.achieved_residual = detail::residual_norm(mv, r.energies);
        r.iterations = 0;
        return r;
    }

    detail::push_into_class(r, kernel, opt.eps, opt.alpha);
    const double slack =
        opt.eps / std::sqrt(static_cast<double>(k) * static_cast<double>(k - 1));
    const bool convex = r.orientation == Orientation::convex;

    std::uint64_t cap = opt.max_iterations;
    if (cap == 0) {
        const double suggested = 10.0 * static_cast<double>(k) * static_cast<double>(k) / opt.eps;
        cap = suggested > 1e18 ? static_cast<std::uint64_t>(1e18)
                               : static_cast<std::uint64_t>(suggested);
    }

    std::vector<double> accepted = r.focal;
    std::vector<double> trial = accepted;
    std::vector<double> delta(k, 0.0);
    MeasureVector mv = kernel.measure(trial);
    double residual = detail::residual_norm(mv, r.energies);

    std::vector<double> best_focal = trial;
    double best_residual = residual;
    std::uint64_t iter = 0;
    std::vector<std::size_t> violators;

    while (residual > opt.eps) {
        if (iter >= cap) {
            r.focal = best_focal;
            r.achieved_residual = best_residual;
            r.iterations = iter;
            throw IterationCapExceeded(
                r, "build_reflector: iteration cap " + std::to_string(cap) +
                       " reached; best residual " + std::to_string(best_residual));
        }

        violators.clear();
        for (std::size_t i = 1; i < k; ++i)
            if (mv.mu[i] > r.energies[i] + slack) violators.push_back(i);

        if (violators.empty()) {
            if (trial == accepted && iter > 0) {
                r.focal = best_focal;
                r.achieved_residual = best_residual;
                r.iterations = iter;
                throw IterationCapExceeded(
                    r, "build_reflector: stalled at the ray-resolution floor; best residual " +
                           std::to_string(best_residual) + " > eps");
            }
            accepted = trial;
            for (std::size_t i = 1; i < k; ++i) delta[i] = accepted[i] / opt.delta_divisor;
        } else {
            for (std::size_t i : violators) delta[i] *= 0.5;
        }

        for (std::size_t i = 1; i < k; ++i)
            trial[i] = convex ? accepted[i] - delta[i] : accepted[i] + delta[i];

        mv = kernel.measure(trial);
        residual = detail::residual_norm(mv, r.energies);
        ++iter;
        if (residual < best_residual) {
            best_residual = residual;
            best_focal = trial;
        }
    }

    r.focal = trial;
    r.achieved_residual = residual;
    r.iterations = iter;
    return r;
}

} // namespace goas
