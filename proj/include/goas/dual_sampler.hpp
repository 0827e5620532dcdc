#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "reflector.hpp"
#include "rng.hpp"
#include "sequences.hpp"

namespace goas {

enum class ProposalKind { uniform_box, gaussian };

inline ProposalKind proposal_from_string(const std::string& s) {
    if (s == "uniform" || s == "uniform_box") return ProposalKind::uniform_box;
    if (s == "gaussian") return ProposalKind::gaussian;
    throw UnknownName("unknown proposal kind '" + s + "'");
}

inline std::string to_string(ProposalKind k) {
    return k == ProposalKind::uniform_box ? "uniform_box" : "gaussian";
}

// Legendre-dual surface of a built reflector: per-cell mean ray directions
// x_i, dual focal parameters d*_i = 1/rho_i, and the proposal geometry used
// by dual re-simulation. The sampling box is the target domain extended by
// half a proposal width, so every emitted point lies inside it.
struct DualReflector {
    std::size_t sphere_dim = 0;
    std::size_t cell_count = 0;
    Orientation orientation = Orientation::convex;
    std::vector<double> cell_dirs;    // K x (n+1)
    std::vector<double> mean_radius;  // rho_i
    std::vector<double> dual_focal;   // d*_i = 1/rho_i
    std::vector<double> cell_centers; // K x n, z'_i = Q(y_i)
    std::vector<std::int64_t> build_counts;
    double proposal_width = 0.0; // l
    ProposalKind kind = ProposalKind::uniform_box;
    Box domain;
    Box sampling_box;

    DualReflector() : domain({0.0}, {1.0}), sampling_box({0.0}, {1.0}) {}

    std::span<const double> cell_dir(std::size_t i) const {
        return {cell_dirs.data() + i * (sphere_dim + 1), sphere_dim + 1};
    }
    std::span<const double> cell_center(std::size_t i) const {
        return {cell_centers.data() + i * sphere_dim, sphere_dim};
    }
};

// Dual construction: split the construction rays by supporting paraboloid,
// average each part into the dual axis x_i and the mean polar radius rho_i.
// Fails with EmptyCell when a cell received no rays (reflector
// under-resolved for this ray budget).
inline DualReflector build_dual(const Reflector& r, const RaySet& rays, const Box& domain,
                                ProposalKind kind, double width_override = 0.0,
                                unsigned threads = 1,
                                std::vector<std::string>* warnings = nullptr) {
    if (domain.dim() != r.sphere_dim) throw DimensionMismatch("build_dual: domain dimension");
    const std::size_t k = r.cell_count;
    const std::size_t m = r.sphere_dim + 1;

    detail::AssignmentKernel kernel(rays, r.axes, k, r.orientation, threads);
    std::vector<std::int32_t> cell(rays.count);
    kernel.assign_all(r.focal, cell);

    DualReflector dual;
    dual.sphere_dim = r.sphere_dim;
    dual.cell_count = k;
    dual.orientation = r.orientation;
    dual.kind = kind;
    dual.cell_dirs.assign(k * m, 0.0);
    dual.mean_radius.assign(k, 0.0);
    dual.build_counts.assign(k, 0);

    for (std::size_t j = 0; j < rays.count; ++j) {
        const std::size_t i = static_cast<std::size_t>(cell[j]);
        const double* x = rays.coords.data() + j * m;
        double* acc = dual.cell_dirs.data() + i * m;
        for (std::size_t c = 0; c < m; ++c) acc[c] += x[c];
        const double* y = r.axes.data() + i * m;
        double dp = 0.0;
        for (std::size_t c = 0; c < m; ++c) dp += x[c] * y[c];
        dual.mean_radius[i] += r.focal[i] / (1.0 - dp);
        ++dual.build_counts[i];
    }

    dual.dual_focal.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (dual.build_counts[i] == 0)
            throw EmptyCell(i, "build_dual: cell " + std::to_string(i) +
                                   " received no construction rays (energy " +
                                   std::to_string(r.energies[i]) + ")");
        const double inv_n = 1.0 / static_cast<double>(dual.build_counts[i]);
        double* acc = dual.cell_dirs.data() + i * m;
        double nrm = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            acc[c] *= inv_n;
            nrm += acc[c] * acc[c];
        }
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0))
            throw EmptyCell(i, "build_dual: degenerate mean direction in cell " +
                                   std::to_string(i));
        // mean of unit vectors is sub-unit; renormalize so the dual
        // paraboloid axis is a direction
        for (std::size_t c = 0; c < m; ++c) acc[c] /= nrm;
        dual.mean_radius[i] *= inv_n;
        dual.dual_focal[i] = 1.0 / dual.mean_radius[i];
    }

    dual.cell_centers.resize(k * r.sphere_dim);
    for (std::size_t i = 0; i < k; ++i)
        flat::stereographic_project(r.axis(i),
                                    {dual.cell_centers.data() + i * r.sphere_dim, r.sphere_dim});

    dual.domain = domain;
    const double n_inv = 1.0 / static_cast<double>(r.sphere_dim);
    dual.proposal_width =
        width_override > 0.0
            ? width_override
            : std::pow(domain.volume() / static_cast<double>(k), n_inv);
    dual.sampling_box = domain.padded_abs(0.5 * dual.proposal_width);

    // Coverage guard: the proposal supports must union-cover the domain.
    if (warnings && k > 1) {
        double max_nn = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t j2 = 0; j2 < k; ++j2) {
                if (j2 == i) continue;
                double d2 = 0.0;
                for (std::size_t c = 0; c < r.sphere_dim; ++c) {
                    const double d = dual.cell_centers[i * r.sphere_dim + c] -
                                     dual.cell_centers[j2 * r.sphere_dim + c];
                    d2 += d * d;
                }
                nn = std::min(nn, d2);
            }
            max_nn = std::max(max_nn, std::sqrt(nn));
        }
        if (dual.proposal_width < 0.5 * max_nn)
            warnings->push_back("proposal width l = " + std::to_string(dual.proposal_width) +
                                " is below half the largest cell spacing " +
                                std::to_string(max_nn) +
                                "; proposal supports may not cover the domain");
    }
    return dual;
}

// Direction in which y is reflected by the dual surface:
// argmin_i d*_i / (1 - x_i . y), ties to the lowest index (argmax for a
// concave parent).
inline std::size_t dual_assign(const UnitDirection& y, const DualReflector& dual) {
    if (y.sphere_dim() != dual.sphere_dim) throw DimensionMismatch("dual_assign: dimension");
    const std::size_t m = dual.sphere_dim + 1;
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < dual.cell_count; ++i) {
        const double* x = dual.cell_dirs.data() + i * m;
        double dp = 0.0;
        for (std::size_t c = 0; c < m; ++c) dp += x[c] * y[c];
        const double v = dual.dual_focal[i] * (1.0 / (1.0 - dp));
        if (i == 0 || (dual.orientation == Orientation::convex ? v < best : v > best)) {
            best = v;
            arg = i;
        }
    }
    return arg;
}

struct Proposal {
    PlanePoint plane;
    UnitDirection lifted;
};

// Candidate near cell j's center: uniform on the l-box or N(z'_j, (l/6)^2 I).
inline Proposal propose(std::size_t j, const DualReflector& dual, RngStream& rng) {
    if (j >= dual.cell_count) throw Error("propose: cell index out of range");
    const std::size_t n = dual.sphere_dim;
    const auto center = dual.cell_center(j);
    std::vector<double> z(n);
    if (dual.kind == ProposalKind::uniform_box) {
        for (std::size_t c = 0; c < n; ++c)
            z[c] = center[c] + dual.proposal_width * (rng.uniform01() - 0.5);
    } else {
        for (std::size_t c = 0; c < n; ++c)
            z[c] = center[c] + (dual.proposal_width / 6.0) * rng.gaussian();
    }
    PlanePoint plane(std::move(z));
    UnitDirection lifted = stereographic_lift(plane);
    return {std::move(plane), std::move(lifted)};
}

struct DrawResult {
    PlanePoint point;
    std::size_t cell;
    std::uint64_t retries;
};

// One dual re-simulation: route the source ray to its cell j, then propose
// near z'_j until the dual surface routes the candidate back to j. Gaussian
// proposals are truncated to the sampling box so batch points always lie
// inside it.
inline DrawResult draw_sample(const UnitDirection& x, const Reflector& r,
                              const DualReflector& dual, RngStream& rng,
                              std::uint64_t retry_cap = 10000) {
    const std::size_t j = assign(x, r);
    std::uint64_t retries = 0;
    while (retries <= retry_cap) {
        Proposal prop = propose(j, dual, rng);
        if (dual.sampling_box.contains(prop.plane.coords())) {
            const std::size_t kk = dual_assign(prop.lifted, dual);
            if (kk == j) return {std::move(prop.plane), j, retries};
        }
        ++retries;
    }
    throw RetryCapExceeded(j, "draw_sample: retry cap " + std::to_string(retry_cap) +
                                  " exceeded in cell " + std::to_string(j) +
                                  " (proposal width " + std::to_string(dual.proposal_width) +
                                  ")");
}

// Batch of dual re-simulated samples in the plane.
struct SampleBatch {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<double> points; // M x n
    std::vector<std::int32_t> cells;
    std::vector<std::int32_t> retries;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * dim, dim};
    }

    double mean_retries() const {
        double s = 0.0;
        for (auto v : retries) s += v;
        return count ? s / static_cast<double>(count) : 0.0;
    }
};

// M independent draws. Each sample owns a derived stream, so batches are
// reproducible for any thread count.
inline SampleBatch sample(std::size_t count, const Reflector& r, const DualReflector& dual,
                          RngStream base, unsigned threads = 1,
                          std::uint64_t retry_cap = 10000) {
    if (count == 0) throw Error("sample: M must be >= 1");
    const std::size_t n = r.sphere_dim;
    SampleBatch batch;
    batch.dim = n;
    batch.count = count;
    batch.points.resize(count * n);
    batch.cells.resize(count);
    batch.retries.resize(count);
    batch.seed = base.seed();
    batch.stream = base.stream();

    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(count, threads, [&](std::size_t b, std::size_t e, unsigned) {
        try {
            for (std::size_t i = b; i < e; ++i) {
                RngStream rng = base.substream(i);
                std::vector<double> v(n + 1);
                double s2 = 0.0;
                do {
                    s2 = 0.0;
                    for (auto& c : v) {
                        c = rng.gaussian();
                        s2 += c * c;
                    }
                } while (s2 == 0.0);
                const double inv = 1.0 / std::sqrt(s2);
                for (auto& c : v) c *= inv;
                if (v[n] < 0.0) v[n] = -v[n];
                UnitDirection x(std::move(v));

                DrawResult res = draw_sample(x, r, dual, rng, retry_cap);
                for (std::size_t c = 0; c < n; ++c) batch.points[i * n + c] = res.point[c];
                batch.cells[i] = static_cast<std::int32_t>(res.cell);
                batch.retries[i] = static_cast<std::int32_t>(res.retries);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return batch;
}

} // namespace goas
