#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "rng.hpp"

namespace goas {

// Source rays on the northern hemisphere S^n_+ with a common energy weight.
// The weight is f_j = G/N once the total energy G has been attached; a fresh
// set carries G = 1. Coordinates are stored row-major, N x (n+1).
struct RaySet {
    std::size_t sphere_dim = 0; // n
    std::size_t count = 0;      // N
    std::vector<double> coords;
    double ray_weight = 0.0;

    std::span<const double> ray(std::size_t j) const {
        return {coords.data() + j * (sphere_dim + 1), sphere_dim + 1};
    }

    UnitDirection direction(std::size_t j) const {
        auto r = ray(j);
        return UnitDirection(std::vector<double>(r.begin(), r.end()));
    }

    double total_energy() const { return static_cast<double>(count) * ray_weight; }

    void set_total_energy(double g) { ray_weight = g / static_cast<double>(count); }
};

inline const std::vector<unsigned>& small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> p;
        for (unsigned c = 2; p.size() < 64; ++c) {
            bool prime = true;
            for (unsigned q : p) {
                if (q * q > c) break;
                if (c % q == 0) { prime = false; break; }
            }
            if (prime) p.push_back(c);
        }
        return p;
    }();
    return primes;
}

// Van der Corput digit reversal of `index` in the given base.
inline double radical_inverse(std::uint64_t index, unsigned base) {
    if (base < 2) throw Error("radical_inverse: base must be >= 2");
    const double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

// Hammersley points in a box. Convention (the construction itself does not
// pin one down): point i has first coordinate (i + 1/2)/K; coordinate j >= 1
// is the radical inverse of i in the j-th prime, shifted by 1/(2K) modulo 1.
// The shift keeps the i = 0 point off the box boundary; with K = 1 every
// coordinate lands at the box center.
inline std::vector<PlanePoint> hammersley(std::size_t count, std::size_t dim, const Box& box) {
    if (count == 0) throw Error("hammersley: count must be >= 1");
    if (dim == 0 || box.dim() != dim) throw DimensionMismatch("hammersley: bad dimension");
    const auto& primes = small_primes();
    if (dim - 1 > primes.size()) throw Error("hammersley: dimension too large");

    std::vector<PlanePoint> pts;
    pts.reserve(count);
    const double shift = 0.5 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> u(dim);
        u[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        for (std::size_t j = 1; j < dim; ++j) {
            double v = radical_inverse(i, primes[j - 1]) + shift;
            if (v >= 1.0) v -= 1.0;
            u[j] = v;
        }
        std::vector<double> z(dim);
        for (std::size_t j = 0; j < dim; ++j) z[j] = box.lower[j] + u[j] * box.side(j);
        pts.emplace_back(std::move(z));
    }
    return pts;
}

// Cell-centered tensor grid; the first dimension varies slowest.
inline std::vector<PlanePoint> grid_points(const Box& box, const std::vector<std::size_t>& per_dim,
                                           std::size_t cap = 100000000) {
    if (per_dim.size() != box.dim()) throw DimensionMismatch("grid_points: per_dim size mismatch");
    std::size_t total = 1;
    for (std::size_t m : per_dim) {
        if (m == 0) throw Error("grid_points: per_dim entries must be positive");
        if (total > cap / m) throw Overflow("grid_points: grid size exceeds cap");
        total *= m;
    }

    const std::size_t n = box.dim();
    std::vector<PlanePoint> pts;
    pts.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        std::vector<double> z(n);
        for (std::size_t j = 0; j < n; ++j)
            z[j] = box.lower[j] +
                   (static_cast<double>(idx[j]) + 0.5) * box.side(j) / static_cast<double>(per_dim[j]);
        pts.emplace_back(std::move(z));
        for (std::size_t j = n; j-- > 0;) {
            if (++idx[j] < per_dim[j]) break;
            idx[j] = 0;
        }
    }
    return pts;
}

// N unit directions uniform on the northern hemisphere S^n_+: normalized
// standard Gaussian draws with the last coordinate mirrored to be
// nonnegative. Mirroring preserves uniformity and wastes no draws.
inline RaySet sample_source_rays(std::size_t count, std::size_t dim, RngStream rng) {
    if (count == 0) throw Error("sample_source_rays: count must be >= 1");
    if (dim == 0) throw DimensionMismatch("sample_source_rays: dim must be >= 1");
    RaySet rays;
    rays.sphere_dim = dim;
    rays.count = count;
    rays.coords.resize(count * (dim + 1));
    rays.ray_weight = 1.0 / static_cast<double>(count);

    const std::size_t m = dim + 1;
    for (std::size_t j = 0; j < count; ++j) {
        double* row = rays.coords.data() + j * m;
        double s2 = 0.0;
        do {
            s2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                row[i] = rng.gaussian();
                s2 += row[i] * row[i];
            }
        } while (s2 == 0.0);
        const double inv = 1.0 / std::sqrt(s2);
        for (std::size_t i = 0; i < m; ++i) row[i] *= inv;
        if (row[dim] < 0.0) row[dim] = -row[dim];
    }
    return rays;
}

} // namespace goas
