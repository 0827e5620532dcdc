#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace goas {

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kNorthPoleGap = 1e-9;
inline constexpr double kAxisAlignGap = 1e-12;

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionMismatch("dot: operand sizes " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

// A point on S^n, stored as its n+1 ambient coordinates.
class UnitDirection {
public:
    explicit UnitDirection(std::vector<double> coords) : c_(std::move(coords)) {
        if (c_.size() < 2)
            throw DimensionMismatch("UnitDirection needs at least 2 coordinates (n >= 1)");
        if (std::abs(norm(c_) - 1.0) > kUnitNormTol)
            throw Error("UnitDirection: norm deviates from 1 by more than 1e-12");
    }

    // Rescales arbitrary nonzero coordinates onto the sphere.
    static UnitDirection normalized(std::vector<double> coords) {
        const double n = norm(coords);
        if (!(n > 0.0)) throw DegenerateDirection("cannot normalize the zero vector");
        for (double& v : coords) v /= n;
        return UnitDirection(std::move(coords));
    }

    std::size_t ambient_dim() const { return c_.size(); }     // n+1
    std::size_t sphere_dim() const { return c_.size() - 1; }  // n
    double operator[](std::size_t i) const { return c_[i]; }
    double last() const { return c_.back(); }
    std::span<const double> coords() const { return c_; }

private:
    std::vector<double> c_;
};

// A point in the planar target domain, n coordinates.
class PlanePoint {
public:
    explicit PlanePoint(std::vector<double> coords) : c_(std::move(coords)) {
        for (double v : c_)
            if (!std::isfinite(v)) throw Error("PlanePoint: non-finite coordinate");
    }

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    std::span<const double> coords() const { return c_; }

private:
    std::vector<double> c_;
};

// Axis-aligned box in R^n with strictly positive side lengths.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    Box(std::vector<double> lo, std::vector<double> hi)
        : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.empty())
            throw DimensionMismatch("Box: lower/upper size mismatch");
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (!(lower[i] < upper[i])) throw Error("Box: lower[i] < upper[i] violated");
    }

    std::size_t dim() const { return lower.size(); }

    double side(std::size_t i) const { return upper[i] - lower[i]; }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
        return v;
    }

    bool contains(std::span<const double> z) const {
        if (z.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (z[i] < lower[i] || z[i] > upper[i]) return false;
        return true;
    }
    bool contains(const PlanePoint& z) const { return contains(z.coords()); }

    std::vector<double> center() const {
        std::vector<double> c(dim());
        for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
        return c;
    }

    // Inflate each side by `fraction` of its width.
    Box padded(double fraction) const {
        Box b = *this;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double pad = fraction * side(i);
            b.lower[i] -= pad;
            b.upper[i] += pad;
        }
        return b;
    }

    // Inflate each side by an absolute margin.
    Box padded_abs(double margin) const {
        Box b = *this;
        for (std::size_t i = 0; i < dim(); ++i) {
            b.lower[i] -= margin;
            b.upper[i] += margin;
        }
        return b;
    }
};

namespace flat {

// Raw-coordinate kernels shared by the batch code paths. Inputs are assumed
// unit-length; no validation happens here.

inline void stereographic_project(std::span<const double> y, std::span<double> z_out) {
    const std::size_t n = y.size() - 1;
    const double denom = 1.0 - y[n];
    for (std::size_t i = 0; i < n; ++i) z_out[i] = y[i] / denom;
}

inline void stereographic_lift(std::span<const double> z, std::span<double> y_out) {
    const std::size_t n = z.size();
    const double r2 = squared_norm(z);
    const double denom = r2 + 1.0;
    for (std::size_t i = 0; i < n; ++i) y_out[i] = 2.0 * z[i] / denom;
    y_out[n] = (r2 - 1.0) / denom;
}

inline double paraboloid_radius(std::span<const double> x, std::span<const double> axis,
                                double focal) {
    return focal / (1.0 - dot(x, axis));
}

} // namespace flat

// Q : S^n \ {north pole} -> R^n, Q(y) = (y_1,...,y_n) / (1 - y_{n+1}).
inline PlanePoint stereographic_project(const UnitDirection& y) {
    if (1.0 - y.last() < kNorthPoleGap)
        throw NearNorthPole("stereographic_project: direction too close to the north pole");
    std::vector<double> z(y.sphere_dim());
    flat::stereographic_project(y.coords(), z);
    return PlanePoint(std::move(z));
}

// Q^{-1}(z) = (2 z, |z|^2 - 1) / (|z|^2 + 1); inverse of Q on its domain.
inline UnitDirection stereographic_lift(const PlanePoint& z) {
    std::vector<double> y(z.dim() + 1);
    flat::stereographic_lift(z.coords(), y);
    return UnitDirection(std::move(y));
}

// Geodesic distance on S^n; the dot product is clamped to [-1,1] so rounding
// noise on unit vectors cannot produce NaN.
inline double geodesic_distance(const UnitDirection& x, const UnitDirection& y) {
    const double c = std::clamp(dot(x.coords(), y.coords()), -1.0, 1.0);
    return std::acos(c);
}

// Polar radius p_{y,d}(x) = d / (1 - x.y) of the paraboloid with focus at the
// origin, axis direction `axis` and focal parameter `focal`.
inline double paraboloid_radius(const UnitDirection& x, const UnitDirection& axis, double focal) {
    if (!(focal > 0.0)) throw Error("paraboloid_radius: focal parameter must be positive");
    const double c = dot(x.coords(), axis.coords());
    if (c >= 1.0 - kAxisAlignGap)
        throw DegenerateDirection("paraboloid_radius: ray aligned with the paraboloid axis");
    return focal / (1.0 - c);
}

// Reflects the ray x off the paraboloid surface point x * p(x). The surface
// is the level set |X| - X.axis = focal, so the outward normal at any of its
// points is the normalized gradient x - axis. By the focal property the
// reflected direction equals the axis up to rounding; this operation exists
// as a verification oracle for the reflection law y = x - 2 (x.v) v.
inline UnitDirection reflect_off_paraboloid(const UnitDirection& x, const UnitDirection& axis,
                                            double focal) {
    (void)paraboloid_radius(x, axis, focal); // validates preconditions
    const std::size_t m = x.ambient_dim();
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = x[i] - axis[i];
    const double g = norm(v);
    for (std::size_t i = 0; i < m; ++i) v[i] /= g;
    const double xv = dot(x.coords(), v);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = x[i] - 2.0 * xv * v[i];
    return UnitDirection::normalized(std::move(y));
}

} // namespace goas
