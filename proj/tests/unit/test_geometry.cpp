#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "goas/geometry.hpp"
#include "goas/rng.hpp"

using namespace goas;

namespace {

UnitDirection random_direction(RngStream& rng, std::size_t ambient) {
    std::vector<double> v(ambient);
    for (auto& c : v) c = rng.gaussian();
    return UnitDirection::normalized(std::move(v));
}

UnitDirection random_southern(RngStream& rng, std::size_t ambient) {
    auto u = random_direction(rng, ambient);
    if (u.last() <= -1e-3) return u;
    std::vector<double> v(u.coords().begin(), u.coords().end());
    v.back() = -std::abs(v.back()) - 1e-3;
    return UnitDirection::normalized(std::move(v));
}

} // namespace

TEST_CASE("unit direction invariants") {
    CHECK_THROWS_AS(UnitDirection({1.0}), DimensionMismatch);
    CHECK_THROWS_AS(UnitDirection({0.5, 0.5, 0.5}), Error);
    CHECK_NOTHROW(UnitDirection({0.0, 0.0, 1.0}));
    auto u = UnitDirection::normalized({3.0, 4.0, 0.0});
    CHECK(u[0] == Catch::Approx(0.6));
    CHECK(u[1] == Catch::Approx(0.8));
}

TEST_CASE("stereographic projection of named points") {
    // south pole -> origin; equator point fixed
    auto south = stereographic_project(UnitDirection({0.0, 0.0, -1.0}));
    CHECK(south[0] == 0.0);
    CHECK(south[1] == 0.0);

    auto eq = stereographic_project(UnitDirection({1.0, 0.0, 0.0}));
    CHECK(eq[0] == Catch::Approx(1.0));
    CHECK(eq[1] == Catch::Approx(0.0));

    CHECK_THROWS_AS(stereographic_project(UnitDirection({0.0, 0.0, 1.0})), NearNorthPole);
}

TEST_CASE("stereographic lift of named points") {
    auto a = stereographic_lift(PlanePoint({0.0, 0.0}));
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == -1.0);

    auto b = stereographic_lift(PlanePoint({1.0, 0.0}));
    CHECK(b[0] == Catch::Approx(1.0));
    CHECK(b[1] == Catch::Approx(0.0));
    CHECK(b[2] == Catch::Approx(0.0).margin(1e-15));

    // lift is unit-norm by construction and inverts Q
    auto c = stereographic_lift(PlanePoint({3.0, 4.0}));
    CHECK(norm(c.coords()) == Catch::Approx(1.0).epsilon(1e-14));
    auto back = stereographic_project(c);
    CHECK(back[0] == Catch::Approx(3.0).epsilon(1e-13));
    CHECK(back[1] == Catch::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("stereographic round trips") {
    RngStream rng(71);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<double> z(2);
        for (auto& v : z) v = rng.uniform(-8.0, 8.0);
        auto lifted = stereographic_lift(PlanePoint(z));
        auto back = stereographic_project(lifted);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(back[i] - z[i]) < 1e-12 * std::max(1.0, std::abs(z[i])));
    }
    for (int rep = 0; rep < 500; ++rep) {
        auto y = random_direction(rng, 3);
        if (1.0 - y.last() < 1e-6) continue;
        auto z = stereographic_project(y);
        auto back = stereographic_lift(z);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(back[i] - y[i]) < 1e-10);
    }
}

TEST_CASE("geodesic distance") {
    UnitDirection ex({1.0, 0.0, 0.0});
    UnitDirection ey({0.0, 1.0, 0.0});
    UnitDirection mex({-1.0, 0.0, 0.0});
    CHECK(geodesic_distance(ex, ex) == 0.0);
    CHECK(geodesic_distance(ex, ey) == Catch::Approx(std::acos(0.0)));
    CHECK(geodesic_distance(ex, mex) == Catch::Approx(std::acos(-1.0)));
    CHECK_THROWS_AS(geodesic_distance(ex, UnitDirection({1.0, 0.0, 0.0, 0.0})),
                    DimensionMismatch);
}

TEST_CASE("geodesic distance is a metric on sampled triples") {
    RngStream rng(12);
    for (int rep = 0; rep < 300; ++rep) {
        auto a = random_direction(rng, 4);
        auto b = random_direction(rng, 4);
        auto c = random_direction(rng, 4);
        const double ab = geodesic_distance(a, b);
        const double ba = geodesic_distance(b, a);
        CHECK(ab == ba);
        CHECK(geodesic_distance(a, c) <= ab + geodesic_distance(b, c) + 1e-12);
    }
}

TEST_CASE("|x-y|^2 = 2(1 - x.y) for unit pairs") {
    RngStream rng(13);
    for (int rep = 0; rep < 300; ++rep) {
        auto x = random_direction(rng, 3);
        auto y = random_direction(rng, 3);
        double d2 = 0.0;
        for (std::size_t i = 0; i < 3; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
        CHECK(std::abs(d2 - 2.0 * (1.0 - dot(x.coords(), y.coords()))) < 1e-12);
    }
}

TEST_CASE("paraboloid radius") {
    UnitDirection axis({0.0, 0.0, -1.0});
    UnitDirection perp({1.0, 0.0, 0.0});
    UnitDirection anti({0.0, 0.0, 1.0});
    CHECK(paraboloid_radius(perp, axis, 2.5) == Catch::Approx(2.5));
    CHECK(paraboloid_radius(anti, axis, 2.0) == Catch::Approx(1.0));

    // x.axis = 0.5, focal 2 -> 4
    UnitDirection half = UnitDirection::normalized({std::sqrt(3.0) / 2.0, 0.0, -0.5});
    CHECK(half[2] * axis[2] + half[0] * axis[0] == Catch::Approx(0.5));
    CHECK(paraboloid_radius(half, axis, 2.0) == Catch::Approx(4.0));

    CHECK_THROWS_AS(paraboloid_radius(axis, axis, 1.0), DegenerateDirection);
}

TEST_CASE("reflection returns the paraboloid axis") {
    UnitDirection down({0.0, 0.0, -1.0});
    auto r1 = reflect_off_paraboloid(UnitDirection({0.0, 0.0, 1.0}), down, 3.7);
    CHECK(r1[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r1[2] == Catch::Approx(-1.0));

    // hand-derived case: equator ray against the south axis
    auto r2 = reflect_off_paraboloid(UnitDirection({1.0, 0.0, 0.0}), down, 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r2[i] - down[i]) < 1e-12);
}

TEST_CASE("reflection law property sweep") {
    RngStream rng(1009);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        auto x = random_direction(rng, 3);
        auto axis = random_southern(rng, 3);
        if (dot(x.coords(), axis.coords()) > 1.0 - 1e-9) continue;
        const double focal = rng.uniform(0.1, 10.0);
        auto y = reflect_off_paraboloid(x, axis, focal);
        double err = 0.0;
        for (std::size_t i = 0; i < 3; ++i) err = std::max(err, std::abs(y[i] - axis[i]));
        worst = std::max(worst, err);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("box operations") {
    Box b({-1.0, 0.0}, {1.0, 4.0});
    CHECK(b.volume() == Catch::Approx(8.0));
    CHECK(b.contains(PlanePoint({0.0, 2.0})));
    CHECK_FALSE(b.contains(PlanePoint({2.0, 2.0})));
    auto p = b.padded(0.5);
    CHECK(p.lower[0] == Catch::Approx(-2.0));
    CHECK(p.upper[1] == Catch::Approx(6.0));
    CHECK_THROWS_AS(Box({0.0, 1.0}, {1.0, 1.0}), Error);
}
