#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "goas/sequences.hpp"

using namespace goas;

TEST_CASE("radical inverse base 2") {
    CHECK(radical_inverse(0, 2) == 0.0);
    CHECK(radical_inverse(1, 2) == 0.5);
    CHECK(radical_inverse(2, 2) == 0.25);
    CHECK(radical_inverse(3, 2) == 0.75);
    CHECK(radical_inverse(4, 2) == 0.125);
    CHECK(radical_inverse(5, 3) == Catch::Approx(2.0 / 3.0 + 1.0 / 9.0));
}

TEST_CASE("hammersley frozen values for K=4 on the unit box") {
    Box unit({0.0, 0.0}, {1.0, 1.0});
    auto pts = hammersley(4, 2, unit);
    REQUIRE(pts.size() == 4);
    // first coordinate: (i + 1/2)/K
    CHECK(pts[0][0] == Catch::Approx(0.125));
    CHECK(pts[1][0] == Catch::Approx(0.375));
    CHECK(pts[2][0] == Catch::Approx(0.625));
    CHECK(pts[3][0] == Catch::Approx(0.875));
    // second coordinate: radical inverse {0, 1/2, 1/4, 3/4} shifted by 1/(2K)
    CHECK(pts[0][1] == Catch::Approx(0.125));
    CHECK(pts[1][1] == Catch::Approx(0.625));
    CHECK(pts[2][1] == Catch::Approx(0.375));
    CHECK(pts[3][1] == Catch::Approx(0.875));
}

TEST_CASE("hammersley K=1 is the box center") {
    Box b({-2.0, 3.0, 0.0}, {2.0, 5.0, 10.0});
    auto pts = hammersley(1, 3, b);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0][0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(pts[0][1] == Catch::Approx(4.0));
    CHECK(pts[0][2] == Catch::Approx(5.0));
}

TEST_CASE("hammersley points stay strictly inside the box") {
    Box b({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    for (std::size_t k : {1u, 7u, 64u, 509u}) {
        auto pts = hammersley(k, 3, b);
        for (const auto& p : pts)
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(p[j] > b.lower[j]);
                CHECK(p[j] < b.upper[j]);
            }
    }
}

TEST_CASE("hammersley first-coordinate stratification") {
    Box unit({0.0, 0.0}, {1.0, 1.0});
    const std::size_t k = 101;
    auto pts = hammersley(k, 2, unit);
    std::vector<double> first;
    for (const auto& p : pts) first.push_back(p[0]);
    std::sort(first.begin(), first.end());
    for (std::size_t i = 1; i < first.size(); ++i)
        CHECK(first[i] - first[i - 1] == Catch::Approx(1.0 / k).margin(1e-15));
}

TEST_CASE("grid points") {
    Box unit({0.0, 0.0}, {1.0, 1.0});
    auto g22 = grid_points(unit, {2, 2});
    REQUIRE(g22.size() == 4);
    std::set<std::pair<double, double>> got;
    for (const auto& p : g22) got.insert({p[0], p[1]});
    std::set<std::pair<double, double>> want{
        {0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}};
    CHECK(got == want);

    auto g11 = grid_points(unit, {1, 1});
    REQUIRE(g11.size() == 1);
    CHECK(g11[0][0] == 0.5);
    CHECK(g11[0][1] == 0.5);

    auto g31 = grid_points(unit, {3, 1});
    REQUIRE(g31.size() == 3);
    for (const auto& p : g31) CHECK(p[1] == 0.5);

    CHECK_THROWS_AS(grid_points(unit, {100000, 100000}, 1000000), Overflow);
}

TEST_CASE("source rays live on the northern hemisphere") {
    auto rays = sample_source_rays(2000, 2, RngStream(5));
    REQUIRE(rays.count == 2000);
    for (std::size_t j = 0; j < rays.count; ++j) {
        auto r = rays.ray(j);
        CHECK(std::abs(norm(r) - 1.0) < 1e-12);
        CHECK(r[2] >= 0.0);
    }
    CHECK(rays.total_energy() == Catch::Approx(1.0));
}

TEST_CASE("source rays match the analytic hemisphere moment") {
    // uniform on S^2_+ has E[x3] = 1/2; with N = 1e5 the 3 sigma band is
    // about 3 * sqrt(1/12: Var(x3) = 1/12) / sqrt(N) ~ 0.003
    const std::size_t n = 100000;
    auto rays = sample_source_rays(n, 2, RngStream(99));
    double mean_last = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean_last += rays.ray(j)[2];
    mean_last /= static_cast<double>(n);
    CHECK(std::abs(mean_last - 0.5) < 0.003);
}

TEST_CASE("source ray coordinates are uncorrelated") {
    const std::size_t n = 20000;
    auto rays = sample_source_rays(n, 3, RngStream(17));
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) {
            double saa = 0.0, sbb = 0.0, sab = 0.0, sa = 0.0, sb = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double va = rays.ray(j)[a];
                const double vb = rays.ray(j)[b];
                sa += va; sb += vb;
                saa += va * va; sbb += vb * vb; sab += va * vb;
            }
            const double cov = sab / n - (sa / n) * (sb / n);
            const double var_a = saa / n - (sa / n) * (sa / n);
            const double var_b = sbb / n - (sb / n) * (sb / n);
            const double r = cov / std::sqrt(var_a * var_b);
            CHECK(std::abs(r) < 4.0 / std::sqrt(static_cast<double>(n)));
        }
}

TEST_CASE("sequences are reproducible per (seed, stream)") {
    auto a = sample_source_rays(100, 2, RngStream(123, 7));
    auto b = sample_source_rays(100, 2, RngStream(123, 7));
    auto c = sample_source_rays(100, 2, RngStream(123, 8));
    CHECK(a.coords == b.coords);
    CHECK(a.coords != c.coords);
}
