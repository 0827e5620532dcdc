#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "../support/oracles.hpp"
#include "goas/inverse_problems.hpp"

using namespace goas;

TEST_CASE("bod forward map hand evaluation at theta = 0") {
    // A = 0.4 + 0.4 (1 + erf 0) = 0.8, B = 0.01 + 0.15 (1 + erf 0) = 0.16
    const std::vector<double> theta{0.0, 0.0};
    const auto pred = bod_predict(theta);
    REQUIRE(pred.size() == 5);
    for (int t = 1; t <= 5; ++t)
        CHECK(pred[t - 1] == Catch::Approx(0.8 * (1.0 - std::exp(-0.16 * t))).epsilon(1e-14));

    // density by direct formula
    const auto& y = bod_data();
    double misfit = 0.0;
    for (int i = 0; i < 5; ++i) misfit += (pred[i] - y[i]) * (pred[i] - y[i]);
    CHECK(bod_posterior(theta) == Catch::Approx(std::exp(-500.0 * misfit)).epsilon(1e-12));
}

TEST_CASE("bod posterior is strictly positive") {
    for (double a : {-3.0, 0.0, 2.0})
        for (double b : {-3.0, 0.5, 3.0}) {
            const std::vector<double> theta{a, b};
            CHECK(bod_posterior(theta) > 0.0);
        }
}

TEST_CASE("bod posterior mean matches the MCMC-true reference by quadrature") {
    // grid quadrature with ~1e6 nodes; reference mean (0.0340, 0.9224)
    const auto q = oracles::quad_moments_2d(
        [](double a, double b) {
            const std::vector<double> theta{a, b};
            return bod_posterior(theta);
        },
        -4.0, 4.0, -4.0, 4.0, 1000);
    CHECK(q.mean[0] == Catch::Approx(0.0340).margin(0.01));
    CHECK(q.mean[1] == Catch::Approx(0.9224).margin(0.01));
}

TEST_CASE("beam solver reproduces the uniform cantilever tip deflection") {
    // E = 1, f = 1: u(L) = L^4 / 8
    const auto u = EulerBernoulliBeam::solve(1.0, 1.0);
    REQUIRE(u.size() == 601);
    CHECK(u.front() == Catch::Approx(0.0).margin(1e-10));
    CHECK(std::abs(u.back() - 0.125) / 0.125 < 1e-4);
    // full deflection curve against the analytic solution
    for (std::size_t j = 0; j < 601; j += 60) {
        const double x = static_cast<double>(j) / 600.0;
        const double exact = (x * x * x * x - 4.0 * x * x * x + 6.0 * x * x) / 24.0;
        CHECK(u[j] == Catch::Approx(exact).margin(1e-4 * 0.125));
    }
}

TEST_CASE("beam deflection scales as 1/E") {
    const auto u1 = EulerBernoulliBeam::solve(1.0, 1.0);
    const auto u2 = EulerBernoulliBeam::solve(2.0, 2.0);
    for (std::size_t j = 100; j < 601; j += 100)
        CHECK(u2[j] == Catch::Approx(0.5 * u1[j]).epsilon(1e-10));
}

TEST_CASE("beam finite differences converge under mesh refinement") {
    // smooth varying stiffness; self-convergence of the tip deflection at
    // O(h^2): successive refinement errors shrink by about 4
    auto tip = [](std::size_t nodes) {
        std::vector<double> e(nodes);
        for (std::size_t j = 0; j < nodes; ++j) {
            const double x = static_cast<double>(j) / static_cast<double>(nodes - 1);
            e[j] = 1.0 + x;
        }
        return EulerBernoulliBeam::solve_profile(e, 1.0, 1.0).back();
    };
    const double t1 = tip(151), t2 = tip(301), t4 = tip(601);
    const double ratio = std::abs(t1 - t2) / std::abs(t2 - t4);
    CHECK(ratio > 2.5);
    CHECK(std::abs(t2 - t4) < 1e-5);
}

TEST_CASE("beam observation layout") {
    const auto& nodes = EulerBernoulliBeam::observation_nodes();
    REQUIRE(nodes.size() == 41);
    CHECK(nodes.front() > 0);   // the clamped end is not observed
    CHECK(nodes.back() == 600); // the tip is
    for (std::size_t j = 1; j < nodes.size(); ++j) CHECK(nodes[j] > nodes[j - 1]);
}

TEST_CASE("beam posterior peaks at the truth under noiseless data") {
    // noiseless variant: build the posterior by hand with sigma from the
    // standard 20% level but data = exact forward output
    const auto data = EulerBernoulliBeam::observe(1.0, 1.0);
    const double sigma = 0.2 * EulerBernoulliBeam::solve(1.0, 1.0).back();
    auto likelihood = [&](double t1, double t2) {
        const auto pred = EulerBernoulliBeam::observe(t1, t2);
        double misfit = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j)
            misfit += (pred[j] - data[j]) * (pred[j] - data[j]);
        return -0.5 * misfit / (sigma * sigma);
    };
    const double at_truth = likelihood(1.0, 1.0);
    double best = -1e300;
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            const double t1 = 0.25 + 1.5 * i / 20.0;
            const double t2 = 0.25 + 1.5 * j / 20.0;
            best = std::max(best, likelihood(t1, t2));
        }
    CHECK(at_truth >= best - 1e-12);
    CHECK(at_truth == Catch::Approx(0.0).margin(1e-12)); // zero residual at truth
}

TEST_CASE("beam posterior vanishes for nonpositive stiffness") {
    BeamPosterior post(1234);
    CHECK(post(std::vector<double>{-0.5, 1.0}) == 0.0);
    CHECK(post(std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK(post(std::vector<double>{1.0, 1.0}) > 0.0);
}

TEST_CASE("beam posterior data is reproducible per seed") {
    BeamPosterior a(77), b(77), c(78);
    CHECK(a.data() == b.data());
    CHECK(a.data() != c.data());
}

TEST_CASE("acoustic far field of a single source at the origin") {
    const std::vector<double> origin{0.0, 0.0};
    const auto u = acoustic_far_field(origin);
    REQUIRE(u.size() == 2 * kAcousticDirections);
    const double expected = 1.0 / std::sqrt(8.0 * 3.14159265358979323846);
    for (std::size_t t = 0; t < kAcousticDirections; ++t) {
        const double mag = std::hypot(u[t], u[kAcousticDirections + t]);
        CHECK(mag == Catch::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("acoustic far field matches an independent complex oracle") {
    const std::vector<double> sources{1.0, 3.0, 2.0, 2.5, 1.5, 3.5};
    const auto u = acoustic_far_field(sources);
    const double pi = 3.14159265358979323846;
    for (std::size_t t = 0; t < kAcousticDirections; t += 17) {
        const double ang = 2.0 * pi * t / kAcousticDirections;
        // direct trigonometric reimplementation
        double re = 0.0, im = 0.0;
        for (int s = 0; s < 3; ++s) {
            const double phase = -(std::cos(ang) * sources[2 * s] + std::sin(ang) * sources[2 * s + 1]);
            re += std::cos(phase);
            im += std::sin(phase);
        }
        const double amp = 1.0 / std::sqrt(8.0 * pi);
        const double c = std::cos(pi / 4.0 + pi), s = std::sin(pi / 4.0 + pi);
        const double ore = amp * (re * c - im * s);
        const double oim = amp * (re * s + im * c);
        CHECK(u[t] == Catch::Approx(ore).margin(1e-12));
        CHECK(u[kAcousticDirections + t] == Catch::Approx(oim).margin(1e-12));
    }
}

TEST_CASE("acoustic far field is invariant under source permutation") {
    const std::vector<double> a{1.0, 3.0, 2.0, 2.5, 1.5, 3.5};
    const std::vector<double> b{2.0, 2.5, 1.5, 3.5, 1.0, 3.0};
    const auto ua = acoustic_far_field(a);
    const auto ub = acoustic_far_field(b);
    for (std::size_t i = 0; i < ua.size(); ++i)
        CHECK(ua[i] == Catch::Approx(ub[i]).margin(1e-13));
}

TEST_CASE("acoustic posterior is maximal at the truth for noiseless data") {
    AcousticPosterior post(99, 0.05);
    // noiseless check: likelihood factor with data = exact truth output
    const auto truth_output = acoustic_far_field(acoustic_truth());
    auto likelihood = [&](std::span<const double> theta) {
        const auto pred = acoustic_far_field(theta);
        double misfit = 0.0;
        for (std::size_t j = 0; j < pred.size(); ++j)
            misfit += (pred[j] - truth_output[j]) * (pred[j] - truth_output[j]);
        return -misfit;
    };
    const double at_truth = likelihood(acoustic_truth());
    CHECK(at_truth == Catch::Approx(0.0).margin(1e-15));
    RngStream rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> theta(6);
        for (auto& v : theta) v = 2.0 + rng.gaussian();
        CHECK(likelihood(theta) <= at_truth);
    }
    CHECK(post(acoustic_truth()) > 0.0);
}
