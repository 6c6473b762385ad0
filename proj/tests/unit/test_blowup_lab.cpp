/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <cmath>
#include <memory>

#include "epdlab/blowup_lab.hpp"

using namespace epdlab;
using namespace epdlab::lab;

namespace {

solver::GridSpec grid_for(double t_budget, double dr) {
    solver::GridSpec g;
    g.dr = dr;
    g.t_budget = t_budget;
    g.r_max = solver::GridSpec::containing_radius(t_budget, dr);
    return g;
}

struct Run {
    solver::SolutionTrace trace;
    ModelParams params;
};

Run run_with_snapshots(double eps, double t_budget, double dr, double spacing) {
    Run r;
    r.params.epsilon = eps;
    const auto g = grid_for(t_budget, dr);
    solver::SolveOptions o;
    o.sample_every = 1000;
    o.record_snapshots = true;
    o.snapshot_stride = std::max(1, static_cast<int>(std::lround(spacing / g.dt())));
    r.trace = solver::solve(solver::InitialProfile::canonical_bump(), r.params, g, o);
    return r;
}

std::shared_ptr<const testfn::BqCache> cache_for(double tau_max) {
    testfn::BqCacheSpec spec;
    spec.tau_max = tau_max;
    spec.tau_points = 49;
    spec.rho_points = 33;
    return std::make_shared<const testfn::BqCache>(testfn::TestFunctionParams::critical(3, 1, 0), spec);
}

FunctionalConfig config_for(std::shared_ptr<const testfn::BqCache> cache) {
    FunctionalConfig fc;
    fc.p_conj = FunctionalConfig::conjugate(2.0);
    fc.bq_cache = std::move(cache);
    return fc;
}

}  // namespace

TEST_SUITE("blowup_lab") {

TEST_CASE("functionals on a short run") {
    const auto cache = cache_for(12.0);
    const auto run = run_with_snapshots(1.0, 12.0, 0.01, 0.05);
    const FunctionalEvaluator ev(run.trace, run.params, config_for(cache));

    CHECK(ev.Y(1.0) == 0.0);
    double prev = 0.0;
    for (double M = 1.5; M <= 12.0; M *= 1.3) {
        const double y = ev.Y(M);
        CHECK(y > prev);
        CHECK(ev.Z(M) > 0.0);
        CHECK(ev.nonlinear_mass(M) > 0.0);
        prev = y;
    }

    // dY/d ln M = Z(M)
    for (double M : {3.0, 6.0, 10.0}) {
        const double d = 0.02;
        const double slope = (ev.Y(M * std::exp(d)) - ev.Y(M * std::exp(-d))) / (2.0 * d);
        CHECK(slope == doctest::Approx(ev.Z(M)).epsilon(0.03));
    }
    CHECK_THROWS_AS(ev.Z(40.0), CoverageError);
}

TEST_CASE("Z is stable under snapshot refinement") {
    const auto cache = cache_for(8.0);
    const auto coarse = run_with_snapshots(1.0, 8.0, 0.01, 0.1);
    const auto fine = run_with_snapshots(1.0, 8.0, 0.01, 0.05);
    const FunctionalEvaluator a(coarse.trace, coarse.params, config_for(cache));
    const FunctionalEvaluator b(fine.trace, fine.params, config_for(cache));
    for (double t : {3.0, 5.0, 8.0}) {
        CHECK(a.Z(t) == doctest::Approx(b.Z(t)).epsilon(0.01));
    }
}

TEST_CASE("Z scales like eps^p for small data") {
    const auto cache = cache_for(4.0);
    const auto big = run_with_snapshots(0.2, 4.0, 0.01, 0.05);
    const auto small = run_with_snapshots(0.1, 4.0, 0.01, 0.05);
    const FunctionalEvaluator a(big.trace, big.params, config_for(cache));
    const FunctionalEvaluator b(small.trace, small.params, config_for(cache));
    for (double t : {2.0, 4.0}) {
        CHECK(b.Z(t) / a.Z(t) == doctest::Approx(std::pow(2.0, -2.0)).epsilon(0.15));
    }
}

TEST_CASE("functional configuration is validated") {
    FunctionalConfig fc;
    fc.p_conj = 3.0;
    CHECK_THROWS_AS(fc.validate(2.0), std::invalid_argument);
    fc.p_conj = 2.0;
    CHECK_THROWS_AS(fc.validate(2.0), std::invalid_argument);
}

TEST_CASE("least squares") {
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.points == 4);
    CHECK_THROWS_AS(fit_line({1.0}, {2.0}), FitRefused);
    CHECK_THROWS_AS(fit_line({1, 2}, {1, 2}, 3), FitRefused);
    const auto noisy = fit_line({0, 1, 2, 3}, {0, 1.1, 1.9, 3.2});
    CHECK(noisy.r2 < 1.0);
    CHECK(noisy.slope_stderr > 0.0);
}

TEST_CASE("mass exponent") {
    ModelParams m;
    CHECK(mass_exponent(m) == doctest::Approx(0.0));
    m.mu = 2.0;
    CHECK(mass_exponent(m) == doctest::Approx(-1.0));
}

TEST_CASE("Bernoulli closed form") {
    // p = 2, c1 = 1, Y(1) = 1/2: 1/Y = 2 - ln s, blow-up at s = e^2
    CHECK(bernoulli_blowup_s(2.0, 1.0, 1.0, 0.5) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(std::isinf(bernoulli_blowup_s(3.0, 1.0, 1.0, 1e-3)));
    const auto b = integrate_extremal(2.0, 0.0, 1.0, 1.0, 0.5);
    CHECK(b.s_numeric == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
}

TEST_CASE("extremal ODE against its closed form") {
    for (double p : {1.5, 2.0, 2.5, 3.0}) {
        for (double eps : {0.5, 1.0}) {
            const auto r = extremal_ode_lifespan(p, eps, 1.0, 1.0, 2.0);
            CAPTURE(p);
            CAPTURE(eps);
            CHECK(r.gap < 1e-6);
            CHECK(r.s_switch >= 2.0);
        }
    }
}

TEST_CASE("extremal lifespan scales like eps^{-2} at p = 2") {
    const double ref = extremal_ode_lifespan(2.0, 0.5, 1.0, 1.0, 2.0).s_numeric * 0.25;
    for (double eps : {0.4, 0.3, 0.2}) {
        const double c = extremal_ode_lifespan(2.0, eps, 1.0, 1.0, 2.0).s_numeric * eps * eps;
        CHECK(c == doctest::Approx(ref).epsilon(0.2));
    }
}

TEST_CASE("sweep refuses to fit without blow-up") {
    ModelParams base;
    const auto res = lifespan_sweep(base, {0.3, 0.4}, grid_for(3.0, 0.01));
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].verdict == solver::Verdict::survived);
    CHECK_FALSE(res.fit.has_value());
    CHECK_FALSE(res.fit_error.empty());
}

TEST_CASE("sweep fits blow-up records") {
    ModelParams base;
    const auto res = lifespan_sweep(base, {20.0, 14.0, 10.0}, grid_for(6.0, 0.01));
    for (const auto& r : res.records) {
        REQUIRE(r.verdict == solver::Verdict::blew_up);
        CHECK(r.x_fit == doctest::Approx(std::pow(r.params.epsilon, -2.0)));
        CHECK(r.y_fit == doctest::Approx(std::log(r.T_num)));
    }
    REQUIRE(res.fit.has_value());
    CHECK(res.fit->slope > 0.0);
    CHECK(res.monotone);
}

TEST_CASE("resolvable window") {
    const auto run = run_with_snapshots(1.0, 3.0, 0.01, 0.1);
    CHECK(resolvable_end(run.trace, grid_for(3.0, 0.01)) == doctest::Approx(3.0));
    const auto g = log_grid(1.0, 100.0, 3);
    CHECK(g[1] == doctest::Approx(10.0));
}

}  // TEST_SUITE
