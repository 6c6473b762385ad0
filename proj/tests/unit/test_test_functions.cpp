/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <stdexcept>

#include "epdlab/exponents.hpp"
#include "epdlab/test_functions.hpp"

using namespace epdlab;
using namespace epdlab::testfn;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// b_q for n = 3 from the closed-form sphere integral 4 pi sinh(r)/r and boost K.
double b_q_n3_oracle(double t, double r, double mu, double q) {
    auto f = [=](double lam) {
        if (lam < 1e-100) {
            return 0.0;
        }
        const double s = lam * t;
        const double h = std::pow(s, 0.5 * (mu + 1.0)) * boost::math::cyl_bessel_k(0.5 * (mu - 1.0), s);
        const double x = lam * r;
        const double ph = x == 0.0 ? 4.0 * M_PI : 4.0 * M_PI * std::sinh(x) / x;
        return h * ph * std::pow(lam, q - 1.0);
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, 0.0, 1.0, 1e-13);
}

double log_slope(double t0, double t1, double r, const TestFunctionParams& tp) {
    return std::log(b_q_eval(t1, r, tp).value / b_q_eval(t0, r, tp).value) / std::log(t1 / t0);
}

}  // namespace

TEST_SUITE("test_functions") {

TEST_CASE("cutoff profile") {
    CHECK(eta(0.2).value == 1.0);
    CHECK(eta(0.5).value == 1.0);
    CHECK(eta(1.0).value == 0.0);
    CHECK(eta(1.3).value == 0.0);
    CHECK(eta(0.75).value == doctest::Approx(0.5).epsilon(1e-10));
    double prev = 1.0;
    for (int i = 1; i < 100; ++i) {
        const double s = 0.5 + 0.5 * i / 100.0;
        const auto j = eta(s);
        CHECK(j.value <= prev);
        CHECK(j.d1 <= 0.0);
        prev = j.value;
        const double d = 1e-6;
        CHECK(j.d1 == doctest::Approx((eta(s + d).value - eta(s - d).value) / (2 * d)).epsilon(1e-5));
    }
    const auto c = cutoff_power(0.7 * 10.0, 10.0, 4.0);
    CHECK(c.value == doctest::Approx(std::pow(eta(0.7).value, 4.0)).epsilon(1e-14));
}

TEST_CASE("sphere integral closed forms") {
    for (double r : {0.3, 2.0, 9.0}) {
        const double three = r == 0.0 ? 4.0 * M_PI : 4.0 * M_PI * std::sinh(r) / r;
        CHECK(rel(phi(r, 3), three) < 1e-12);
        CHECK(rel(phi(r, 2), 2.0 * M_PI * boost::math::cyl_bessel_i(0, r)) < 1e-12);
        CHECK(rel(phi(r, 4), 4.0 * M_PI * M_PI * boost::math::cyl_bessel_i(1, r) / r) < 1e-12);
        CHECK(rel(phi_scaled(r, 3), std::exp(-r) * three) < 1e-12);
    }
    CHECK(rel(phi(0.0, 3), 4.0 * M_PI) < 1e-14);
    CHECK_THROWS_AS(phi(1.0, 1), std::domain_error);
    CHECK(std::isfinite(phi_scaled(5000.0, 3)));
    CHECK(phi_scaled_checked(4.0, 5).error < 1e-12);
}

TEST_CASE("b_q against direct quadrature") {
    for (double mu : {1.0, 1.5, 2.5}) {
        const auto tp = TestFunctionParams::critical(3, mu, 0);
        for (auto [t, r] : {std::pair{2.0, 1.0}, std::pair{0.5, 0.0}, std::pair{7.0, 5.0}}) {
            CAPTURE(mu);
            CAPTURE(t);
            CAPTURE(r);
            CHECK(rel(b_q_eval(t, r, tp).value, b_q_n3_oracle(t, r, mu, tp.q)) < 1e-8);
        }
    }
}

TEST_CASE("time derivative against finite differences") {
    const auto tp = TestFunctionParams::critical(3, 1.5, 0);
    for (auto [t, r] : {std::pair{2.0, 1.0}, std::pair{20.0, 15.0}}) {
        const double d = 1e-3;
        const double fd = (b_q_eval(t + d, r, tp).value - b_q_eval(t - d, r, tp).value) / (2 * d);
        CHECK(rel(b_q_dt(t, r, tp).value, fd) < 1e-5);
    }
}

TEST_CASE("PDE residual") {
    for (double mu : {1.0, 1.5, 2.5}) {
        const auto tp = TestFunctionParams::critical(3, mu, 0);
        for (double t : {0.5, 2.0, 10.0}) {
            for (double f : {0.0, 0.5, 1.0}) {
                const auto res = b_q_pde_residual(t, f * (t + 1.0), tp);
                CHECK(std::abs(res.residual) < 1e-6);
            }
        }
    }
    CHECK_THROWS(b_q_pde_residual(0.01, 0.0, TestFunctionParams::critical(3, 1, 0)));
}

TEST_CASE("power-law decay at the origin") {
    for (double mu : {1.0, 1.5, 2.5}) {
        const auto tp = TestFunctionParams::critical(3, mu, 0);
        CHECK(std::abs(log_slope(1e2, 1e4, 0.0, tp) + tp.q) < 0.02);
    }
}

TEST_CASE("sign of the time derivative follows q") {
    const auto pos = TestFunctionParams::critical(5, 1, 0);
    REQUIRE(pos.q > 0.0);
    for (double t : {2.0, 10.0, 100.0, 1000.0}) {
        CHECK(b_q_dt(t, 0.0, pos).value < 0.0);
    }
    // dt b_q ~ -t^{-q-1}
    const double slope = std::log(b_q_dt(1000.0, 0.0, pos).value / b_q_dt(100.0, 0.0, pos).value) / std::log(10.0);
    CHECK(std::abs(slope + pos.q + 1.0) < 0.02);
    const auto neg = TestFunctionParams::critical(3, 2.5, 0);
    REQUIRE(neg.q < 0.0);
    CHECK(b_q_dt(10.0, 0.0, neg).value > 0.0);
}

TEST_CASE("q closed forms agree at the critical power") {
    for (double mu : {0.5, 1.0, 2.5}) {
        const auto tp = TestFunctionParams::critical(3, mu, 0.5);
        CHECK(tp.q == doctest::Approx(tp.q_right).epsilon(1e-12));
    }
}

TEST_CASE("integrability guard") {
    auto tp = TestFunctionParams::make(3, 1.0, 0.0, 0.4);
    CHECK(tp.endpoint_exponent() <= 0.0);
    CHECK_THROWS_AS(tp.validate(), std::domain_error);
}

TEST_CASE("initial limit equals the C0 integral") {
    for (double mu : {1.0, 1.5}) {
        const auto tp = TestFunctionParams::critical(3, mu, 0);
        const auto lim = initial_limit(0.5, tp, dyadic_times(4, 10));
        CHECK(lim.certified == (mu > 1.0));
        CHECK(rel(lim.extrapolated, lim.c0_integral) < 1e-4);
    }
    CHECK_THROWS_AS(initial_limit(2.0, TestFunctionParams::critical(3, 1, 0), dyadic_times(4, 8)),
                    std::domain_error);
}

TEST_CASE("cache interpolation") {
    const auto tp = TestFunctionParams::critical(3, 1, 0);
    BqCacheSpec spec;
    spec.tau_max = 10.0;
    spec.tau_points = 41;
    spec.rho_points = 33;
    const BqCache cache(tp, spec);
    CHECK(cache.interpolation_error() < 1e-2);
    for (auto [t, r] : {std::pair{1.0, 0.0}, std::pair{3.3, 2.0}, std::pair{9.0, 9.5}}) {
        CHECK(rel(cache(t, r), b_q_eval(t, r, tp).value) < 1e-2);
    }
    // On a node the table is exact.
    CHECK(rel(cache(0.5, 0.0), b_q_eval(0.5, 0.0, tp).value) < 1e-12);
    CHECK_THROWS_AS(BqCache(tp, BqCacheSpec{2.0, 1.0, 10, 10}), std::invalid_argument);
}

}  // TEST_SUITE
