/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "epdlab/exponents.hpp"
#include "oracles.hpp"

using namespace epdlab;
using namespace epdlab::exponents;

TEST_SUITE("exponents") {

TEST_CASE("strauss root annihilates gamma on random triples") {
    std::mt19937_64 rng(20260101);
    std::uniform_int_distribution<int> n_dist(1, 8);
    std::uniform_real_distribution<double> mu_dist(0.01, 10.0);
    std::uniform_real_distribution<double> alpha_dist(0.0, 4.0);
    for (int k = 0; k < 1000; ++k) {
        const double n = n_dist(rng);
        const double mu = mu_dist(rng);
        const double alpha = alpha_dist(rng);
        if (n + mu - 1.0 <= 0.0) {
            continue;
        }
        const double pS = p_strauss(n, mu, alpha);
        CHECK(pS > 1.0);
        const double scale = 2.0 + (n + mu + 1.0 + 2.0 * alpha) * pS;
        CHECK(std::abs(gamma_quadratic(n, mu, alpha, pS)) / scale < 1e-13);
        const auto q = q_exponent(n, mu, alpha, pS);
        CHECK(q.left == doctest::Approx(q.right).epsilon(1e-10));
    }
}

TEST_CASE("damping threshold separates the two regimes") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> n_dist(1, 8);
    std::uniform_real_distribution<double> mu_dist(0.01, 10.0);
    std::uniform_real_distribution<double> alpha_dist(0.0, 4.0);
    for (int k = 0; k < 1000; ++k) {
        const double n = n_dist(rng);
        const double mu = mu_dist(rng);
        const double alpha = alpha_dist(rng);
        if (n + mu - 1.0 <= 0.0) {
            continue;
        }
        const double ms = mu_star(n, alpha);
        if (std::abs(mu - ms) < 1e-9) {
            continue;
        }
        CHECK((mu <= ms) == (p_strauss(n, mu, alpha) >= p_fujita(n, alpha)));
    }
}

TEST_CASE("rational values") {
    using oracle::Fraction;
    CHECK(oracle::gamma_exact(3, 1, 0, 2) == Fraction(0));
    CHECK(p_strauss(3, 1, 0) == 2.0);
    CHECK(p_strauss(4, 0, 0) == 2.0);
    // mu*(3, 0) = 14/5 and the Strauss-type root there is p_F = 5/3
    CHECK(oracle::gamma_exact(3, Fraction(14, 5), 0, Fraction(5, 3)) == Fraction(0));
    CHECK(mu_star(3, 0) == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(mu_star_unweighted(3) == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(p_fujita(3, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("unweighted threshold matches the closed form") {
    for (int n = 1; n <= 8; ++n) {
        CHECK(mu_star(n, 0.0) == doctest::Approx(mu_star_unweighted(n)).epsilon(1e-12));
    }
}

TEST_CASE("gamma is positive between the roots") {
    const double pS = p_strauss(3, 1.5, 0.5);
    CHECK(gamma_quadratic(3, 1.5, 0.5, 0.5 * (1.0 + pS)) > 0.0);
    CHECK(gamma_quadratic(3, 1.5, 0.5, pS + 0.1) < 0.0);
}

TEST_CASE("degenerate leading coefficient") {
    CHECK_THROWS_AS(p_strauss(1, 0, 0), std::domain_error);
}

TEST_CASE("hypothesis report") {
    ModelParams m;
    const auto rep = check_hypotheses(m);
    CHECK(rep.critical);
    CHECK(rep.p_S == doctest::Approx(2.0));
    CHECK(rep.q_left == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rep.all_passed());

    m.p = 3.0;
    const auto off = check_hypotheses(m);
    CHECK_FALSE(off.critical);

    m.p = 0.5;
    CHECK_NOTHROW(check_hypotheses(m));
}

TEST_CASE("parameter validation names the field") {
    ModelParams m;
    m.mu = -1.0;
    try {
        m.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mu") != std::string::npos);
    }
    m = ModelParams{};
    m.p = 1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = ModelParams{};
    m.epsilon = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

}  // TEST_SUITE
