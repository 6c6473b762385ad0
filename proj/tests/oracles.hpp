/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace oracle {

// K_nu(z) = int_0^inf exp(-z cosh s) cosh(nu s) ds
inline double bessel_k_integral(double nu, double z) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [=](double s) {
        const double c = std::cosh(s);
        if (!std::isfinite(c)) {
            return 0.0;
        }
        return 0.5 * (std::exp(nu * s - z * c) + std::exp(-nu * s - z * c));
    };
    return integrator.integrate(f, 1e-15);
}

// The canonical bump exp(1 - 1/(1 - r^2)) and its derivative, even in r.
inline double bump(double r) {
    r = std::abs(r);
    return r >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - r * r));
}

inline double bump_prime(double r) {
    const double s = r < 0.0 ? -1.0 : 1.0;
    const double x = std::abs(r);
    if (x >= 1.0) {
        return 0.0;
    }
    const double d = 1.0 - x * x;
    return s * bump(x) * (-2.0 * x / (d * d));
}

// int_0^|x| s f(s) ds
inline double bump_moment(double x) {
    const double a = std::min(std::abs(x), 1.0);
    if (a == 0.0) {
        return 0.0;
    }
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double s) { return s * bump(s); }, 0.0, a, 15, 1e-14);
}

// n = 3 undamped wave with u(0) = f, u_t(0) = 0: (r u) solves the 1-D wave equation.
inline double wave3_mu0(double t, double r) {
    if (r == 0.0) {
        return bump(t) + t * bump_prime(t);
    }
    return ((r + t) * bump(r + t) + (r - t) * bump(r - t)) / (2.0 * r);
}

// n = 3, mu = 2: t u solves the undamped problem with data (0, f).
inline double wave3_mu2(double t, double r) {
    if (r == 0.0) {
        return bump(t);
    }
    return (bump_moment(r + t) - bump_moment(r - t)) / (2.0 * t * r);
}

struct Fraction {
    std::int64_t num;
    std::int64_t den;

    Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { reduce(); }

    void reduce() {
        const std::int64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
        if (den < 0) {
            num = -num;
            den = -den;
        }
    }
    friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Fraction operator-(Fraction a, Fraction b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
    friend Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }
    friend bool operator==(Fraction a, Fraction b) { return a.num == b.num && a.den == b.den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// gamma(n, mu, alpha, p) in exact arithmetic.
inline Fraction gamma_exact(Fraction n, Fraction mu, Fraction alpha, Fraction p) {
    return Fraction(2) + (n + mu + Fraction(1) + Fraction(2) * alpha) * p - (n + mu - Fraction(1)) * p * p;
}

}  // namespace oracle
