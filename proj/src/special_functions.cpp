/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "epdlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace epdlab::special {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kLogMax = 709.0;

// Even-index Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k
// (Abramowitz & Stegun 6.1.34): c_2, c_4, ..., c_16.
constexpr double kRecipGammaEven[] = {
    0.5772156649015329,  -0.0420026350340952, -0.0421977345555443,
    0.0072189432466630,  -0.0002152416741149, -0.0000201348547807,
    0.0000011330272320,  0.0000000061160950,
};

// (1/Gamma(1-x) - 1/Gamma(1+x)) / (2x) for |x| <= 1/2.
double temme_gam1(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        double sum = 0.0;
        for (int k = static_cast<int>(std::size(kRecipGammaEven)) - 1; k >= 0; --k) {
            sum = sum * x2 + kRecipGammaEven[k];
        }
        return -sum;
    }
    return (1.0 / std::tgamma(1.0 - x) - 1.0 / std::tgamma(1.0 + x)) / (2.0 * x);
}

struct KPair {
    double k_mu;   // K_{xmu}
    double k_mu1;  // K_{xmu+1}
};

// Temme's series for |xmu| <= 1/2 and 0 < x < 2 (unscaled values).
KPair temme_series(double xmu, double x, int max_terms) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = xmu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const double gampl = 1.0 / std::tgamma(1.0 + xmu);
    const double gammi = 1.0 / std::tgamma(1.0 - xmu);
    const double gam1 = temme_gam1(xmu);
    const double gam2 = 0.5 * (gammi + gampl);

    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    const double xmu2 = xmu * xmu;
    for (int i = 1; i <= max_terms; ++i) {
        const double di = static_cast<double>(i);
        ff = (di * ff + p + q) / (di * di - xmu2);
        c *= d / di;
        p /= di - xmu;
        q /= di + xmu;
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - di * ff);
        if (std::abs(del) < std::abs(sum) * kEps) {
            return {sum, sum1 * 2.0 / x};
        }
    }
    throw std::runtime_error("bessel_k: Temme series did not converge");
}

// Steed's continued fraction (CF2) for |xmu| <= 1/2 and x >= 2, scaled by e^{x}.
KPair steed_cf2_scaled(double xmu, double x, int max_terms) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double delh = d;
    double h = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - xmu * xmu;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    bool converged = false;
    for (int i = 1; i < max_terms; ++i) {
        const double di = static_cast<double>(i);
        a -= 2.0 * di;
        c = -a * c / (di + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw std::runtime_error("bessel_k: continued fraction did not converge");
    }
    h *= a1;
    const double kmu = std::sqrt(kPi / (2.0 * x)) / s;
    return {kmu, kmu * (xmu + x + 0.5 - h) / x};
}

// Hankel expansion of e^{z} K_nu(z). Returns NaN when the series cannot reach
// rel_tol before its terms start growing.
double hankel_scaled(double nu, double z, const SpecFunConfig& cfg) {
    const double four_nu2 = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= cfg.series_terms_max; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (four_nu2 - odd * odd) / (8.0 * k * z);
        if (term == 0.0) {
            return std::sqrt(kPi / (2.0 * z)) * sum;
        }
        if (std::abs(term) > prev) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        sum += term;
        if (std::abs(term) < 0.1 * cfg.rel_tol * std::abs(sum)) {
            return std::sqrt(kPi / (2.0 * z)) * sum;
        }
        prev = std::abs(term);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// log K_nu(z) for small z from the leading term 1/2 Gamma(nu) (z/2)^{-nu}.
double log_small_argument_magnitude(double nu, double z) {
    return std::lgamma(nu) - std::log(2.0) + nu * std::log(2.0 / z);
}

}  // namespace

void SpecFunConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) {
        throw std::invalid_argument("SpecFunConfig: rel_tol must lie in (0, 1e-6]");
    }
    if (!(asymptotic_switch_z > 0.0)) {
        throw std::invalid_argument("SpecFunConfig: asymptotic_switch_z must be positive");
    }
    if (series_terms_max < 10) {
        throw std::invalid_argument("SpecFunConfig: series_terms_max must be at least 10");
    }
}

double gamma_fn(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("gamma_fn: argument must be positive, got " + std::to_string(x));
    }
    return std::tgamma(x);
}

double sphere_area(double k) {
    const double half = 0.5 * (k + 1.0);
    return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

double bessel_k_argument_floor(double nu) {
    nu = std::abs(nu);
    if (nu == 0.0) {
        return 0.0;
    }
    // Solve lgamma(nu) - ln 2 + nu ln(2/z) = kLogMax for z.
    return 2.0 * std::exp((std::lgamma(nu) - std::log(2.0) - kLogMax) / nu);
}

double bessel_k_scaled(double nu, double z, const SpecFunConfig& cfg) {
    if (!(z > 0.0)) {
        throw std::domain_error("bessel_k: argument must be positive");
    }
    nu = std::abs(nu);
    if (nu > 0.0 && z < 2.0 && log_small_argument_magnitude(nu, z) > kLogMax) {
        throw std::overflow_error("bessel_k: argument below the underflow floor for this order");
    }

    if (z >= cfg.asymptotic_switch_z) {
        const double v = hankel_scaled(nu, z, cfg);
        if (!std::isnan(v)) {
            return v;
        }
    }

    const int nl = static_cast<int>(nu + 0.5);
    const double xmu = nu - nl;
    KPair pair{};
    if (z < 2.0) {
        pair = temme_series(xmu, z, cfg.series_terms_max);
        const double ez = std::exp(z);
        pair.k_mu *= ez;
        pair.k_mu1 *= ez;
    } else {
        pair = steed_cf2_scaled(xmu, z, 10 * cfg.series_terms_max);
    }
    // Forward recurrence K_{m+1} = K_{m-1} + (2m/z) K_m is stable for K.
    double k_lo = pair.k_mu;
    double k_hi = pair.k_mu1;
    for (int i = 1; i <= nl; ++i) {
        const double next = (xmu + i) * (2.0 / z) * k_hi + k_lo;
        k_lo = k_hi;
        k_hi = next;
    }
    return k_lo;
}

double bessel_k(double nu, double z, const SpecFunConfig& cfg) {
    const double scaled = bessel_k_scaled(nu, z, cfg);
    return scaled * std::exp(-z);
}

HEvaluation h_eval_scaled(double t, double mu, const SpecFunConfig& cfg) {
    if (!(t > 0.0) || !(mu > 0.0)) {
        throw std::domain_error("h_eval: requires t > 0 and mu > 0");
    }
    const double k_lo = bessel_k_scaled(0.5 * (mu - 1.0), t, cfg);
    const double k_hi = bessel_k_scaled(0.5 * (mu + 1.0), t, cfg);
    const double tp = std::pow(t, 0.5 * (mu + 1.0));
    HEvaluation out;
    out.t = t;
    out.mu = mu;
    out.value = tp * k_lo;
    out.derivative = mu * (tp / t) * k_lo - tp * k_hi;
    return out;
}

HEvaluation h_eval(double t, double mu, const SpecFunConfig& cfg) {
    HEvaluation out = h_eval_scaled(t, mu, cfg);
    const double decay = std::exp(-t);
    out.value *= decay;
    out.derivative *= decay;
    return out;
}

double g_scaled(double t, double mu, const SpecFunConfig& cfg) {
    if (!(t > 0.0) || !(mu > 0.0)) {
        throw std::domain_error("g_scaled: requires t > 0 and mu > 0");
    }
    const double m = 0.5 * (mu + 1.0);
    return std::pow(t, m) * bessel_k_scaled(m, t, cfg);
}

double h_limit_constant(double mu) {
    if (!(mu > 0.0)) {
        throw std::domain_error("h_limit_constant: mu must be positive");
    }
    return std::pow(2.0, 0.5 * (mu - 1.0)) * gamma_fn(0.5 * (mu + 1.0));
}

HLimitEstimate h_limit_extrapolate(double mu, int k_min, int k_max, const SpecFunConfig& cfg) {
    if (k_max <= k_min + 1) {
        throw std::invalid_argument("h_limit_extrapolate: need at least three levels");
    }
    auto sample = [&](int k) {
        const double t = std::ldexp(1.0, -k);
        const HEvaluation h = h_eval(t, mu, cfg);
        return -h.derivative + mu * h.value / t;
    };
    // Leading correction of t^{m} K_m(t) is O(t^2) once mu > 1.
    double prev_sample = sample(k_min);
    double prev_extrap = std::numeric_limits<double>::quiet_NaN();
    HLimitEstimate est;
    for (int k = k_min + 1; k <= k_max; ++k) {
        const double s = sample(k);
        const double extrap = (4.0 * s - prev_sample) / 3.0;
        if (!std::isnan(prev_extrap)) {
            est.last_change = std::abs(extrap - prev_extrap);
        }
        est.value = extrap;
        prev_extrap = extrap;
        prev_sample = s;
        ++est.levels;
    }
    return est;
}

}  // namespace epdlab::special
