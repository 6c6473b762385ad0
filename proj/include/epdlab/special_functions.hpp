/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

namespace epdlab::special {

/// Accuracy and regime-switch settings shared by the special-function routines.
struct SpecFunConfig {
    double rel_tol = 1e-10;
    int series_terms_max = 500;
    /// Arguments at or above this use the large-z asymptotic expansion when
    /// it reaches rel_tol; otherwise the continued fraction takes over.
    double asymptotic_switch_z = 10.0;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Gamma function on the positive reals. Throws std::domain_error for x <= 0.
double gamma_fn(double x);

/// Surface area of the unit sphere S^{k} embedded in R^{k+1}.
double sphere_area(double k);

/// Modified Bessel function of the second kind K_nu(z) for real nu and z > 0.
///
/// Negative orders are folded by K_{-nu} = K_nu. Small arguments use Temme's
/// series (which stays regular at integer orders), moderate arguments use
/// Steed's continued fraction, and large arguments the Hankel asymptotic
/// expansion truncated at the first term below rel_tol.
///
/// Throws std::domain_error for z <= 0 and std::overflow_error when z lies
/// below the floor where (z/2)^{-nu} leaves the double range.
double bessel_k(double nu, double z, const SpecFunConfig& cfg = {});

/// Exponentially scaled e^{z} K_nu(z); finite for arbitrarily large z.
double bessel_k_scaled(double nu, double z, const SpecFunConfig& cfg = {});

/// Smallest z > 0 for which K_nu(z) is representable (the underflow floor of
/// the argument). Returns 0 for nu == 0.
double bessel_k_argument_floor(double nu);

/// h(t) = t^{(mu+1)/2} K_{(mu-1)/2}(t) and its derivative.
struct HEvaluation {
    double t = 0.0;
    double mu = 0.0;
    double value = 0.0;
    double derivative = 0.0;
};

/// Evaluates h and h'. The derivative uses the closed recurrence form
/// h' = mu t^{(mu-1)/2} K_{(mu-1)/2}(t) - t^{(mu+1)/2} K_{(mu+1)/2}(t).
HEvaluation h_eval(double t, double mu, const SpecFunConfig& cfg = {});

/// Same as h_eval with value and derivative multiplied by e^{t}.
HEvaluation h_eval_scaled(double t, double mu, const SpecFunConfig& cfg = {});

/// g(t) = t^{(mu+1)/2} K_{(mu+1)/2}(t) scaled by e^{t}. Equals
/// -h'(t) + mu h(t)/t and tends to h_limit_constant(mu) as t -> 0.
double g_scaled(double t, double mu, const SpecFunConfig& cfg = {});

/// C_0 = 2^{(mu-1)/2} Gamma((mu+1)/2), the t -> 0 limit of -h' + mu h / t.
double h_limit_constant(double mu);

struct HLimitEstimate {
    double value = 0.0;       ///< Richardson-extrapolated limit
    double last_change = 0.0; ///< |difference| of the last two extrapolants
    int levels = 0;
};

/// Extrapolates -h'(t) + mu h(t)/t along t = 2^{-k}, k = k_min..k_max.
HLimitEstimate h_limit_extrapolate(double mu, int k_min = 4, int k_max = 14,
                                   const SpecFunConfig& cfg = {});

}  // namespace epdlab::special
