/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace epdlab {

/// The (n, mu, alpha, p, epsilon) tuple describing one problem instance.
struct ModelParams {
    int n = 3;
    double mu = 1.0;
    double alpha = 0.0;
    double p = 2.0;
    double epsilon = 1.0;

    /// Checks n >= 1, mu > 0, alpha >= 0, p > 1, epsilon > 0.
    /// Throws std::invalid_argument naming the violated field.
    void validate() const;
};

namespace exponents {

/// gamma(n, mu, alpha, p) = 2 + (n + mu + 1 + 2 alpha) p - (n + mu - 1) p^2.
double gamma_quadratic(double n, double mu, double alpha, double p);

/// Positive root of gamma(n, mu, alpha, .) = 0.
/// Throws std::domain_error when n + mu - 1 <= 0.
double p_strauss(double n, double mu, double alpha);

/// 1 + (2 + alpha) / n.
double p_fujita(double n, double alpha);

/// Largest damping for which the Strauss-type root stays above p_fujita.
double mu_star(double n, double alpha);

/// (n^2 + n + 2) / (n + 2), the alpha = 0 threshold.
double mu_star_unweighted(double n);

struct QPair {
    double left = 0.0;   ///< (n - mu - 1)/2 - 1/p
    double right = 0.0;  ///< n + alpha - (n + mu - 1) p / 2
};

/// Both closed forms of the test-function decay exponent q. They coincide
/// exactly when p is the Strauss-type root.
QPair q_exponent(double n, double mu, double alpha, double p);

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double witness = 0.0;
    std::string detail;
};

struct ExponentReport {
    double p_S = 0.0;
    double p_F = 0.0;
    double mu_star = 0.0;
    double q_left = 0.0;
    double q_right = 0.0;
    double gamma_at_p = 0.0;
    double p = 0.0;
    bool critical = false;
    std::vector<HypothesisCheck> hypotheses;

    bool all_passed() const;
    const HypothesisCheck* find(const std::string& name) const;
};

/// Tolerance on |p - p_S| under which a power counts as critical.
inline constexpr double kCriticalTolerance = 1e-9;

/// Evaluates the blow-up theorem's hypotheses and the local-existence range.
/// Failures are recorded in the report, never thrown.
ExponentReport check_hypotheses(const ModelParams& params);

/// Same as check_hypotheses but with p unset: p defaults to p_S.
ExponentReport report_for(double n, double mu, double alpha, std::optional<double> p);

}  // namespace exponents
}  // namespace epdlab
