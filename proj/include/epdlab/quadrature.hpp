/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace epdlab::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Returns the n-point rule. Rules are computed once and shared; safe to call
/// from several threads.
const GaussLegendreRule& gauss_legendre(int n);

/// Integrates f over [a, b] with the given rule.
template <class F>
double integrate(F&& f, double a, double b, const GaussLegendreRule& rule) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

/// Raised when a quadrature fails to meet its tolerance; carries the
/// achieved error estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double value)
        : std::runtime_error(what), estimate_(estimate), value_(value) {}
    double estimate() const noexcept { return estimate_; }
    double value() const noexcept { return value_; }

private:
    double estimate_;
    double value_;
};

/// Trapezoidal integral of samples y over abscissae x (same length).
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace epdlab::quad
