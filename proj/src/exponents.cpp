/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "epdlab/exponents.hpp"

#include <cmath>
#include <stdexcept>

namespace epdlab {

void ModelParams::validate() const {
    if (n < 1) {
        throw std::invalid_argument("model.n must be >= 1");
    }
    if (!(mu > 0.0)) {
        throw std::invalid_argument("model.mu must be > 0");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("model.alpha must be >= 0");
    }
    if (!(p > 1.0)) {
        throw std::invalid_argument("model.p must be > 1");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("model.eps must be > 0");
    }
}

namespace exponents {

double gamma_quadratic(double n, double mu, double alpha, double p) {
    return 2.0 + (n + mu + 1.0 + 2.0 * alpha) * p - (n + mu - 1.0) * p * p;
}

double p_strauss(double n, double mu, double alpha) {
    const double a = n + mu - 1.0;
    if (!(a > 0.0)) {
        throw std::domain_error("p_strauss: n + mu - 1 must be positive");
    }
    // a p^2 - b p - 2 = 0 with b > 0: the "+" root has no cancellation and the
    // companion root is -2 / (a * root).
    const double b = n + mu + 1.0 + 2.0 * alpha;
    const double qq = 0.5 * (b + std::sqrt(b * b + 8.0 * a));
    return qq / a;
}

double p_fujita(double n, double alpha) { return 1.0 + (2.0 + alpha) / n; }

double mu_star(double n, double alpha) {
    const double s = n + 2.0 + alpha;
    return (2.0 * n * n + s * (n * alpha + 2.0 + alpha)) / (s * (2.0 + alpha));
}

double mu_star_unweighted(double n) { return (n * n + n + 2.0) / (n + 2.0); }

QPair q_exponent(double n, double mu, double alpha, double p) {
    return {0.5 * (n - mu - 1.0) - 1.0 / p, n + alpha - 0.5 * (n + mu - 1.0) * p};
}

bool ExponentReport::all_passed() const {
    for (const auto& h : hypotheses) {
        if (!h.passed) {
            return false;
        }
    }
    return true;
}

const HypothesisCheck* ExponentReport::find(const std::string& name) const {
    for (const auto& h : hypotheses) {
        if (h.name == name) {
            return &h;
        }
    }
    return nullptr;
}

ExponentReport check_hypotheses(const ModelParams& params) {
    const double n = params.n;
    ExponentReport r;
    r.p = params.p;
    r.p_F = p_fujita(n, params.alpha);
    r.mu_star = mu_star(n, params.alpha);
    r.p_S = p_strauss(n, params.mu, params.alpha);
    const QPair q = q_exponent(n, params.mu, params.alpha, params.p);
    r.q_left = q.left;
    r.q_right = q.right;
    r.gamma_at_p = gamma_quadratic(n, params.mu, params.alpha, params.p);

    {
        HypothesisCheck h{"dimension_alpha", false, params.alpha, ""};
        if (params.n >= 3) {
            h.passed = params.alpha >= 0.0;
            h.detail = "n >= 3 requires alpha >= 0";
        } else if (params.n == 2) {
            h.passed = params.alpha > 0.0;
            h.detail = "n = 2 requires alpha > 0";
        } else {
            h.detail = "n = 1 is outside the theorem";
        }
        r.hypotheses.push_back(h);
    }
    r.hypotheses.push_back({"mu_range", params.mu > 0.0 && params.mu <= r.mu_star, r.mu_star - params.mu,
                            "0 < mu <= mu_star(n, alpha)"});
    const double dist = std::abs(params.p - r.p_S);
    r.critical = dist <= kCriticalTolerance;
    r.hypotheses.push_back({"critical_power", r.critical, dist, "|p - p_S| <= 1e-9"});
    {
        HypothesisCheck h{"local_existence", false, 0.0, ""};
        if (params.n >= 3) {
            const double cap = n / (n - 2.0);
            h.witness = cap - params.p;
            h.passed = params.p > 1.0 && params.p <= cap;
            h.detail = "1 < p <= n/(n-2)";
        } else if (params.n == 2) {
            h.witness = params.p - 1.0;
            h.passed = params.p > 1.0;
            h.detail = "n = 2 allows any p > 1";
        } else {
            h.detail = "n = 1 is outside the theorem";
        }
        r.hypotheses.push_back(h);
    }
    return r;
}

ExponentReport report_for(double n, double mu, double alpha, std::optional<double> p) {
    ModelParams m;
    m.n = static_cast<int>(std::lround(n));
    m.mu = mu;
    m.alpha = alpha;
    m.p = p ? *p : p_strauss(n, mu, alpha);
    return check_hypotheses(m);
}

}  // namespace exponents
}  // namespace epdlab
