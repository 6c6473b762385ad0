/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "epdlab/blowup_lab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "epdlab/quadrature.hpp"
#include "epdlab/special_functions.hpp"

namespace epdlab::lab {

void FunctionalConfig::validate(double p) const {
    if (!(p > 1.0)) {
        throw std::invalid_argument("functional: p must exceed 1");
    }
    if (std::abs(p_conj * (p - 1.0) - p) > 1e-12 * p) {
        throw std::invalid_argument("functional: p_conj (p - 1) must equal p");
    }
    if (!bq_cache) {
        throw std::invalid_argument("functional: b_q cache is missing");
    }
    if (log_points_per_unit < 2) {
        throw std::invalid_argument("functional: log_points_per_unit must be >= 2");
    }
}

FunctionalEvaluator::FunctionalEvaluator(const solver::SolutionTrace& trace, const ModelParams& params,
                                         FunctionalConfig config)
    : params_(params), config_(std::move(config)) {
    config_.validate(params.p);
    const testfn::BqCache& bq = *config_.bq_cache;
    const double tau_floor = bq.spec().tau_min * (1.0 - 1e-12);
    const double dr = trace.dr;
    for (const auto& snap : trace.snapshots) {
        if (snap.t < tau_floor) {
            continue;
        }
        if (!times_.empty() && snap.t <= times_.back()) {
            continue;
        }
        double weighted = 0.0;
        double mass = 0.0;
        const std::size_t count = snap.values.size();
        for (std::size_t i = 0; i < count; ++i) {
            const double r = static_cast<double>(i) * dr;
            const double up = std::pow(std::abs(snap.values[i]), params.p);
            if (up == 0.0) {
                continue;
            }
            const double w = (i == 0 || i + 1 == count) ? 0.5 : 1.0;
            const double radial = w * up * std::pow(r, params.n - 1);
            mass += radial;
            weighted += radial * bq(snap.t, r);
        }
        times_.push_back(snap.t);
        weighted_.push_back(weighted * dr);
        mass_.push_back(mass * dr);
    }
}

double FunctionalEvaluator::window_integral(double t, const std::vector<double>& inner) const {
    if (times_.size() < 2) {
        throw CoverageError("functional: fewer than two usable snapshots");
    }
    const double slack = 1e-9 * std::max(1.0, t);
    const double lo = 0.5 * t;
    if (lo < times_.front() - slack || t > times_.back() + slack) {
        throw CoverageError("functional: snapshots cover [" + std::to_string(times_.front()) + ", " +
                            std::to_string(times_.back()) + "], need [" + std::to_string(lo) + ", " +
                            std::to_string(t) + "]");
    }
    auto interp = [&](double tau) {
        tau = std::clamp(tau, times_.front(), times_.back());
        auto it = std::upper_bound(times_.begin(), times_.end(), tau);
        std::size_t j = it == times_.end() ? times_.size() - 1 : static_cast<std::size_t>(it - times_.begin());
        j = std::max<std::size_t>(j, 1);
        const double f = (tau - times_[j - 1]) / (times_[j] - times_[j - 1]);
        return (1.0 - f) * inner[j - 1] + f * inner[j];
    };
    const double k = 2.0 * config_.p_conj;
    auto integrand = [&](double tau, double inner_value) {
        const double weight = params_.alpha == 0.0 ? 1.0 : std::pow(tau, params_.alpha);
        return weight * testfn::cutoff_power(tau, t, k).value * inner_value;
    };

    std::vector<double> taus{lo};
    std::vector<double> vals{integrand(lo, interp(lo))};
    auto first = std::upper_bound(times_.begin(), times_.end(), lo + slack);
    for (auto it = first; it != times_.end() && *it < t - slack; ++it) {
        const auto j = static_cast<std::size_t>(it - times_.begin());
        taus.push_back(*it);
        vals.push_back(integrand(*it, inner[j]));
    }
    taus.push_back(t);
    vals.push_back(integrand(t, interp(t)));
    return special::sphere_area(params_.n - 1) * quad::trapezoid(taus, vals);
}

double FunctionalEvaluator::Z(double t) const {
    return window_integral(t, weighted_);
}

double FunctionalEvaluator::nonlinear_mass(double t) const {
    return window_integral(t, mass_);
}

double FunctionalEvaluator::Y(double M) const {
    if (!(M >= 1.0)) {
        throw std::invalid_argument("functional: Y needs M >= 1");
    }
    if (M == 1.0) {
        return 0.0;
    }
    const double length = std::log(M);
    const int intervals = std::max(8, static_cast<int>(std::ceil(length * config_.log_points_per_unit)));
    std::vector<double> s(intervals + 1);
    std::vector<double> z(intervals + 1);
    for (int k = 0; k <= intervals; ++k) {
        s[k] = length * k / intervals;
        z[k] = Z(k == intervals ? M : std::exp(s[k]));
    }
    return quad::trapezoid(s, z);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y, int min_points) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_line: size mismatch");
    }
    const int n = static_cast<int>(x.size());
    if (n < std::max(2, min_points)) {
        throw FitRefused("fit needs at least " + std::to_string(std::max(2, min_points)) + " points, got " +
                         std::to_string(n));
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw FitRefused("fit needs at least two distinct abscissae");
    }
    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_stderr = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return fit;
}

double mass_exponent(const ModelParams& params) {
    return params.n + params.alpha - (params.n - 1.0 + params.mu) * params.p / 2.0;
}

MassScaling nonlinear_mass_fit(const FunctionalEvaluator& eval, const std::vector<double>& times) {
    std::vector<double> x;
    std::vector<double> y;
    for (double t : times) {
        const double m = eval.nonlinear_mass(t);
        if (m > 0.0) {
            x.push_back(std::log(t));
            y.push_back(std::log(m));
        }
    }
    MassScaling out;
    out.fit = fit_line(x, y, 3);
    out.target = mass_exponent(eval.params());
    return out;
}

double resolvable_end(const solver::SolutionTrace& trace, const solver::GridSpec& grid) {
    if (trace.verdict == solver::Verdict::survived) {
        return std::min(trace.T_num, grid.t_budget);
    }
    const double soft = std::sqrt(grid.blowup_threshold);
    double end = 0.0;
    for (const auto& s : trace.snapshots) {
        double sup = 0.0;
        for (double v : s.values) {
            sup = std::max(sup, std::abs(v));
        }
        if (sup > soft || !std::isfinite(sup)) {
            break;
        }
        end = s.t;
    }
    return end;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> v(points);
    for (int k = 0; k < points; ++k) {
        v[k] = points == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    }
    return v;
}

LinearFit functional_growth_fit(const FunctionalEvaluator& eval, const std::vector<double>& M_values) {
    std::vector<double> x;
    std::vector<double> y;
    for (double M : M_values) {
        x.push_back(std::log(M));
        y.push_back(eval.Y(M));
    }
    return fit_line(x, y, 3);
}

// ---------------------------------------------------------------------------

double bernoulli_blowup_s(double p, double c1, double s0, double Y0) {
    if (!(p > 1.0) || !(c1 > 0.0) || !(s0 > 0.0) || !(Y0 > 0.0)) {
        throw std::invalid_argument("bernoulli_blowup_s: need p > 1 and positive c1, s0, Y0");
    }
    if (p == 2.0) {
        return s0 * std::exp(1.0 / (c1 * Y0));
    }
    const double base = std::pow(s0, 2.0 - p) + (2.0 - p) * std::pow(Y0, 1.0 - p) / (c1 * (p - 1.0));
    if (!(base > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::pow(base, 1.0 / (2.0 - p));
}

OdeBlowup integrate_extremal(double p, double floor, double c1, double s0, double Y0, const OdeOptions& options) {
    if (!(p > 1.0) || !(c1 > 0.0) || !(s0 > 0.0) || !(Y0 > 0.0) || floor < 0.0) {
        throw std::invalid_argument("integrate_extremal: need p > 1, c1, s0, Y0 > 0 and floor >= 0");
    }
    auto rhs = [&](double s, double y) { return std::max(floor, c1 * std::pow(s, 1.0 - p) * std::pow(y, p)); };

    // Dormand-Prince 5(4).
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double s = s0;
    double y = Y0;
    double h = 1e-3 * s0;
    double s_prev = s;
    double y_prev = y;
    double k1 = rhs(s, y);
    OdeBlowup out;
    long steps = 0;
    while (y <= options.Y_stop) {
        if (s > options.s_max || steps > options.max_steps) {
            throw std::runtime_error("extremal ODE: no blow-up before s = " + std::to_string(s));
        }
        const double k2 = rhs(s + c2 * h, y + h * a21 * k1);
        const double k3 = rhs(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = rhs(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = rhs(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = rhs(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = rhs(s + h, y_new);
        const double err_abs = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double scale = options.abs_tol + options.rel_tol * std::max(std::abs(y), std::abs(y_new));
        const double err = std::isfinite(y_new) ? err_abs / scale : std::numeric_limits<double>::infinity();
        ++steps;
        if (err <= 1.0) {
            s_prev = s;
            y_prev = y;
            s += h;
            y = y_new;
            k1 = k7;
            const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            h *= grow;
        } else {
            h *= std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
        }
    }
    // Y^{1-p} is locally linear in s near the blow-up.
    const double z1 = std::pow(y_prev, 1.0 - p);
    const double z2 = std::pow(y, 1.0 - p);
    out.s_numeric = s + z2 * (s - s_prev) / (z1 - z2);
    out.steps = static_cast<int>(steps);
    out.s_switch = s0;
    out.Y_switch = Y0;
    out.s_closed = bernoulli_blowup_s(p, c1, s0, Y0);
    out.gap = std::abs(out.s_numeric - out.s_closed) / out.s_closed;
    return out;
}

OdeBlowup extremal_ode_lifespan(double p, double eps, double c0, double c1, double s_start, const OdeOptions& options) {
    if (!(eps > 0.0) || !(c0 > 0.0) || !(s_start > 0.0)) {
        throw std::invalid_argument("extremal_ode_lifespan: need eps, c0, s_start > 0");
    }
    const double floor = c0 * std::pow(eps, p);
    OdeBlowup out = integrate_extremal(p, floor, c1, s_start, floor * s_start, options);
    // Below the switch point the floor dominates and Y = floor * s exactly.
    const double s_switch = std::max(s_start, 1.0 / (c1 * std::pow(floor, p - 1.0)));
    out.s_switch = s_switch;
    out.Y_switch = floor * s_switch;
    out.s_closed = bernoulli_blowup_s(p, c1, s_switch, out.Y_switch);
    out.gap = std::abs(out.s_numeric - out.s_closed) / out.s_closed;
    return out;
}

// ---------------------------------------------------------------------------

SweepResult lifespan_sweep(const ModelParams& base, const std::vector<double>& eps_list, const solver::GridSpec& grid,
                           const solver::InitialProfile& profile) {
    base.validate();
    grid.validate();
    std::vector<std::future<SweepRecord>> jobs;
    jobs.reserve(eps_list.size());
    for (double eps : eps_list) {
        ModelParams params = base;
        params.epsilon = eps;
        params.validate();
        jobs.push_back(std::async(std::launch::async, [params, grid, profile] {
            solver::SolveOptions options;
            options.sample_every = 1000;
            const solver::SolutionTrace trace = solver::solve(profile, params, grid, options);
            SweepRecord rec;
            rec.params = params;
            rec.verdict = trace.verdict;
            rec.T_num = trace.T_num;
            rec.refine_gap = trace.refine_gap;
            rec.x_fit = std::pow(params.epsilon, -params.p * (params.p - 1.0));
            rec.y_fit = std::log(trace.T_num);
            return rec;
        }));
    }
    SweepResult result;
    for (auto& job : jobs) {
        result.records.push_back(job.get());
    }

    std::vector<const SweepRecord*> done;
    for (const auto& rec : result.records) {
        if (rec.verdict == solver::Verdict::blew_up) {
            done.push_back(&rec);
        }
    }
    std::sort(done.begin(), done.end(),
              [](const SweepRecord* a, const SweepRecord* b) { return a->params.epsilon < b->params.epsilon; });
    result.monotone = true;
    result.strictly_monotone = true;
    for (std::size_t i = 1; i < done.size(); ++i) {
        if (done[i]->T_num > done[i - 1]->T_num) {
            result.monotone = false;
        }
        if (!(done[i]->T_num < done[i - 1]->T_num)) {
            result.strictly_monotone = false;
        }
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto* rec : done) {
        x.push_back(rec->x_fit);
        y.push_back(rec->y_fit);
    }
    try {
        result.fit = fit_line(x, y, 3);
    } catch (const FitRefused& e) {
        result.fit_error = std::string(e.what()) + " (" + std::to_string(result.records.size() - done.size()) +
                           " of " + std::to_string(result.records.size()) + " runs did not blow up)";
    }
    return result;
}

}  // namespace epdlab::lab
