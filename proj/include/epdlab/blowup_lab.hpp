/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epdlab/epd_solver.hpp"
#include "epdlab/exponents.hpp"
#include "epdlab/test_functions.hpp"

namespace epdlab::lab {

/// Raised when snapshots do not cover the requested window.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by lifespan fits with too few usable points.
class FitRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FunctionalConfig {
    double p_conj = 2.0;  ///< p / (p - 1); the cutoff enters as eta^{2 p_conj}
    std::vector<double> M_grid;
    std::shared_ptr<const testfn::BqCache> bq_cache;
    int log_points_per_unit = 64;  ///< quadrature density in ln t for Y

    static double conjugate(double p) { return p / (p - 1.0); }
    /// Throws std::invalid_argument when p_conj (p - 1) != p or the cache is missing.
    void validate(double p) const;
};

/// Evaluates Z, Y and the nonlinear mass along one solution. The radial
/// integrals are done once per snapshot and interpolated linearly in time.
class FunctionalEvaluator {
public:
    FunctionalEvaluator(const solver::SolutionTrace& trace, const ModelParams& params, FunctionalConfig config);

    /// |S^{n-1}| int_{t/2}^t tau^alpha eta(tau/t)^{2p'} int |u|^p b_q r^{n-1} dr dtau.
    double Z(double t) const;
    /// int_1^M Z(t)/t dt.
    double Y(double M) const;
    /// Z without the b_q weight.
    double nonlinear_mass(double t) const;

    /// Largest t with snapshots covering [t/2, t].
    double coverage_end() const { return times_.empty() ? 0.0 : times_.back(); }
    double coverage_start() const { return times_.empty() ? 0.0 : times_.front(); }

    const FunctionalConfig& config() const { return config_; }
    const ModelParams& params() const { return params_; }

private:
    double window_integral(double t, const std::vector<double>& inner) const;

    ModelParams params_;
    FunctionalConfig config_;
    std::vector<double> times_;
    std::vector<double> weighted_;  // int |u|^p b_q r^{n-1} dr per snapshot
    std::vector<double> mass_;      // int |u|^p r^{n-1} dr per snapshot
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    int points = 0;
};

/// Ordinary least squares. Throws FitRefused with fewer than min_points points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y, int min_points = 2);

/// n + alpha - (n - 1 + mu) p / 2.
double mass_exponent(const ModelParams& params);

struct MassScaling {
    LinearFit fit;        ///< ln mass against ln t
    double target = 0.0;  ///< mass_exponent
};

MassScaling nonlinear_mass_fit(const FunctionalEvaluator& eval, const std::vector<double>& times);

/// Upper end of the window where the functionals are trusted: t_budget on a
/// surviving run, otherwise the last snapshot with sup |u| <= sqrt(threshold).
double resolvable_end(const solver::SolutionTrace& trace, const solver::GridSpec& grid);

/// points values from lo to hi, uniform in ln.
std::vector<double> log_grid(double lo, double hi, int points);

/// Fit of Y(M) against ln M over the given M values.
LinearFit functional_growth_fit(const FunctionalEvaluator& eval, const std::vector<double>& M_values);

// ---------------------------------------------------------------------------
// Extremal lifespan ODE in s = ln t: dY/ds = max(floor, c1 s^{1-p} Y^p).

struct OdeBlowup {
    double s_numeric = 0.0;
    double s_closed = 0.0;
    double gap = 0.0;        ///< |s_numeric - s_closed| / s_closed
    double s_switch = 0.0;   ///< start of the Bernoulli phase
    double Y_switch = 0.0;
    int steps = 0;
};

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double Y_stop = 1e12;
    double s_max = 1e8;
    long max_steps = 5'000'000;
};

/// Closed-form blow-up of dY/ds = c1 s^{1-p} Y^p from Y(s0) = Y0.
/// Returns +infinity when the solution stays finite.
double bernoulli_blowup_s(double p, double c1, double s0, double Y0);

/// Adaptive Dormand-Prince integration of dY/ds = max(floor, c1 s^{1-p} Y^p)
/// from Y(s0) = Y0 until Y exceeds Y_stop; the returned s extrapolates the
/// last two accepted points along the linear profile of Y^{1-p}.
/// Throws std::runtime_error when Y stays below Y_stop up to s_max.
OdeBlowup integrate_extremal(double p, double floor, double c1, double s0, double Y0, const OdeOptions& options = {});

/// Full extremal system with floor c0 eps^p and Y(s_start) = c0 eps^p s_start.
OdeBlowup extremal_ode_lifespan(double p, double eps, double c0, double c1, double s_start,
                                const OdeOptions& options = {});

// ---------------------------------------------------------------------------
// Lifespan sweep.

struct SweepRecord {
    ModelParams params;
    solver::Verdict verdict = solver::Verdict::survived;
    double T_num = 0.0;
    double refine_gap = 0.0;
    double x_fit = 0.0;  ///< eps^{-p(p-1)}
    double y_fit = 0.0;  ///< ln T_num
};

struct SweepResult {
    std::vector<SweepRecord> records;  ///< input order
    std::optional<LinearFit> fit;      ///< over blew_up records only
    std::string fit_error;             ///< reason when fit is empty
    bool monotone = false;             ///< T_num non-increasing in eps over blew_up records
    bool strictly_monotone = false;
};

/// Runs solve() for every eps concurrently and fits ln T_num against eps^{-p(p-1)}.
SweepResult lifespan_sweep(const ModelParams& base, const std::vector<double>& eps_list, const solver::GridSpec& grid,
                           const solver::InitialProfile& profile = solver::InitialProfile::canonical_bump());

}  // namespace epdlab::lab
