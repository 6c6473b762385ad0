/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "epdlab/exponents.hpp"

namespace epdlab::solver {

/// Uniform radial grid and time-marching limits.
struct GridSpec {
    double r_max = 52.0;
    double dr = 1.0 / 200.0;
    double cfl = 0.5;
    double t_budget = 50.0;
    double blowup_threshold = 1e6;

    double dt() const { return cfl * dr; }
    int nodes() const;

    /// Throws std::invalid_argument naming the violated invariant
    /// (containment r_max >= t_budget + 1 + 2 dr, 0 < cfl <= 0.9, ...).
    void validate() const;

    /// Smallest r_max satisfying containment for the given budget and spacing.
    static double containing_radius(double t_budget, double dr);
};

/// Radial data shape; the amplitude comes from ModelParams::epsilon.
struct InitialProfile {
    std::function<double(double)> shape;

    /// exp(-1/(1 - r^2)) on r < 1 normalised to sup = 1.
    static InitialProfile canonical_bump();
    static InitialProfile zero();

    /// Throws std::invalid_argument if the shape is negative or nonzero
    /// on r >= 1 at any sampled node.
    void validate(const GridSpec& grid) const;
};

/// Two consecutive time levels of the radial solution.
struct RadialField {
    double t = 0.0;
    double dt = 0.0;
    std::vector<double> values;       ///< u(t, r_i)
    std::vector<double> prev_values;  ///< u(t - dt, r_i)
};

enum class Verdict { blew_up, survived, unstable };

std::string to_string(Verdict v);

struct Snapshot {
    double t = 0.0;
    std::vector<double> values;  ///< truncated past the light cone; missing entries are zero
};

struct SolutionTrace {
    std::vector<double> times;
    std::vector<double> sup_norm;
    std::vector<double> energy;          ///< staggered discrete energy between the last two levels
    std::vector<double> dissipation;     ///< cumulative int int (mu/s) u_s^2
    std::vector<double> source_work;     ///< cumulative int int s^alpha |u|^p |u_s|
    std::vector<double> support_radius;  ///< largest r with |u| > 1e-10 sup|u|
    Verdict verdict = Verdict::survived;
    double T_num = 0.0;        ///< blow-up time (blew_up) or t_budget (survived)
    double refine_gap = 0.0;   ///< relative change of T_num in the last dt halving
    int refinements = 0;
    double dr = 0.0;
    double dt = 0.0;
    std::vector<Snapshot> snapshots;

    double max_containment_excess() const;  ///< max over samples of support_radius - (t + 1)
};

struct SolveOptions {
    bool nonlinear = true;
    int sample_every = 1;         ///< trace sampling stride in steps
    bool record_snapshots = false;
    int snapshot_stride = 1;
    std::vector<double> snapshot_times;  ///< extra snapshots at these times (nearest step)
    bool refine = true;           ///< dt-halving refinement of T_num on blow-up
    int max_refinements = 6;
    double refine_tolerance = 0.01;
    double support_tolerance = 1e-10;
};

/// Taylor start from t = 0: u(dt) = eps u0 + dt^2/2 a with
/// a = (Laplacian(eps u0) + [alpha = 0] |eps u0|^p) / (1 + mu).
RadialField first_step(const InitialProfile& profile, const ModelParams& params, const GridSpec& grid,
                       bool nonlinear = true);

/// One central-difference step; the (mu/t) u_t term is averaged over the two
/// outer levels and solved for algebraically. Requires field.t > 0.
RadialField step(const RadialField& field, const ModelParams& params, const GridSpec& grid,
                 bool nonlinear = true);

/// Marches to t_budget or blow-up and records the trace.
SolutionTrace solve(const InitialProfile& profile, const ModelParams& params, const GridSpec& grid,
                    const SolveOptions& options = {});

struct EnergyReport {
    double total = 0.0;
    double on_cone = 0.0;  ///< restricted to r <= cone_radius
};

/// Discrete energy of the field, |S^{n-1}| times
/// 1/2 sum W_i ((u - u_prev)/dt)^2 + 1/2 sum A_{i+1/2} (Du)(Du_prev)/dr.
EnergyReport energy(const RadialField& field, const ModelParams& params, const GridSpec& grid,
                    double cone_radius = 1e300);

struct PicardResult {
    SolutionTrace trace;              ///< trace of the final iterate
    std::vector<double> gaps;         ///< sup |u^{k+1} - u^k| over [0, T]
    bool contracting = false;
    std::vector<double> final_values; ///< final iterate at the last level
    double t_final = 0.0;
};

/// Fixed-point iteration of v -> u solving the linear problem with source
/// t^alpha |v|^p, started from the linear solution.
PicardResult picard_solve(const InitialProfile& profile, const ModelParams& params, double T_small, int max_iter,
                          const GridSpec& grid);

/// Largest dt/dr for which the explicit scheme is stable in dimension n;
/// bounded by the origin row 2n (u_1 - u_0) / dr^2. solve() accepts
/// cfl <= kCflSafety * stable_cfl_limit(n).
double stable_cfl_limit(int n);

inline constexpr double kCflSafety = 0.98;

/// Node radii of a grid.
std::vector<double> radii(const GridSpec& grid);

}  // namespace epdlab::solver
