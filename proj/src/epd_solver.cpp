/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "epdlab/epd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "epdlab/special_functions.hpp"

namespace epdlab::solver {

namespace {

// Finite-volume geometry: W_i is the cell volume (r_{i+1/2}^n - r_{i-1/2}^n)/n,
// A_i the face area r_{i+1/2}^{n-1}; sphere-area factor applied by callers.
struct Geometry {
    int n = 3;
    double dr = 0.0;
    int last = 0;  // Dirichlet node
    std::vector<double> r;
    std::vector<double> W;
    std::vector<double> A;
    double area = 1.0;

    Geometry(int dim, const GridSpec& grid) : n(dim), dr(grid.dr), last(grid.nodes() - 1) {
        r.resize(last + 1);
        W.resize(last + 1);
        A.resize(last + 1);
        for (int i = 0; i <= last; ++i) {
            r[i] = i * dr;
            const double hi = (i + 0.5) * dr;
            const double lo = i == 0 ? 0.0 : (i - 0.5) * dr;
            W[i] = (std::pow(hi, n) - std::pow(lo, n)) / n;
            A[i] = std::pow(hi, n - 1);
        }
        area = special::sphere_area(n - 1);
    }

    double laplacian(const std::vector<double>& u, int i) const {
        const double right = A[i] * (u[i + 1] - u[i]);
        const double left = i == 0 ? 0.0 : A[i - 1] * (u[i] - u[i - 1]);
        return (right - left) / (dr * W[i]);
    }
};

double source_term(double t, double u, const ModelParams& params) {
    const double weight = params.alpha == 0.0 ? 1.0 : std::pow(t, params.alpha);
    return weight * (params.p == 2.0 ? u * u : std::pow(std::abs(u), params.p));
}

double sup_abs(const std::vector<double>& u, int upto) {
    double m = 0.0;
    for (int i = 0; i <= upto; ++i) {
        m = std::max(m, std::abs(u[i]));
    }
    return m;
}

bool all_finite(const std::vector<double>& u, int upto) {
    for (int i = 0; i <= upto; ++i) {
        if (!std::isfinite(u[i])) {
            return false;
        }
    }
    return true;
}

double support_radius(const std::vector<double>& u, int upto, double dr, double rel_tol) {
    const double cut = rel_tol * sup_abs(u, upto);
    for (int i = upto; i >= 0; --i) {
        if (std::abs(u[i]) > cut) {
            return i * dr;
        }
    }
    return 0.0;
}

// Staggered energy between levels u_prev (t - dt) and u (t), on nodes <= upto.
double staggered_energy(const Geometry& g, const std::vector<double>& u, const std::vector<double>& u_prev,
                        double dt, int upto) {
    double kinetic = 0.0;
    double potential = 0.0;
    for (int i = 0; i <= upto; ++i) {
        const double v = (u[i] - u_prev[i]) / dt;
        kinetic += g.W[i] * v * v;
        if (i < g.last) {
            potential += g.A[i] * (u[i + 1] - u[i]) * (u_prev[i + 1] - u_prev[i]);
        }
    }
    return g.area * 0.5 * (kinetic + potential / g.dr);
}

int initial_support_index(const std::vector<double>& u0) {
    for (int i = static_cast<int>(u0.size()) - 1; i >= 0; --i) {
        if (u0[i] != 0.0) {
            return i;
        }
    }
    return 0;
}

// Source at level k: either |u^k|^p (nonlinear), a prescribed field, or none.
struct SourceHook {
    const ModelParams* params = nullptr;
    bool nonlinear = true;
    const std::vector<double>* external = nullptr;

    double operator()(double t, const std::vector<double>& u, int i) const {
        if (external) {
            return (*external)[i];
        }
        return nonlinear ? source_term(t, u[i], *params) : 0.0;
    }
};

// u_next = scheme(u, u_prev) at time t over nodes 0..upto (< last).
void advance(const Geometry& g, const std::vector<double>& u, const std::vector<double>& u_prev,
             std::vector<double>& u_next, double t, double dt, double mu, int upto, const SourceHook& src) {
    const double c = mu * dt / (2.0 * t);
    const double dt2 = dt * dt;
    for (int i = 0; i <= upto; ++i) {
        const double rhs = 2.0 * u[i] - (1.0 - c) * u_prev[i] + dt2 * (g.laplacian(u, i) + src(t, u, i));
        u_next[i] = rhs / (1.0 + c);
    }
    for (int i = upto + 1; i <= g.last; ++i) {
        u_next[i] = 0.0;
    }
}

// (mu/t) sum W w^2 and sum W t^alpha |u|^p |w| with w the centred velocity.
struct StepFluxes {
    double damping = 0.0;
    double work = 0.0;
};

StepFluxes step_fluxes(const Geometry& g, const std::vector<double>& u_next, const std::vector<double>& u,
                       const std::vector<double>& u_prev, double t, double dt, const ModelParams& params,
                       int upto, const SourceHook& src) {
    StepFluxes f;
    for (int i = 0; i <= upto; ++i) {
        const double w = (u_next[i] - u_prev[i]) / (2.0 * dt);
        f.damping += g.W[i] * w * w;
        f.work += g.W[i] * std::abs(src(t, u, i)) * std::abs(w);
    }
    f.damping *= g.area * params.mu / t;
    f.work *= g.area;
    return f;
}

std::vector<double> sample_profile(const InitialProfile& profile, const Geometry& g, double amplitude) {
    std::vector<double> u(g.last + 1, 0.0);
    for (int i = 0; i < g.last; ++i) {
        u[i] = amplitude * profile.shape(g.r[i]);
    }
    return u;
}

std::vector<double> first_level(const std::vector<double>& u0, const Geometry& g, const ModelParams& params,
                                double dt, bool nonlinear, const std::vector<double>* external) {
    std::vector<double> u1(g.last + 1, 0.0);
    const int upto = std::min(g.last - 1, initial_support_index(u0) + 1);
    for (int i = 0; i <= upto; ++i) {
        double a = g.laplacian(u0, i);
        if (external) {
            a += (*external)[i];
        } else if (nonlinear && params.alpha == 0.0) {
            a += std::pow(std::abs(u0[i]), params.p);
        }
        u1[i] = u0[i] + 0.5 * dt * dt * a / (1.0 + params.mu);
    }
    return u1;
}

// The scheme itself is well defined for mu = 0, which the verification runs use.
void validate_model(const ModelParams& params) {
    ModelParams shifted = params;
    if (params.mu == 0.0) {
        shifted.mu = 1.0;
    }
    shifted.validate();
}

double lagrange_back(double s, double uk, double uk1, double uk2) {
    return uk * (1.0 - s) * (2.0 - s) / 2.0 + uk1 * s * (2.0 - s) - uk2 * s * (1.0 - s) / 2.0;
}

struct Checkpoint {
    bool taken = false;
    int k = 0;
    double t = 0.0;
    std::vector<double> u, u1, u2;  // levels k, k-1, k-2
    int upto = 0;
};

// Marches from the checkpoint with step h until two consecutive threshold
// exceedances; returns the first exceedance time or NaN if none before t_end.
double march_from_checkpoint(const Checkpoint& cp, const Geometry& g, const ModelParams& params,
                             const GridSpec& grid, double coarse_dt, int halvings) {
    const double h = coarse_dt / std::pow(2.0, halvings);
    const double s = h / coarse_dt;
    std::vector<double> u = cp.u;
    std::vector<double> prev(g.last + 1);
    for (int i = 0; i <= g.last; ++i) {
        prev[i] = lagrange_back(s, cp.u[i], cp.u1[i], cp.u2[i]);
    }
    std::vector<double> next(g.last + 1, 0.0);
    SourceHook src{&params, true, nullptr};
    int upto = cp.upto;
    double t = cp.t;
    double first_exceed = std::numeric_limits<double>::quiet_NaN();
    bool exceeded = false;
    const long max_steps = static_cast<long>(std::ceil((grid.t_budget - cp.t) / h)) + 2;
    for (long step = 0; step < max_steps; ++step) {
        const int reach = std::min(g.last - 1, upto + 1);
        advance(g, u, prev, next, t, h, params.mu, reach, src);
        upto = reach;
        t = cp.t + (step + 1) * h;
        prev.swap(u);
        u.swap(next);
        const double sup = sup_abs(u, upto);
        if (!std::isfinite(sup) || sup > grid.blowup_threshold) {
            if (exceeded) {
                return first_exceed;
            }
            exceeded = true;
            first_exceed = t;
            if (!std::isfinite(sup)) {
                return first_exceed;
            }
        } else {
            exceeded = false;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Grid-scale sign alternation around the peak; physical blow-up is one-signed there.
bool oscillates_at_peak(const std::vector<double>& u, int upto) {
    int peak = 0;
    for (int i = 0; i <= upto; ++i) {
        if (std::abs(u[i]) > std::abs(u[peak])) {
            peak = i;
        }
    }
    const auto opposite = [&](int j) { return j >= 0 && j <= upto && u[j] * u[peak] < 0.0; };
    return opposite(peak - 1) || opposite(peak + 1);
}

}  // namespace

double stable_cfl_limit(int n) {
    // Power iteration on W^{-1} K for the unit-spacing operator; its top
    // eigenvalue lambda gives dt/dr < 2/sqrt(lambda).
    GridSpec unit;
    unit.dr = 1.0;
    unit.r_max = 255.0;
    const Geometry g(n, unit);
    std::vector<double> x(g.last, 1.0);
    std::vector<double> y(g.last, 0.0);
    for (int i = 0; i < g.last; ++i) {
        x[i] = (i % 2 == 0 ? 1.0 : -1.0) / (1.0 + i);
    }
    double lambda = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<double> padded(x);
        padded.push_back(0.0);
        double num = 0.0;
        double den = 0.0;
        for (int i = 0; i < g.last; ++i) {
            y[i] = -g.laplacian(padded, i);
            num += g.W[i] * x[i] * y[i];
            den += g.W[i] * x[i] * x[i];
        }
        lambda = num / den;
        double norm = 0.0;
        for (double v : y) {
            norm = std::max(norm, std::abs(v));
        }
        for (int i = 0; i < g.last; ++i) {
            x[i] = y[i] / norm;
        }
    }
    return 2.0 / std::sqrt(lambda);
}

int GridSpec::nodes() const {
    return static_cast<int>(std::ceil(r_max / dr - 1e-9)) + 1;
}

void GridSpec::validate() const {
    if (!(dr > 0.0) || !std::isfinite(dr)) {
        throw std::invalid_argument("grid.dr must be positive");
    }
    if (!(cfl > 0.0) || cfl > 0.9) {
        throw std::invalid_argument("grid.cfl must lie in (0, 0.9]");
    }
    if (!(t_budget > 0.0) || !std::isfinite(t_budget)) {
        throw std::invalid_argument("grid.t_budget must be positive");
    }
    if (!(blowup_threshold > 1.0) || !std::isfinite(blowup_threshold)) {
        throw std::invalid_argument("grid.blowup_threshold must be finite and > 1");
    }
    if (r_max < t_budget + 1.0 + 2.0 * dr - 1e-12) {
        throw std::invalid_argument("containment invariant violated: grid.r_max >= grid.t_budget + 1 + 2*grid.dr");
    }
}

double GridSpec::containing_radius(double t_budget, double dr) {
    return t_budget + 1.0 + 4.0 * dr;
}

InitialProfile InitialProfile::canonical_bump() {
    return InitialProfile{[](double r) {
        const double x = std::abs(r);
        if (x >= 1.0) {
            return 0.0;
        }
        return std::exp(1.0 - 1.0 / (1.0 - x * x));
    }};
}

InitialProfile InitialProfile::zero() {
    return InitialProfile{[](double) { return 0.0; }};
}

void InitialProfile::validate(const GridSpec& grid) const {
    if (!shape) {
        throw std::invalid_argument("initial profile has no shape");
    }
    const int n = grid.nodes();
    for (int i = 0; i < n; ++i) {
        const double r = i * grid.dr;
        const double v = shape(r);
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("initial profile must be finite and nonnegative");
        }
        if (r >= 1.0 && v != 0.0) {
            throw std::invalid_argument("initial profile must vanish for r >= 1");
        }
    }
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::blew_up:
            return "blew_up";
        case Verdict::survived:
            return "survived";
        case Verdict::unstable:
            return "unstable";
    }
    return "unknown";
}

double SolutionTrace::max_containment_excess() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        worst = std::max(worst, support_radius[i] - (times[i] + 1.0));
    }
    return worst;
}

std::vector<double> radii(const GridSpec& grid) {
    std::vector<double> r(grid.nodes());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = static_cast<double>(i) * grid.dr;
    }
    return r;
}

RadialField first_step(const InitialProfile& profile, const ModelParams& params, const GridSpec& grid,
                       bool nonlinear) {
    const Geometry g(params.n, grid);
    const double dt = grid.dt();
    RadialField f;
    f.prev_values = sample_profile(profile, g, params.epsilon);
    f.values = first_level(f.prev_values, g, params, dt, nonlinear, nullptr);
    f.t = dt;
    f.dt = dt;
    return f;
}

RadialField step(const RadialField& field, const ModelParams& params, const GridSpec& grid, bool nonlinear) {
    if (!(field.t > 0.0)) {
        throw std::invalid_argument("step requires t > 0; use first_step at t = 0");
    }
    const Geometry g(params.n, grid);
    RadialField out;
    out.dt = field.dt;
    out.t = field.t + field.dt;
    out.values.assign(g.last + 1, 0.0);
    SourceHook src{&params, nonlinear, nullptr};
    advance(g, field.values, field.prev_values, out.values, field.t, field.dt, params.mu, g.last - 1, src);
    out.prev_values = field.values;
    return out;
}

EnergyReport energy(const RadialField& field, const ModelParams& params, const GridSpec& grid, double cone_radius) {
    const Geometry g(params.n, grid);
    EnergyReport e;
    e.total = staggered_energy(g, field.values, field.prev_values, field.dt, g.last);
    int upto = -1;
    while (upto + 1 <= g.last && g.r[upto + 1] <= cone_radius) {
        ++upto;
    }
    if (upto >= 0) {
        // Faces beyond the cone are excluded.
        double kinetic = 0.0;
        double potential = 0.0;
        for (int i = 0; i <= upto; ++i) {
            const double v = (field.values[i] - field.prev_values[i]) / field.dt;
            kinetic += g.W[i] * v * v;
            if (i < upto) {
                potential += g.A[i] * (field.values[i + 1] - field.values[i]) *
                             (field.prev_values[i + 1] - field.prev_values[i]);
            }
        }
        e.on_cone = g.area * 0.5 * (kinetic + potential / g.dr);
    }
    return e;
}

namespace {

struct MarchSetup {
    bool nonlinear = true;
    // Prescribed source per level (Picard); index k holds the source at t_k.
    const std::vector<std::vector<double>>* sources = nullptr;
    // Keep every level (Picard).
    std::vector<std::vector<double>>* levels = nullptr;
};

SolutionTrace march(const InitialProfile& profile, const ModelParams& params, const GridSpec& grid,
                    const SolveOptions& options, const MarchSetup& setup) {
    grid.validate();
    validate_model(params);
    if (grid.cfl > kCflSafety * stable_cfl_limit(params.n)) {
        throw std::invalid_argument("grid.cfl exceeds the stability limit " +
                                    std::to_string(kCflSafety * stable_cfl_limit(params.n)) + " for model.n = " +
                                    std::to_string(params.n));
    }
    profile.validate(grid);

    const Geometry g(params.n, grid);
    const double dt = grid.dt();
    const long steps = static_cast<long>(std::ceil(grid.t_budget / dt - 1e-9));
    const double soft_threshold = std::sqrt(grid.blowup_threshold);

    SolutionTrace trace;
    trace.dr = grid.dr;
    trace.dt = dt;

    std::vector<double> u_prev = sample_profile(profile, g, params.epsilon);
    const std::vector<double>* src0 = setup.sources ? &(*setup.sources)[0] : nullptr;
    std::vector<double> u = first_level(u_prev, g, params, dt, setup.nonlinear, src0);
    std::vector<double> u_next(g.last + 1, 0.0);
    std::vector<double> u_prev2 = u_prev;
    int upto = std::min(g.last - 1, initial_support_index(u_prev) + 1);

    if (setup.levels) {
        setup.levels->clear();
        setup.levels->push_back(u_prev);
        setup.levels->push_back(u);
    }

    double dissipation = 0.0;
    double work = 0.0;
    const double e_half = staggered_energy(g, u, u_prev, dt, upto);

    auto truncated = [&](const std::vector<double>& v, double t) {
        const int keep = std::min(g.last, static_cast<int>(std::ceil((t + 1.0) / g.dr)) + 3);
        return std::vector<double>(v.begin(), v.begin() + keep + 1);
    };
    std::vector<bool> snap_done(options.snapshot_times.size(), false);
    auto maybe_snapshot = [&](long k, double t, const std::vector<double>& v) {
        bool take = options.record_snapshots && options.snapshot_stride > 0 && k % options.snapshot_stride == 0;
        for (std::size_t j = 0; j < options.snapshot_times.size(); ++j) {
            if (!snap_done[j] && std::abs(t - options.snapshot_times[j]) <= 0.5 * dt + 1e-12) {
                snap_done[j] = true;
                take = true;
            }
        }
        if (take) {
            trace.snapshots.push_back(Snapshot{t, truncated(v, t)});
        }
    };
    auto record = [&](double t, const std::vector<double>& v, double e) {
        trace.times.push_back(t);
        trace.sup_norm.push_back(sup_abs(v, upto));
        trace.energy.push_back(e);
        trace.dissipation.push_back(dissipation);
        trace.source_work.push_back(work);
        trace.support_radius.push_back(support_radius(v, upto, g.dr, options.support_tolerance));
    };

    // Level 0 (t = 0) for snapshots and the support check.
    maybe_snapshot(0, 0.0, u_prev);
    record(dt, u, e_half);
    maybe_snapshot(1, dt, u);

    Checkpoint cp;
    bool exceeded = false;
    double first_exceed = 0.0;
    bool done = false;
    const int stride = std::max(1, options.sample_every);

    for (long k = 1; k < steps && !done; ++k) {
        const double t = k * dt;
        const int reach = std::min(g.last - 1, upto + 1);
        SourceHook src{&params, setup.nonlinear, nullptr};
        if (setup.sources) {
            src.external = &(*setup.sources)[k];
        }
        advance(g, u, u_prev, u_next, t, dt, params.mu, reach, src);
        const StepFluxes flux = step_fluxes(g, u_next, u, u_prev, t, dt, params, reach, src);
        dissipation += dt * flux.damping;
        work += dt * flux.work;
        upto = reach;

        u_prev2.swap(u_prev);  // u_prev2 <- k-1
        u_prev.swap(u);        // u_prev <- k
        u.swap(u_next);        // u <- k+1
        const double t_next = (k + 1) * dt;
        if (setup.levels) {
            setup.levels->push_back(u);
        }

        const bool finite = all_finite(u, upto);
        const double sup = finite ? sup_abs(u, upto) : std::numeric_limits<double>::infinity();

        if (finite && !cp.taken && sup > soft_threshold) {
            cp.taken = true;
            cp.k = static_cast<int>(k);
            cp.t = t;
            cp.u = u_prev;
            cp.u1 = u_prev2;
            cp.u2 = u_next;  // level k-2 after the rotation
            cp.upto = upto;
        }

        if (!finite) {
            if (cp.taken) {
                trace.verdict = Verdict::blew_up;
                trace.T_num = exceeded ? first_exceed : t_next;
            } else {
                trace.verdict = Verdict::unstable;
                trace.T_num = t_next;
            }
            done = true;
            break;
        }

        const bool sample = (k + 1) % stride == 0;
        if (sup > grid.blowup_threshold) {
            if (exceeded && !done) {
                trace.verdict = Verdict::blew_up;
                trace.T_num = first_exceed;
                done = true;
            } else {
                exceeded = true;
                first_exceed = t_next;
                if (oscillates_at_peak(u, upto)) {
                    trace.verdict = Verdict::unstable;
                    trace.T_num = t_next;
                    done = true;
                }
            }
        } else {
            exceeded = false;
        }
        if (sample || done || k + 1 == steps) {
            record(t_next, u, staggered_energy(g, u, u_prev, dt, upto));
        }
        maybe_snapshot(k + 1, t_next, u);
    }

    if (!done) {
        trace.verdict = Verdict::survived;
        trace.T_num = steps * dt;
    }

    if (trace.verdict == Verdict::blew_up && options.refine && cp.taken && options.max_refinements > 0) {
        double previous = trace.T_num;
        for (int j = 1; j <= options.max_refinements; ++j) {
            const double refined = march_from_checkpoint(cp, g, params, grid, dt, j);
            if (!std::isfinite(refined)) {
                break;
            }
            trace.refine_gap = std::abs(refined - previous) / refined;
            trace.refinements = j;
            trace.T_num = refined;
            previous = refined;
            if (trace.refine_gap < options.refine_tolerance) {
                break;
            }
        }
    }
    return trace;
}

}  // namespace

SolutionTrace solve(const InitialProfile& profile, const ModelParams& params, const GridSpec& grid,
                    const SolveOptions& options) {
    MarchSetup setup;
    setup.nonlinear = options.nonlinear;
    return march(profile, params, grid, options, setup);
}

PicardResult picard_solve(const InitialProfile& profile, const ModelParams& params, double T_small, int max_iter,
                          const GridSpec& grid) {
    if (!(T_small > 0.0)) {
        throw std::invalid_argument("picard_solve: T_small must be positive");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("picard_solve: max_iter must be >= 1");
    }
    GridSpec local = grid;
    local.t_budget = T_small;
    if (local.r_max < GridSpec::containing_radius(T_small, grid.dr)) {
        local.r_max = GridSpec::containing_radius(T_small, grid.dr);
    }
    local.blowup_threshold = std::numeric_limits<double>::max();

    SolveOptions options;
    options.refine = false;

    std::vector<std::vector<double>> levels;
    MarchSetup linear;
    linear.nonlinear = false;
    linear.levels = &levels;
    PicardResult result;
    result.trace = march(profile, params, local, options, linear);

    std::vector<std::vector<double>> sources;
    std::vector<std::vector<double>> next_levels;
    for (int it = 0; it < max_iter; ++it) {
        sources.resize(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const double t = k * local.dt();
            sources[k].resize(levels[k].size());
            for (std::size_t i = 0; i < levels[k].size(); ++i) {
                // At t = 0 the weight t^alpha is the limit value [alpha = 0].
                const double w = k == 0 ? (params.alpha == 0.0 ? 1.0 : 0.0) : std::pow(t, params.alpha);
                sources[k][i] = w * std::pow(std::abs(levels[k][i]), params.p);
            }
        }
        MarchSetup iterate;
        iterate.sources = &sources;
        iterate.levels = &next_levels;
        result.trace = march(profile, params, local, options, iterate);

        double gap = 0.0;
        const std::size_t count = std::min(levels.size(), next_levels.size());
        for (std::size_t k = 0; k < count; ++k) {
            for (std::size_t i = 0; i < levels[k].size(); ++i) {
                gap = std::max(gap, std::abs(next_levels[k][i] - levels[k][i]));
            }
        }
        result.gaps.push_back(gap);
        levels.swap(next_levels);
        if (gap == 0.0) {
            break;
        }
    }

    result.contracting = true;
    for (std::size_t k = 1; k < result.gaps.size(); ++k) {
        if (result.gaps[k - 1] > 0.0 && !(result.gaps[k] < result.gaps[k - 1])) {
            result.contracting = false;
        }
    }
    result.final_values = levels.back();
    result.t_final = (levels.size() - 1) * local.dt();
    return result;
}

}  // namespace epdlab::solver
