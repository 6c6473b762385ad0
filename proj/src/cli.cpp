/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "epdlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "epdlab/blowup_lab.hpp"
#include "epdlab/quadrature.hpp"
#include "epdlab/special_functions.hpp"

namespace epdlab::cli {

namespace fs = std::filesystem;

std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Minimal ordered JSON writer.

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string json_number(double x) {
    return std::isfinite(x) ? fmt(x) : "null";
}

class JsonObject {
public:
    JsonObject& num(const std::string& key, double v) { return raw(key, json_number(v)); }
    JsonObject& integer(const std::string& key, long v) { return raw(key, std::to_string(v)); }
    JsonObject& str(const std::string& key, const std::string& v) { return raw(key, "\"" + json_escape(v) + "\""); }
    JsonObject& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
    JsonObject& null(const std::string& key) { return raw(key, "null"); }
    JsonObject& nums(const std::string& key, const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : "") + json_number(v[i]);
        }
        return raw(key, s + "]");
    }
    JsonObject& raw(const std::string& key, const std::string& value) {
        fields_.emplace_back(key, value);
        return *this;
    }
    std::string text(int indent = 0) const {
        const std::string pad(indent + 2, ' ');
        std::string s = "{\n";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            s += pad + "\"" + json_escape(fields_[i].first) + "\": " + fields_[i].second;
            s += i + 1 < fields_.size() ? ",\n" : "\n";
        }
        return s + std::string(indent, ' ') + "}";
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

JsonObject artifact() {
    JsonObject o;
    o.integer("schema_version", kSchemaVersion);
    return o;
}

std::string json_array(const std::vector<std::string>& items, int indent) {
    if (items.empty()) {
        return "[]";
    }
    const std::string pad(indent + 2, ' ');
    std::string s = "[\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        s += pad + items[i] + (i + 1 < items.size() ? ",\n" : "\n");
    }
    return s + std::string(indent, ' ') + "]";
}

// ---------------------------------------------------------------------------
// Config keys.

double parse_double(const std::string& key, const std::string& value) {
    double x = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
        throw ConfigError("config.bad_value", "key '" + key + "': expected a finite number, got '" + value + "'");
    }
    return x;
}

int parse_int(const std::string& key, const std::string& value) {
    int x = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("config.bad_value", "key '" + key + "': expected an integer, got '" + value + "'");
    }
    return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            continue;
        }
        out.push_back(parse_double(key, item.substr(b, e - b + 1)));
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + fmt(v[i]);
    }
    return s;
}

struct KeySpec {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define EPDLAB_DOUBLE_KEY(name, field)                                                            \
    KeySpec {                                                                                     \
        name, [](RunConfig& c, const std::string& v) { c.field = parse_double(name, v); },      \
            [](const RunConfig& c) { return fmt(c.field); }                                      \
    }
#define EPDLAB_INT_KEY(name, field)                                                               \
    KeySpec {                                                                                     \
        name, [](RunConfig& c, const std::string& v) { c.field = parse_int(name, v); },         \
            [](const RunConfig& c) { return std::to_string(c.field); }                           \
    }

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        EPDLAB_INT_KEY("model.n", model.n),
        EPDLAB_DOUBLE_KEY("model.mu", model.mu),
        EPDLAB_DOUBLE_KEY("model.alpha", model.alpha),
        KeySpec{"model.p",
                [](RunConfig& c, const std::string& v) {
                    c.model.p = parse_double("model.p", v);
                    c.p_given = true;
                },
                [](const RunConfig& c) { return fmt(c.model.p); }},
        EPDLAB_DOUBLE_KEY("model.eps", model.epsilon),
        KeySpec{"grid.r_max",
                [](RunConfig& c, const std::string& v) {
                    c.grid.r_max = parse_double("grid.r_max", v);
                    c.r_max_given = true;
                },
                [](const RunConfig& c) { return fmt(c.grid.r_max); }},
        EPDLAB_DOUBLE_KEY("grid.dr", grid.dr),
        EPDLAB_DOUBLE_KEY("grid.cfl", grid.cfl),
        EPDLAB_DOUBLE_KEY("grid.t_budget", grid.t_budget),
        EPDLAB_DOUBLE_KEY("grid.blowup_threshold", grid.blowup_threshold),
        EPDLAB_INT_KEY("testfn.nodes_per_panel", testfn.lambda_quad.nodes_per_panel),
        EPDLAB_DOUBLE_KEY("testfn.panel_ratio", testfn.lambda_quad.panel_ratio),
        EPDLAB_DOUBLE_KEY("testfn.floor_scale", testfn.lambda_quad.floor_scale),
        EPDLAB_DOUBLE_KEY("testfn.abs_tol", testfn.lambda_quad.abs_tol),
        EPDLAB_DOUBLE_KEY("testfn.rel_tol", testfn.lambda_quad.rel_tol),
        EPDLAB_INT_KEY("testfn.max_doublings", testfn.lambda_quad.max_doublings),
        EPDLAB_INT_KEY("testfn.angle_nodes", testfn.angle_quad.nodes),
        EPDLAB_DOUBLE_KEY("testfn.angle_rel_tol", testfn.angle_quad.rel_tol),
        EPDLAB_DOUBLE_KEY("testfn.special_rel_tol", testfn.special_rel_tol),
        EPDLAB_INT_KEY("testfn.cache_tau_points", testfn.cache.tau_points),
        EPDLAB_INT_KEY("testfn.cache_rho_points", testfn.cache.rho_points),
        KeySpec{"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                [](const RunConfig& c) { return c.output_dir; }},
        KeySpec{"output.snapshots",
                [](RunConfig& c, const std::string& v) { c.emit_snapshots = parse_list("output.snapshots", v); },
                [](const RunConfig& c) { return format_list(c.emit_snapshots); }},
        EPDLAB_DOUBLE_KEY("output.snapshot_spacing", snapshot_spacing),
    };
    return table;
}

#undef EPDLAB_DOUBLE_KEY
#undef EPDLAB_INT_KEY

const KeySpec* find_key(const std::string& key) {
    for (const auto& spec : key_table()) {
        if (spec.key == key) {
            return &spec;
        }
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

testfn::TestFunctionParams RunConfig::test_function_params() const {
    testfn::TestFunctionParams tp = testfn::TestFunctionParams::make(model.n, model.mu, model.alpha, model.p);
    tp.lambda_quad = testfn.lambda_quad;
    tp.angle_quad = testfn.angle_quad;
    tp.special.rel_tol = testfn.special_rel_tol;
    return tp;
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config.syntax", "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

RunConfig parse_config(const KeyValues& file_entries, const KeyValues& overrides) {
    RunConfig c;
    for (const auto* entries : {&file_entries, &overrides}) {
        for (const auto& [key, value] : *entries) {
            const KeySpec* spec = find_key(key);
            if (!spec) {
                throw ConfigError("config.unknown_key", "unknown key '" + key + "'");
            }
            spec->set(c, value);
        }
    }
    try {
        if (!c.p_given) {
            c.model.p = exponents::p_strauss(c.model.n, c.model.mu, c.model.alpha);
        }
        c.model.validate();
    } catch (const std::exception& e) {
        throw ConfigError("config.invalid_model", e.what());
    }
    if (!c.r_max_given) {
        c.grid.r_max = solver::GridSpec::containing_radius(c.grid.t_budget, c.grid.dr);
    }
    try {
        c.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError("config.invariant", e.what());
    }
    for (double t : c.emit_snapshots) {
        if (t < 0.0 || t > c.grid.t_budget) {
            throw ConfigError("config.invariant", "output.snapshots entries must lie in [0, grid.t_budget]");
        }
    }
    if (!(c.snapshot_spacing > 0.0)) {
        throw ConfigError("config.invariant", "output.snapshot_spacing must be positive");
    }
    if (c.output_dir.empty()) {
        throw ConfigError("config.invariant", "output.dir must not be empty");
    }
    return c;
}

RunConfig load_config(const std::string& path, const KeyValues& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config.missing_file", "cannot read config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(parse_key_values(ss.str()), overrides);
}

std::string write_config(const RunConfig& config) {
    std::string s;
    for (const auto& spec : key_table()) {
        s += spec.key + " = " + spec.get(config) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Subcommands.

namespace {

class NumericError : public std::runtime_error {
public:
    NumericError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct Output {
    fs::path dir;

    explicit Output(const std::string& d) : dir(d) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw ConfigError("config.output", "cannot write '" + (dir / name).string() + "'");
        }
        f << content;
    }
};

using lab::log_grid;

struct Args {
    std::vector<double> nu;
    std::vector<double> z;
    std::vector<double> t;
    double tmin = 1e2;
    double tmax = 1e4;
    int points = 9;
    double picard_T = 0.25;
    int picard_iters = 12;
    std::string run_dir;
    std::vector<double> M;
    double c0 = 1.0;
    double c1 = 1.0;
    double s_start = 2.0;
    std::vector<double> eps_list{1.0, 0.8, 0.6, 0.5};
    int trace_every = 10;
};

int cmd_exponents(const RunConfig& c, const Output& o, std::ostream& out) {
    const auto rep = exponents::check_hypotheses(c.model);
    std::vector<std::string> hyps;
    for (const auto& h : rep.hypotheses) {
        JsonObject j;
        j.str("name", h.name).boolean("passed", h.passed).num("witness", h.witness).str("detail", h.detail);
        hyps.push_back(j.text(4));
    }
    JsonObject j = artifact();
    j.num("n", c.model.n)
        .num("mu", c.model.mu)
        .num("alpha", c.model.alpha)
        .num("p", rep.p)
        .num("p_S", rep.p_S)
        .num("p_F", rep.p_F)
        .num("mu_star", rep.mu_star)
        .num("q_left", rep.q_left)
        .num("q_right", rep.q_right)
        .num("gamma_at_p", rep.gamma_at_p)
        .boolean("critical", rep.critical)
        .boolean("all_passed", rep.all_passed())
        .raw("hypotheses", json_array(hyps, 2));
    const std::string text = j.text() + "\n";
    o.write("exponents.json", text);
    out << text;
    return kExitOk;
}

int cmd_bessel(const RunConfig& c, const Args& a, const Output& o) {
    special::SpecFunConfig cfg;
    cfg.rel_tol = c.testfn.special_rel_tol;
    const auto nus = a.nu.empty() ? std::vector<double>{0.0, 0.25, 0.5, 1.0, 2.3} : a.nu;
    const auto zs = a.z.empty() ? log_grid(1e-3, 50.0, 40) : a.z;
    std::string csv = "nu,z,K,K_scaled\n";
    for (double nu : nus) {
        for (double z : zs) {
            csv += fmt(nu) + "," + fmt(z) + "," + fmt(special::bessel_k(nu, z, cfg)) + "," +
                   fmt(special::bessel_k_scaled(nu, z, cfg)) + "\n";
        }
    }
    o.write("bessel.csv", csv);
    return kExitOk;
}

int cmd_hfun(const RunConfig& c, const Args& a, const Output& o) {
    special::SpecFunConfig cfg;
    cfg.rel_tol = c.testfn.special_rel_tol;
    const auto ts = a.t.empty() ? log_grid(1e-2, 60.0, 60) : a.t;
    std::string csv = "t,h,h_prime\n";
    for (double t : ts) {
        const auto h = special::h_eval(t, c.model.mu, cfg);
        csv += fmt(t) + "," + fmt(h.value) + "," + fmt(h.derivative) + "\n";
    }
    o.write("hfun.csv", csv);
    JsonObject j = artifact();
    j.num("mu", c.model.mu).num("C0", special::h_limit_constant(c.model.mu));
    o.write("hfun.json", j.text() + "\n");
    return kExitOk;
}

int cmd_testfn(const RunConfig& c, const Args& a, const Output& o) {
    const auto tp = c.test_function_params();
    tp.validate();

    std::string csv = "t,r,b_q,ratio\n";
    std::vector<double> lx;
    std::vector<double> ly;
    for (double t : log_grid(a.tmin, a.tmax, a.points)) {
        const double b = testfn::b_q_eval(t, 0.0, tp).value;
        csv += fmt(t) + ",0," + fmt(b) + "," + fmt(b * std::pow(t, tp.q)) + "\n";
        lx.push_back(std::log(t));
        ly.push_back(std::log(b));
    }
    o.write("testfn.csv", csv);
    const auto slope = lab::fit_line(lx, ly, 2);

    std::string res = "t,r,b_q,residual\n";
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (double frac : {0.0, 0.25, 0.5, 0.75, 0.9}) {
            const double r = frac * (t + 1.0);
            const auto pr = testfn::b_q_pde_residual(t, r, tp);
            worst = std::max(worst, std::abs(pr.residual));
            res += fmt(t) + "," + fmt(r) + "," + fmt(pr.b_q) + "," + fmt(pr.residual) + "\n";
        }
    }
    o.write("testfn_residual.csv", res);

    std::string env = "t,r,dt_b_q,envelope\n";
    double env_max = 0.0;
    double env_min = std::numeric_limits<double>::infinity();
    for (double t : log_grid(10.0, 1e3, 9)) {
        const double r = 0.9 * (t + 1.0);
        const double d = testfn::b_q_dt(t, r, tp).value;
        const double e = std::abs(d) * std::pow(t, (tp.n - 1.0) / 2.0 - tp.mu / 2.0) *
                         std::pow(t + 2.0 - r, 1.0 - 1.0 / tp.p);
        env_max = std::max(env_max, e);
        env_min = std::min(env_min, e);
        env += fmt(t) + "," + fmt(r) + "," + fmt(d) + "," + fmt(e) + "\n";
    }
    o.write("testfn_envelope.csv", env);

    JsonObject j = artifact();
    j.num("n", tp.n)
        .num("mu", tp.mu)
        .num("alpha", tp.alpha)
        .num("p", tp.p)
        .num("q", tp.q)
        .num("loglog_slope", slope.slope)
        .num("loglog_target", 0.0 - tp.q)
        .num("pde_residual_max", worst)
        .num("envelope_max", env_max)
        .num("envelope_min", env_min);
    try {
        const auto lim = testfn::initial_limit(0.5, tp, testfn::dyadic_times(4, 12));
        j.num("initial_limit_r", 0.5)
            .num("initial_limit", lim.extrapolated)
            .num("initial_limit_change", lim.change)
            .num("initial_limit_c0_integral", lim.c0_integral)
            .num("initial_limit_d0_integral", lim.d0_integral)
            .boolean("initial_limit_certified", lim.certified);
    } catch (const quad::QuadratureError& e) {
        j.null("initial_limit").str("initial_limit_error", e.what());
    }
    o.write("testfn.json", j.text() + "\n");
    return kExitOk;
}

JsonObject grid_json(const solver::GridSpec& g, double dt) {
    JsonObject j;
    j.num("r_max", g.r_max).num("dr", g.dr).num("dt", dt).num("cfl", g.cfl).num("t_budget", g.t_budget);
    j.num("blowup_threshold", g.blowup_threshold);
    return j;
}

std::string trace_csv(const solver::SolutionTrace& tr) {
    std::string csv = "t,sup_norm,energy,dissipation,support_radius\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        csv += fmt(tr.times[i]) + "," + fmt(tr.sup_norm[i]) + "," + fmt(tr.energy[i]) + "," +
               fmt(tr.dissipation[i]) + "," + fmt(tr.support_radius[i]) + "\n";
    }
    return csv;
}

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", index);
    return buf;
}

int cmd_solve(const RunConfig& c, const Args& a, const Output& o) {
    solver::SolveOptions opt;
    opt.sample_every = std::max(1, a.trace_every);
    opt.snapshot_times = c.emit_snapshots;
    const auto tr = solver::solve(solver::InitialProfile::canonical_bump(), c.model, c.grid, opt);
    o.write("trace.csv", trace_csv(tr));
    std::vector<std::string> snaps;
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        const auto& s = tr.snapshots[k];
        std::string csv = "r,u\n";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            csv += fmt(static_cast<double>(i) * tr.dr) + "," + fmt(s.values[i]) + "\n";
        }
        o.write(snapshot_name(k), csv);
        JsonObject sj;
        sj.num("t", s.t).str("file", snapshot_name(k));
        snaps.push_back(sj.text(4));
    }
    JsonObject j = artifact();
    j.str("verdict", solver::to_string(tr.verdict))
        .num("T_num", tr.T_num)
        .num("refine_gap", tr.refine_gap)
        .integer("refinements", tr.refinements)
        .num("max_containment_excess", tr.max_containment_excess())
        .raw("grid", grid_json(c.grid, tr.dt).text(2))
        .raw("snapshots", json_array(snaps, 2));
    o.write("verdict.json", j.text() + "\n");
    return kExitOk;
}

int cmd_picard(const RunConfig& c, const Args& a, const Output& o) {
    const auto res =
        solver::picard_solve(solver::InitialProfile::canonical_bump(), c.model, a.picard_T, a.picard_iters, c.grid);
    std::string csv = "iteration,gap\n";
    for (std::size_t k = 0; k < res.gaps.size(); ++k) {
        csv += std::to_string(k) + "," + fmt(res.gaps[k]) + "\n";
    }
    o.write("picard.csv", csv);
    JsonObject j = artifact();
    j.num("T_small", a.picard_T)
        .num("t_final", res.t_final)
        .boolean("contracting", res.contracting)
        .nums("gaps", res.gaps);
    o.write("picard.json", j.text() + "\n");
    if (!res.contracting) {
        throw NumericError("solver.non_contraction", "Picard gaps did not decrease; see picard.csv");
    }
    return kExitOk;
}

int cmd_functional(const RunConfig& c, const Args& a, const Output& o) {
    solver::SolveOptions opt;
    opt.sample_every = 1000;
    opt.record_snapshots = true;
    opt.snapshot_stride = std::max(1, static_cast<int>(std::lround(c.snapshot_spacing / c.grid.dt())));
    const auto tr = solver::solve(solver::InitialProfile::canonical_bump(), c.model, c.grid, opt);

    const double M_hi = lab::resolvable_end(tr, c.grid);
    const double M_lo = 2.0;
    if (!(M_hi > M_lo)) {
        throw NumericError("blowup_lab.coverage", "resolvable window ends at t = " + fmt(M_hi) + " <= 2");
    }
    auto spec = c.testfn.cache;
    spec.tau_min = 0.5;
    spec.tau_max = std::max(M_hi, 1.0);
    auto cache = std::make_shared<const testfn::BqCache>(c.test_function_params(), spec);

    lab::FunctionalConfig fc;
    fc.p_conj = lab::FunctionalConfig::conjugate(c.model.p);
    fc.bq_cache = cache;
    fc.M_grid = a.M.empty() ? log_grid(M_lo, M_hi, 16) : a.M;
    const lab::FunctionalEvaluator ev(tr, c.model, fc);

    std::string csv = "M,Y,Z\n";
    for (double M : fc.M_grid) {
        csv += fmt(M) + "," + fmt(ev.Y(M)) + "," + fmt(ev.Z(M)) + "\n";
    }
    o.write("functional.csv", csv);

    JsonObject j = artifact();
    j.str("verdict", solver::to_string(tr.verdict)).num("T_num", tr.T_num).nums("window", {M_lo, M_hi});
    try {
        const auto fit = lab::functional_growth_fit(ev, fc.M_grid);
        JsonObject fj;
        fj.num("slope", fit.slope)
            .num("intercept", fit.intercept)
            .num("r2", fit.r2)
            .num("slope_stderr", fit.slope_stderr)
            .integer("points", fit.points);
        j.raw("fit", fj.text(2));
    } catch (const lab::FitRefused& e) {
        j.null("fit").str("fit_error", e.what());
    }
    const double mass_lo = 4.0;
    const double mass_hi = std::min(32.0, M_hi);
    if (mass_hi > 2.0 * mass_lo) {
        const auto ms = lab::nonlinear_mass_fit(ev, log_grid(mass_lo, mass_hi, 10));
        JsonObject mj;
        mj.num("slope", ms.fit.slope).num("r2", ms.fit.r2).num("target", ms.target).nums("window", {mass_lo, mass_hi});
        j.raw("nonlinear_mass", mj.text(2));
    } else {
        j.null("nonlinear_mass");
    }
    j.num("cache_interpolation_error", cache->interpolation_error());
    o.write("functional.json", j.text() + "\n");
    return kExitOk;
}

int cmd_ode(const RunConfig& c, const Args& a, const Output& o, std::ostream& out) {
    const auto r = lab::extremal_ode_lifespan(c.model.p, c.model.epsilon, a.c0, a.c1, a.s_start);
    JsonObject j = artifact();
    j.num("p", c.model.p)
        .num("eps", c.model.epsilon)
        .num("c0", a.c0)
        .num("c1", a.c1)
        .num("s_start", a.s_start)
        .num("s_numeric", r.s_numeric)
        .num("s_closed", r.s_closed)
        .num("gap", r.gap)
        .num("s_switch", r.s_switch)
        .integer("steps", r.steps);
    const std::string text = j.text() + "\n";
    o.write("ode.json", text);
    out << text;
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, const Args& a, const Output& o) {
    const auto res = lab::lifespan_sweep(c.model, a.eps_list, c.grid);
    std::string csv = "eps,x_fit,T_num,refine_gap\n";
    std::vector<std::string> recs;
    for (const auto& r : res.records) {
        csv += fmt(r.params.epsilon) + "," + fmt(r.x_fit) + "," + fmt(r.T_num) + "," + fmt(r.refine_gap) + "\n";
        JsonObject rj;
        rj.num("eps", r.params.epsilon).str("verdict", solver::to_string(r.verdict)).num("T_num", r.T_num);
        recs.push_back(rj.text(4));
    }
    o.write("sweep.csv", csv);
    JsonObject j = artifact();
    if (res.fit) {
        j.num("slope", res.fit->slope).num("intercept", res.fit->intercept).num("r2", res.fit->r2);
        j.integer("points", res.fit->points);
    } else {
        j.null("slope").null("intercept").null("r2").str("fit_error", res.fit_error);
    }
    j.boolean("monotone", res.monotone).boolean("strictly_monotone", res.strictly_monotone);
    j.raw("records", json_array(recs, 2));
    o.write("sweep_fit.json", j.text() + "\n");
    if (!res.fit) {
        throw NumericError("blowup_lab.fit_refused", res.fit_error);
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"epdlab: damped wave blow-up laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out_dir, "output directory (output.dir)");
    app.add_option("--set", sets, "override any config key: key=value");

    std::map<std::string, std::string> flag_values;
    const std::vector<std::pair<std::string, std::string>> flag_keys = {
        {"--n", "model.n"},         {"--mu", "model.mu"},           {"--alpha", "model.alpha"},
        {"--p", "model.p"},         {"--eps", "model.eps"},         {"--rmax", "grid.r_max"},
        {"--dr", "grid.dr"},        {"--cfl", "grid.cfl"},          {"--tbudget", "grid.t_budget"},
        {"--threshold", "grid.blowup_threshold"}, {"--snapshots", "output.snapshots"},
    };
    for (const auto& [flag, key] : flag_keys) {
        app.add_option(flag, flag_values[key], "sets " + key);
    }

    Args a;
    auto* exps = app.add_subcommand("exponents", "critical exponents and hypothesis checks");
    auto* bes = app.add_subcommand("bessel", "tabulate K_nu(z)");
    bes->add_option("--nu", a.nu)->delimiter(',');
    bes->add_option("--z", a.z)->delimiter(',');
    auto* hf = app.add_subcommand("hfun", "tabulate h(t) and h'(t)");
    hf->add_option("--t", a.t)->delimiter(',');
    auto* tf = app.add_subcommand("testfn-verify", "b_q asymptotics, PDE residual and envelope");
    tf->add_option("--tmin", a.tmin);
    tf->add_option("--tmax", a.tmax);
    tf->add_option("--points", a.points)->check(CLI::Range(2, 1000));
    auto* sol = app.add_subcommand("solve", "radial solve with trace and verdict");
    sol->add_option("--trace-every", a.trace_every)->check(CLI::PositiveNumber);
    auto* pic = app.add_subcommand("picard", "Picard iteration on a short window");
    pic->add_option("--T", a.picard_T);
    pic->add_option("--iters", a.picard_iters)->check(CLI::Range(1, 1000));
    auto* fun = app.add_subcommand("functional", "Y(M) and Z(t) along a run");
    fun->add_option("--run", a.run_dir, "directory holding config.resolved")->required();
    fun->add_option("--M", a.M)->delimiter(',');
    auto* ode = app.add_subcommand("ode-lifespan", "extremal lifespan ODE");
    ode->add_option("--c0", a.c0);
    ode->add_option("--c1", a.c1);
    ode->add_option("--s-start", a.s_start);
    auto* swp = app.add_subcommand("sweep", "lifespan sweep over eps");
    swp->add_option("--eps-list", a.eps_list)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << app.help();
        err << "error: cli.usage: " << e.what() << "\n";
        return kExitConfig;
    }

    std::string module = "config";
    try {
        KeyValues overrides;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config.syntax", "--set expects key=value, got '" + s + "'");
            }
            overrides.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        }
        for (const auto& [flag, key] : flag_keys) {
            if (app.get_option(flag)->count() > 0) {
                overrides.emplace_back(key, flag_values[key]);
            }
        }
        const bool out_given = !out_dir.empty();
        if (out_given) {
            overrides.emplace_back("output.dir", out_dir);
        }

        RunConfig c;
        if (fun->parsed()) {
            const fs::path resolved = fs::path(a.run_dir) / "config.resolved";
            c = load_config(resolved.string(), overrides);
            if (!out_given) {
                c.output_dir = a.run_dir;
            }
        } else if (!config_path.empty()) {
            c = load_config(config_path, overrides);
        } else {
            c = parse_config({}, overrides);
        }
        const Output o(c.output_dir);
        o.write("config.resolved", write_config(c));

        if (exps->parsed()) {
            module = "exponents";
            return cmd_exponents(c, o, out);
        }
        if (bes->parsed()) {
            module = "special_functions";
            return cmd_bessel(c, a, o);
        }
        if (hf->parsed()) {
            module = "special_functions";
            return cmd_hfun(c, a, o);
        }
        if (tf->parsed()) {
            module = "test_functions";
            return cmd_testfn(c, a, o);
        }
        if (sol->parsed()) {
            module = "solver";
            return cmd_solve(c, a, o);
        }
        if (pic->parsed()) {
            module = "solver";
            return cmd_picard(c, a, o);
        }
        if (fun->parsed()) {
            module = "blowup_lab";
            return cmd_functional(c, a, o);
        }
        if (ode->parsed()) {
            module = "blowup_lab";
            return cmd_ode(c, a, o, out);
        }
        if (swp->parsed()) {
            module = "blowup_lab";
            return cmd_sweep(c, a, o);
        }
        err << "error: cli.usage: no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const quad::QuadratureError& e) {
        err << "error: " << module << ".quadrature: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const lab::CoverageError& e) {
        err << "error: blowup_lab.coverage: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const lab::FitRefused& e) {
        err << "error: blowup_lab.fit_refused: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << module << ".invalid_argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        err << "error: " << module << ".domain: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::overflow_error& e) {
        err << "error: " << module << ".overflow: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        err << "error: config.output: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << module << ".numeric: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace epdlab::cli
