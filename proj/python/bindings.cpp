/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "epdlab/blowup_lab.hpp"
#include "epdlab/epd_solver.hpp"
#include "epdlab/exponents.hpp"
#include "epdlab/quadrature.hpp"
#include "epdlab/special_functions.hpp"
#include "epdlab/test_functions.hpp"

namespace py = pybind11;
using namespace epdlab;

namespace {

py::dict trace_dict(const solver::SolutionTrace& tr) {
    py::dict d;
    d["times"] = tr.times;
    d["sup_norm"] = tr.sup_norm;
    d["energy"] = tr.energy;
    d["dissipation"] = tr.dissipation;
    d["source_work"] = tr.source_work;
    d["support_radius"] = tr.support_radius;
    d["verdict"] = solver::to_string(tr.verdict);
    d["T_num"] = tr.T_num;
    d["refine_gap"] = tr.refine_gap;
    d["refinements"] = tr.refinements;
    d["dr"] = tr.dr;
    d["dt"] = tr.dt;
    py::list snaps;
    for (const auto& s : tr.snapshots) {
        snaps.append(py::make_tuple(s.t, s.values));
    }
    d["snapshots"] = snaps;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Damped wave blow-up laboratory";

    py::register_exception<quad::QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
    py::register_exception<lab::FitRefused>(m, "FitRefused", PyExc_RuntimeError);
    py::register_exception<lab::CoverageError>(m, "CoverageError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](int n, double mu, double alpha, double p, double epsilon) {
                 ModelParams mp{n, mu, alpha, p, epsilon};
                 return mp;
             }),
             py::arg("n") = 3, py::arg("mu") = 1.0, py::arg("alpha") = 0.0, py::arg("p") = 2.0,
             py::arg("epsilon") = 1.0)
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("p", &ModelParams::p)
        .def_readwrite("epsilon", &ModelParams::epsilon)
        .def("validate", &ModelParams::validate);

    py::class_<solver::GridSpec>(m, "GridSpec")
        .def(py::init([](double t_budget, double dr, double cfl, std::optional<double> r_max, double threshold) {
                 solver::GridSpec g;
                 g.t_budget = t_budget;
                 g.dr = dr;
                 g.cfl = cfl;
                 g.r_max = r_max ? *r_max : solver::GridSpec::containing_radius(t_budget, dr);
                 g.blowup_threshold = threshold;
                 return g;
             }),
             py::arg("t_budget") = 50.0, py::arg("dr") = 1.0 / 200.0, py::arg("cfl") = 0.5,
             py::arg("r_max") = py::none(), py::arg("blowup_threshold") = 1e6)
        .def_readwrite("r_max", &solver::GridSpec::r_max)
        .def_readwrite("dr", &solver::GridSpec::dr)
        .def_readwrite("cfl", &solver::GridSpec::cfl)
        .def_readwrite("t_budget", &solver::GridSpec::t_budget)
        .def_readwrite("blowup_threshold", &solver::GridSpec::blowup_threshold)
        .def("validate", &solver::GridSpec::validate);

    m.def("gamma_quadratic", &exponents::gamma_quadratic, py::arg("n"), py::arg("mu"), py::arg("alpha"), py::arg("p"));
    m.def("p_strauss", &exponents::p_strauss, py::arg("n"), py::arg("mu"), py::arg("alpha"));
    m.def("p_fujita", &exponents::p_fujita, py::arg("n"), py::arg("alpha"));
    m.def("mu_star", &exponents::mu_star, py::arg("n"), py::arg("alpha"));
    m.def(
        "q_exponent",
        [](double n, double mu, double alpha, double p) {
            const auto q = exponents::q_exponent(n, mu, alpha, p);
            return py::make_tuple(q.left, q.right);
        },
        py::arg("n"), py::arg("mu"), py::arg("alpha"), py::arg("p"));
    m.def(
        "check_hypotheses",
        [](const ModelParams& params) {
            const auto rep = exponents::check_hypotheses(params);
            py::dict d;
            d["p_S"] = rep.p_S;
            d["p_F"] = rep.p_F;
            d["mu_star"] = rep.mu_star;
            d["q_left"] = rep.q_left;
            d["q_right"] = rep.q_right;
            d["gamma_at_p"] = rep.gamma_at_p;
            d["critical"] = rep.critical;
            py::dict hyps;
            for (const auto& h : rep.hypotheses) {
                hyps[py::str(h.name)] = h.passed;
            }
            d["hypotheses"] = hyps;
            return d;
        },
        py::arg("params"));

    m.def(
        "bessel_k", [](double nu, double z) { return special::bessel_k(nu, z); }, py::arg("nu"), py::arg("z"));
    m.def(
        "h_eval",
        [](double t, double mu) {
            const auto h = special::h_eval(t, mu);
            return py::make_tuple(h.value, h.derivative);
        },
        py::arg("t"), py::arg("mu"));
    m.def("h_limit_constant", &special::h_limit_constant, py::arg("mu"));

    m.def(
        "b_q",
        [](double t, double r, double n, double mu, double alpha, std::optional<double> p) {
            const auto tp = p ? testfn::TestFunctionParams::make(n, mu, alpha, *p)
                              : testfn::TestFunctionParams::critical(n, mu, alpha);
            return testfn::b_q_eval(t, r, tp).value;
        },
        py::arg("t"), py::arg("r"), py::arg("n") = 3.0, py::arg("mu") = 1.0, py::arg("alpha") = 0.0,
        py::arg("p") = py::none());
    m.def(
        "b_q_pde_residual",
        [](double t, double r, double n, double mu, double alpha) {
            return testfn::b_q_pde_residual(t, r, testfn::TestFunctionParams::critical(n, mu, alpha)).residual;
        },
        py::arg("t"), py::arg("r"), py::arg("n") = 3.0, py::arg("mu") = 1.0, py::arg("alpha") = 0.0);

    m.def(
        "solve",
        [](const ModelParams& params, const solver::GridSpec& grid, bool nonlinear, int sample_every,
           std::vector<double> snapshot_times) {
            solver::SolveOptions opt;
            opt.nonlinear = nonlinear;
            opt.sample_every = sample_every;
            opt.snapshot_times = std::move(snapshot_times);
            py::gil_scoped_release release;
            auto tr = solver::solve(solver::InitialProfile::canonical_bump(), params, grid, opt);
            py::gil_scoped_acquire acquire;
            return trace_dict(tr);
        },
        py::arg("params"), py::arg("grid"), py::arg("nonlinear") = true, py::arg("sample_every") = 10,
        py::arg("snapshot_times") = std::vector<double>{});
    m.def(
        "picard_solve",
        [](const ModelParams& params, double T_small, int max_iter, const solver::GridSpec& grid) {
            const auto r = solver::picard_solve(solver::InitialProfile::canonical_bump(), params, T_small, max_iter, grid);
            py::dict d;
            d["gaps"] = r.gaps;
            d["contracting"] = r.contracting;
            d["t_final"] = r.t_final;
            d["final_values"] = r.final_values;
            return d;
        },
        py::arg("params"), py::arg("T_small"), py::arg("max_iter"), py::arg("grid"));

    m.def("bernoulli_blowup_s", &lab::bernoulli_blowup_s, py::arg("p"), py::arg("c1"), py::arg("s0"), py::arg("Y0"));
    m.def(
        "extremal_ode_lifespan",
        [](double p, double eps, double c0, double c1, double s_start) {
            const auto r = lab::extremal_ode_lifespan(p, eps, c0, c1, s_start);
            return py::make_tuple(r.s_numeric, r.s_closed);
        },
        py::arg("p"), py::arg("eps"), py::arg("c0") = 1.0, py::arg("c1") = 1.0, py::arg("s_start") = 2.0);
    m.def(
        "fit_line",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            const auto f = lab::fit_line(x, y);
            return py::make_tuple(f.slope, f.intercept, f.r2);
        },
        py::arg("x"), py::arg("y"));
}
