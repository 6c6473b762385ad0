# Copyright (c) 2026 The epdlab authors
#
# SPDX-License-Identifier: Apache-2.0

import math

import pytest

import epdlab


def test_exponents():
    assert epdlab.p_strauss(3, 1, 0) == 2.0
    assert epdlab.mu_star(3, 0) == pytest.approx(2.8, rel=1e-15)
    assert epdlab.gamma_quadratic(3, 1, 0, 2) == 0.0
    left, right = epdlab.q_exponent(3, 1.5, 0, epdlab.p_strauss(3, 1.5, 0))
    assert left == pytest.approx(right)
    rep = epdlab.check_hypotheses(epdlab.ModelParams())
    assert rep["critical"]
    assert all(rep["hypotheses"].values())


def test_special_functions():
    z = 2.0
    assert epdlab.bessel_k(0.5, z) == pytest.approx(math.sqrt(math.pi / (2 * z)) * math.exp(-z), rel=1e-12)
    h, dh = epdlab.h_eval(1.0, 1.0)
    assert h > 0 and dh < 0
    assert epdlab.h_limit_constant(1.0) == pytest.approx(1.0)


def test_test_function():
    assert epdlab.b_q(2.0, 1.0) > 0
    assert abs(epdlab.b_q_pde_residual(2.0, 1.0, mu=1.5)) < 1e-6


def test_solve_and_picard():
    params = epdlab.ModelParams(epsilon=0.5)
    grid = epdlab.GridSpec(t_budget=1.0, dr=0.02)
    tr = epdlab.solve(params, grid, snapshot_times=[1.0])
    assert tr["verdict"] == "survived"
    assert len(tr["times"]) == len(tr["energy"])
    t, values = tr["snapshots"][-1]
    assert t == pytest.approx(1.0, abs=grid.dr)
    pic = epdlab.picard_solve(params, 0.25, 8, epdlab.GridSpec(t_budget=0.25, dr=0.02))
    assert pic["contracting"]


def test_invalid_grid_raises():
    params = epdlab.ModelParams()
    with pytest.raises(ValueError):
        epdlab.solve(params, epdlab.GridSpec(t_budget=10.0, dr=0.02, r_max=5.0))


def test_lifespan_tools():
    assert epdlab.bernoulli_blowup_s(2.0, 1.0, 1.0, 0.5) == pytest.approx(math.e**2)
    s_num, s_closed = epdlab.extremal_ode_lifespan(2.0, 0.5)
    assert s_num == pytest.approx(s_closed, rel=1e-6)
    slope, intercept, r2 = epdlab.fit_line([0, 1, 2], [1, 3, 5])
    assert slope == pytest.approx(2.0)
    with pytest.raises(epdlab.FitRefused):
        epdlab.fit_line([1.0], [1.0])
