# Copyright (c) 2026 The epdlab authors
#
# SPDX-License-Identifier: Apache-2.0

"""Damped wave blow-up laboratory."""

from ._core import (
    CoverageError,
    FitRefused,
    GridSpec,
    ModelParams,
    QuadratureError,
    b_q,
    b_q_pde_residual,
    bernoulli_blowup_s,
    bessel_k,
    check_hypotheses,
    extremal_ode_lifespan,
    fit_line,
    gamma_quadratic,
    h_eval,
    h_limit_constant,
    mu_star,
    p_fujita,
    p_strauss,
    picard_solve,
    q_exponent,
    solve,
)

__all__ = [
    "CoverageError",
    "FitRefused",
    "GridSpec",
    "ModelParams",
    "QuadratureError",
    "b_q",
    "b_q_pde_residual",
    "bernoulli_blowup_s",
    "bessel_k",
    "check_hypotheses",
    "extremal_ode_lifespan",
    "fit_line",
    "gamma_quadratic",
    "h_eval",
    "h_limit_constant",
    "mu_star",
    "p_fujita",
    "p_strauss",
    "picard_solve",
    "q_exponent",
    "solve",
]
