"""Quadratic (Moreau-Yosida) penalisation of the pointwise dose constraints

    C_T y >= U on omega_T,   C_R y <= L on omega_R,

solved with the same semismooth Newton / continuation machinery. Used as the
comparison method; it locks up when the constraints are infeasible.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import penalty as pen
from .grid import norm_Q
from .heat import norm_V, solve_state
from .homotopy import HomotopySchedule, default_gamma0, run_homotopy
from .penalty import CONSTRAINT, PenaltyConfig
from .ssn import DoseProblem, SsnSettings, apply_newton_operator, constraint_scale, doses, eval_F, eval_T


def _box(config: PenaltyConfig) -> PenaltyConfig:
    return config if config.mode == CONSTRAINT else replace(config, mode=CONSTRAINT)


def eval_F_box(u, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    return eval_F(u, problem, _box(config))


def eval_T_box(u, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    return eval_T(u, problem, _box(config))


def apply_newton_operator_box(u_k, du, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    return apply_newton_operator(u_k, du, problem, _box(config))


def box_energy(u, problem: DoseProblem, config: PenaltyConfig) -> float:
    """1/2|u|^2 + alpha/2 |Su - z|^2 + 1/(2 gamma) (|(C_T Su - U)^-|^2 + |(C_R Su - L)^+|^2).

    The two squared violation norms are nodal sums or L2(omega) norms according
    to ``config.constraint_sum``.
    """
    c = config
    g = problem.grid
    y = solve_state(problem.model, u)
    dT, dR = doses(problem, y)
    val = 0.5 * norm_V(u, problem.model) ** 2
    if c.alpha:
        z = 0.0 if problem.z is None else problem.z
        val += 0.5 * c.alpha * norm_Q(y - z, g) ** 2
    for region, viol in ((problem.target, pen.target_violation(dT.values, c.U)),
                         (problem.risk, pen.risk_violation(dR.values, c.L))):
        w = region.weights * constraint_scale(region, c)
        val += np.sum(w * viol**2) / (2 * c.gamma)
    return float(val)


def run_box_experiment(problem: DoseProblem, config: PenaltyConfig,
                       settings: SsnSettings = SsnSettings(), gamma_min_factor: float = 1e-7,
                       callback=None):
    """Continuation from gamma0 = 1 down to gamma_min_factor, halving gamma."""
    cfg = _box(config)
    schedule = HomotopySchedule(default_gamma0(CONSTRAINT, cfg), 0.5, gamma_min_factor)
    return run_homotopy(problem, cfg, schedule, settings, callback=callback)
