"""Semismooth Newton method for the Moreau-Yosida regularised optimality system.

The reduced system is T(u) = u - proj_ad(-F(u)) = 0 with

    F(u) = S0^*( alpha (S u - z) + beta2 C_R^* h+(C_R S u) + beta1 C_T^* h-(C_T S u) ),

h+- being the regularised subdifferentials of the risk and target penalties.
In ``constraint`` mode the same machinery runs with the quadratic penalty
maps (1/gamma) max(C_R y - L, 0) and (1/gamma) min(C_T y - U, 0) instead.
Newton steps are computed matrix-free by GMRES in the control inner product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import penalty as pen
from .dose import apply_C, apply_C_adjoint
from .grid import DimensionError, DoseField, Region, norm_Q
from .heat import HeatModel, apply_S0, apply_S0_adjoint, norm_V, solve_state
from .krylov import gmres
from .penalty import CONSTRAINT, PenaltyConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DoseProblem:
    """Heat model together with target/risk regions and the desired state."""

    model: HeatModel
    target: Region
    risk: Region
    z: np.ndarray | None = None

    @property
    def grid(self):
        return self.model.grid

    def __post_init__(self):
        for r in (self.target, self.risk):
            if r.grid != self.model.grid:
                raise DimensionError("region was built on a different grid")
        if self.z is not None:
            object.__setattr__(self, "z", self.model.grid.check(self.z, "z"))


@dataclass(frozen=True)
class SsnSettings:
    max_iters: int = 100
    residual_tol: float = 1e-6
    krylov_max_iters: int = 3000
    krylov_tol: float = 1e-10
    ls_max_backtracks: int = 30
    ls_factor: float = 0.5
    max_stalled_steps: int = 2

    def __post_init__(self):
        if min(self.max_iters, self.krylov_max_iters, self.ls_max_backtracks, self.max_stalled_steps) < 0:
            raise pen.ConfigurationError("iteration limits must be nonnegative")
        if not (self.residual_tol > 0 and self.krylov_tol > 0):
            raise pen.ConfigurationError("tolerances must be positive")
        if not 0 < self.ls_factor < 1:
            raise pen.ConfigurationError("line search factor must lie in (0, 1)")


@dataclass(frozen=True)
class SsnStep:
    k: int
    tau: float
    residual: float
    krylov_iters: int


@dataclass
class SsnTrace:
    initial_residual: float
    steps: list[SsnStep] = field(default_factory=list)
    converged: bool = False
    reason: str = ""

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def final_residual(self) -> float:
        return self.steps[-1].residual if self.steps else self.initial_residual


# ---------------------------------------------------------------- evaluation


def doses(problem: DoseProblem, y: np.ndarray) -> tuple[DoseField, DoseField]:
    """(C_T y, C_R y)."""
    g = problem.grid
    return apply_C(problem.target, y, g), apply_C(problem.risk, y, g)


def constraint_scale(region: Region, config: PenaltyConfig) -> np.ndarray | float:
    """Per-node factor turning the quadrature-weighted sum into the configured one."""
    return 1.0 / region.weights if config.constraint_sum == "nodal" else 1.0


def _multipliers(dT: DoseField, dR: DoseField, config: PenaltyConfig):
    """Weighted pointwise terms entering F on omega_T and omega_R."""
    c = config
    if c.mode == CONSTRAINT:
        return (
            pen.target_violation(dT.values, c.U) / c.gamma * constraint_scale(dT.region, c),
            pen.risk_violation(dR.values, c.L) / c.gamma * constraint_scale(dR.region, c),
        )
    return (
        c.beta1 * pen.my_minus(dT.values, c.U, c.gamma),
        c.beta2 * pen.my_plus(dR.values, c.L, c.gamma),
    )


def _curvatures(dT: DoseField, dR: DoseField, config: PenaltyConfig):
    """Newton derivatives of the pointwise terms (frozen diagonal weights)."""
    c = config
    if c.mode == CONSTRAINT:
        return (
            pen.target_violation_active(dT.values, c.U) / c.gamma * constraint_scale(dT.region, c),
            pen.risk_violation_active(dR.values, c.L) / c.gamma * constraint_scale(dR.region, c),
        )
    return (
        c.beta1 / c.gamma * pen.chi_minus(dT.values, c.U, c.gamma),
        c.beta2 / c.gamma * pen.chi_plus(dR.values, c.L, c.gamma),
    )


def _tracking(problem: DoseProblem, y: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0:
        return np.zeros_like(y)
    z = 0.0 if problem.z is None else problem.z
    return alpha * (y - z)


def _F_from_state(problem: DoseProblem, config: PenaltyConfig, y: np.ndarray) -> np.ndarray:
    g = problem.grid
    dT, dR = doses(problem, y)
    mT, mR = _multipliers(dT, dR, config)
    w = _tracking(problem, y, config.alpha)
    w += apply_C_adjoint(problem.target, DoseField(problem.target, mT), g)
    w += apply_C_adjoint(problem.risk, DoseField(problem.risk, mR), g)
    return apply_S0_adjoint(problem.model, w)


def eval_F(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    return _F_from_state(problem, config, solve_state(problem.model, u))


def _T_from_F(u, F, problem, config):
    return problem.model.restrict(u - pen.project_admissible(-F, config.u_min, config.u_max))


def eval_T(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    """Residual of the regularised optimality system in the control space."""
    return _T_from_F(u, eval_F(u, problem, config), problem, config)


def residual_norm(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> float:
    return norm_V(eval_T(u, problem, config), problem.model)


# ---------------------------------------------------------------- Newton system


class NewtonOperator:
    """Id + chi_ad(-F(u_k)) D_N F(u_k), with all activity masks frozen at u_k."""

    def __init__(self, u_k: np.ndarray, problem: DoseProblem, config: PenaltyConfig):
        self.problem = problem
        self.config = config
        y = solve_state(problem.model, u_k)
        dT, dR = doses(problem, y)
        self.curv_T, self.curv_R = _curvatures(dT, dR, config)
        self.F = _F_from_state(problem, config, y)
        self.residual = _T_from_F(u_k, self.F, problem, config)
        self.chi_ad = problem.model.restrict(pen.chi_admissible(-self.F, config.u_min, config.u_max))
        g = problem.grid
        cmask = problem.model.control_region.mask
        self._cmask = cmask
        self.weights = np.tile(problem.model.control_weights[cmask], g.nt)

    @property
    def is_identity(self) -> bool:
        return self.config.alpha == 0 and not (self.curv_T.any() or self.curv_R.any())

    def __call__(self, du: np.ndarray) -> np.ndarray:
        p, c = self.problem, self.config
        g = p.grid
        if not self.chi_ad.any() or self.is_identity:
            return np.array(du, dtype=float)
        dy = apply_S0(p.model, du)
        w = c.alpha * dy if c.alpha else np.zeros_like(dy)
        dT, dR = doses(p, dy)
        w += apply_C_adjoint(p.target, DoseField(p.target, self.curv_T * dT.values), g)
        w += apply_C_adjoint(p.risk, DoseField(p.risk, self.curv_R * dR.values), g)
        return du + self.chi_ad * apply_S0_adjoint(p.model, w)

    def pack(self, a: np.ndarray) -> np.ndarray:
        return a[:, self._cmask].ravel()

    def unpack(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.problem.grid.shape)
        out[:, self._cmask] = v.reshape(self.problem.grid.nt, -1)
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.pack(self(self.unpack(v)))


def apply_newton_operator(u_k, du, problem: DoseProblem, config: PenaltyConfig) -> np.ndarray:
    return NewtonOperator(u_k, problem, config)(du)


def solve_newton_step(u_k, problem: DoseProblem, config: PenaltyConfig, settings: SsnSettings,
                      operator: NewtonOperator | None = None):
    """Newton update from GMRES on the frozen Newton operator; returns (du, krylov_iters)."""
    op = operator or NewtonOperator(u_k, problem, config)
    rhs = -op.pack(op.residual)
    if op.is_identity:
        return op.unpack(rhs), 1
    res = gmres(op.matvec, rhs, op.weights, tol=settings.krylov_tol, maxiter=settings.krylov_max_iters)
    if not res.converged:
        logger.info("GMRES stopped after %d iterations at relative residual %.2e",
                    res.iterations, res.residuals[-1] / res.residuals[0])
    return op.unpack(res.x), res.iterations


def ssn_solve(u0, problem: DoseProblem, config: PenaltyConfig, settings: SsnSettings = SsnSettings()):
    """Damped semismooth Newton iteration with residual-norm backtracking.

    A trial step is accepted when it does not increase the residual norm. After
    ``settings.max_stalled_steps`` consecutive accepted steps without decrease,
    strict decrease is required; this breaks the two-cycle between u = 0 and the
    projected bang-bang control that full steps produce from a cold start.

    Returns ``(u, trace)``; non-convergence is reported in the trace, not raised.
    """
    g = problem.grid
    u = problem.model.restrict(g.check(u0, "initial control"))
    op = NewtonOperator(u, problem, config)
    r = norm_V(op.residual, problem.model)
    trace = SsnTrace(r)
    stalled = 0
    for k in range(1, settings.max_iters + 1):
        if r < settings.residual_tol:
            break
        du, kits = solve_newton_step(u, problem, config, settings, op)
        strict = stalled >= settings.max_stalled_steps
        tau = 1.0
        for _ in range(settings.ls_max_backtracks + 1):
            u_new = u + tau * du
            op_new = NewtonOperator(u_new, problem, config)
            r_new = norm_V(op_new.residual, problem.model)
            if r_new < r or (r_new == r and not strict):
                break
            tau *= settings.ls_factor
        else:
            trace.reason = "line search failed"
            logger.debug("line search failed at iteration %d (residual %.3e)", k, r)
            return u, trace
        stalled = stalled + 1 if r_new >= r else 0
        u, op, r = u_new, op_new, r_new
        trace.steps.append(SsnStep(k, tau, r, kits))
        logger.debug("SSN %3d  tau %.3g  |T| %.3e  gmres %d", k, tau, r, kits)
    trace.converged = r < settings.residual_tol
    if not trace.converged:
        trace.reason = "iteration limit"
    return u, trace


# ---------------------------------------------------------------- certificates


def eval_unregularized_residual(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> float:
    """Violation of the unregularised optimality system at ``u``.

    The regularised multipliers are projected pointwise onto the subdifferentials
    at the current dose, then the projection equation is evaluated.
    """
    c = config
    g = problem.grid
    y = solve_state(problem.model, u)
    dT, dR = doses(problem, y)
    muT = pen.subdiff_minus_project(pen.my_minus(dT.values, c.U, c.gamma), dT.values, c.U)
    muR = pen.subdiff_plus_project(pen.my_plus(dR.values, c.L, c.gamma), dR.values, c.L)
    w = _tracking(problem, y, c.alpha)
    w += apply_C_adjoint(problem.target, DoseField(problem.target, c.beta1 * muT), g)
    w += apply_C_adjoint(problem.risk, DoseField(problem.risk, c.beta2 * muR), g)
    F = apply_S0_adjoint(problem.model, w)
    return norm_V(_T_from_F(u, F, problem, c), problem.model)


def regularized_energy(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> float:
    """Objective whose stationarity system is T(u) = 0 (penalty mode)."""
    c = config
    g = problem.grid
    y = solve_state(problem.model, u)
    dT, dR = doses(problem, y)
    val = 0.5 * norm_V(u, problem.model) ** 2
    if c.alpha:
        z = 0.0 if problem.z is None else problem.z
        val += 0.5 * c.alpha * norm_Q(y - z, g) ** 2
    val += c.beta1 * np.sum(problem.target.weights * pen.envelope_minus(dT.values, c.U, c.gamma))
    val += c.beta2 * np.sum(problem.risk.weights * pen.envelope_plus(dR.values, c.L, c.gamma))
    return float(val)
