"""Continuation in the regularisation parameter gamma with warm starts."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dose import volume_fraction_above, volume_fraction_below
from .heat import solve_state
from .penalty import CONSTRAINT, PENALTY, ConfigurationError, PenaltyConfig
from .ssn import DoseProblem, SsnSettings, SsnTrace, doses, ssn_solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomotopySchedule:
    gamma0: float
    reduction: float = 0.5
    gamma_min_factor: float = 1e-10

    def __post_init__(self):
        if not self.gamma0 > 0:
            raise ConfigurationError(f"gamma0 must be positive, got {self.gamma0}")
        if not 0 < self.reduction < 1:
            raise ConfigurationError(f"reduction must lie in (0, 1), got {self.reduction}")
        if not 0 < self.gamma_min_factor <= 1:
            raise ConfigurationError(f"gamma_min_factor must lie in (0, 1], got {self.gamma_min_factor}")

    def ratios(self) -> list[float]:
        """gamma/gamma0 = reduction**j for all j with ratio >= gamma_min_factor."""
        out, j = [], 0
        while True:
            r = self.reduction**j
            if r < self.gamma_min_factor * (1 - 1e-12):
                return out
            out.append(r)
            j += 1


@dataclass
class HomotopyRecord:
    gamma: float
    gamma_ratio: float
    ssn_iters: int
    converged: bool
    frac_risk_above_L: float = float("nan")
    frac_target_below_U: float = float("nan")
    final_residual: float = float("nan")
    trace: SsnTrace | None = field(default=None, repr=False, compare=False)


def default_gamma0(mode: str, config: PenaltyConfig) -> float:
    if mode == PENALTY:
        return max(config.beta1, config.beta2)
    if mode == CONSTRAINT:
        return 1.0
    raise ConfigurationError(f"unknown mode {mode!r}")


def dose_metrics(u: np.ndarray, problem: DoseProblem, config: PenaltyConfig) -> tuple[float, float]:
    """(fraction of omega_R above L, fraction of omega_T below U)."""
    dT, dR = doses(problem, solve_state(problem.model, u))
    return volume_fraction_above(dR, config.L), volume_fraction_below(dT, config.U)


def run_homotopy(
    problem: DoseProblem,
    config: PenaltyConfig,
    schedule: HomotopySchedule,
    settings: SsnSettings = SsnSettings(),
    u0: np.ndarray | None = None,
    callback=None,
):
    """Solve along gamma_j = gamma0 * reduction**j, warm-starting each solve.

    Stops at the first gamma where SSN fails; that gamma is still recorded with
    ``converged=False``. Returns the last converged control (``None`` if the
    very first solve failed) and the list of records.
    """
    u = np.zeros(problem.grid.shape) if u0 is None else np.array(u0, dtype=float)
    u_conv = None
    records: list[HomotopyRecord] = []
    for ratio in schedule.ratios():
        gamma = schedule.gamma0 * ratio
        cfg = config.with_gamma(gamma)
        u_new, trace = ssn_solve(u, problem, cfg, settings)
        rec = HomotopyRecord(gamma, ratio, trace.iterations, trace.converged,
                             final_residual=trace.final_residual, trace=trace)
        if trace.converged:
            rec.frac_risk_above_L, rec.frac_target_below_U = dose_metrics(u_new, problem, cfg)
            u = u_conv = u_new
        records.append(rec)
        logger.info("gamma/gamma0 %.3e  ssn %3d  risk>L %6.2f%%  target<U %6.2f%%  %s",
                    ratio, rec.ssn_iters, 100 * rec.frac_risk_above_L,
                    100 * rec.frac_target_below_U, "" if trace.converged else "(failed)")
        if callback is not None:
            callback(rec, u_new)
        if not trace.converged:
            break
    return u_conv, records
