"""Pointwise convex calculus of the dose penalties.

g+(v) = max(v - L, 0) penalises dose above the risk level, g-(v) = max(U - v, 0)
dose below the target level. All maps act elementwise on scalars or arrays.
Closed intervals are used throughout, so ties at the kinks take the middle
(regularised) branch.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import ConfigurationError

PENALTY = "penalty"
CONSTRAINT = "constraint"


@dataclass(frozen=True)
class PenaltyConfig:
    """Objective weights, dose levels, control bounds and regularisation.

    ``beta1`` weighs the target term (dose below ``U`` on omega_T) and ``beta2``
    the risk term (dose above ``L`` on omega_R). In ``constraint`` mode both are
    ignored and the state constraints are penalised quadratically with 1/gamma.

    ``constraint_sum`` selects how that quadratic penalty is summed over the
    region nodes: ``nodal`` (plain sum, the scaling of the reference tables) or
    ``quadrature`` (trapezoidal weights, i.e. an L2(omega) norm).
    """

    alpha: float = 0.0
    beta1: float = 1.0
    beta2: float = 1.0
    U: float = 0.5
    L: float = 0.2
    u_min: float = 0.0
    u_max: float = 2.0
    gamma: float = 1.0
    mode: str = PENALTY
    constraint_sum: str = "nodal"

    def __post_init__(self):
        if self.mode not in (PENALTY, CONSTRAINT):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.constraint_sum not in ("nodal", "quadrature"):
            raise ConfigurationError(f"unknown constraint_sum {self.constraint_sum!r}")
        if not 0 < self.L < self.U:
            raise ConfigurationError(f"levels must satisfy 0 < L < U, got L={self.L}, U={self.U}")
        if not self.u_min < self.u_max:
            raise ConfigurationError("control bounds must satisfy u_min < u_max")
        if not self.gamma > 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        if not self.alpha >= 0:
            raise ConfigurationError(f"alpha must be nonnegative, got {self.alpha}")
        if self.mode == PENALTY and not (self.beta1 > 0 and self.beta2 > 0):
            raise ConfigurationError("beta1 and beta2 must be positive")

    def with_gamma(self, gamma: float) -> "PenaltyConfig":
        return replace(self, gamma=gamma)


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def g_plus(v, L):
    return _out(np.maximum(np.asarray(v, dtype=float) - L, 0.0))


def g_minus(v, U):
    return _out(np.maximum(U - np.asarray(v, dtype=float), 0.0))


def prox_g_plus(v, L, gamma):
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < L, v, np.where(v <= L + gamma, L, v - gamma)))


def prox_g_minus(v, U, gamma):
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < U - gamma, v + gamma, np.where(v <= U, U, v)))


def my_plus(v, L, gamma):
    """Moreau-Yosida regularisation of the subdifferential of g+."""
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < L, 0.0, np.where(v <= L + gamma, (v - L) / gamma, 1.0)))


def my_minus(v, U, gamma):
    """Moreau-Yosida regularisation of the subdifferential of g-."""
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < U - gamma, -1.0, np.where(v <= U, (v - U) / gamma, 0.0)))


def envelope_plus(v, L, gamma):
    """Moreau envelope of g+ (a one-sided Huber function)."""
    v = np.asarray(v, dtype=float)
    return _out(
        np.where(v < L, 0.0, np.where(v <= L + gamma, (v - L) ** 2 / (2 * gamma), v - L - gamma / 2))
    )


def envelope_minus(v, U, gamma):
    v = np.asarray(v, dtype=float)
    return _out(
        np.where(v < U - gamma, U - v - gamma / 2, np.where(v <= U, (v - U) ** 2 / (2 * gamma), 0.0))
    )


def chi_plus(v, L, gamma):
    """Newton derivative of my_plus, times gamma: indicator of [L, L+gamma]."""
    v = np.asarray(v, dtype=float)
    return _out(((v >= L) & (v <= L + gamma)).astype(float))


def chi_minus(v, U, gamma):
    v = np.asarray(v, dtype=float)
    return _out(((v >= U - gamma) & (v <= U)).astype(float))


def subdiff_plus_project(mu, v, L):
    """Closest element of the subdifferential of g+ at ``v`` to ``mu``."""
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < L, 0.0, np.where(v > L, 1.0, np.clip(mu, 0.0, 1.0))))


def subdiff_minus_project(mu, v, U):
    v = np.asarray(v, dtype=float)
    return _out(np.where(v < U, -1.0, np.where(v > U, 0.0, np.clip(mu, -1.0, 0.0))))


def project_admissible(v, u_min, u_max):
    return _out(np.clip(np.asarray(v, dtype=float), u_min, u_max))


def chi_admissible(v, u_min, u_max):
    v = np.asarray(v, dtype=float)
    return _out(((v >= u_min) & (v <= u_max)).astype(float))


# quadratic penalisation of the pointwise state constraints C_T y >= U, C_R y <= L


def risk_violation(v, L):
    return _out(np.maximum(np.asarray(v, dtype=float) - L, 0.0))


def target_violation(v, U):
    return _out(np.minimum(np.asarray(v, dtype=float) - U, 0.0))


def risk_violation_active(v, L):
    return _out((np.asarray(v, dtype=float) >= L).astype(float))


def target_violation_active(v, U):
    return _out((np.asarray(v, dtype=float) <= U).astype(float))
