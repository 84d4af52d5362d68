"""Implicit Euler control-to-state map for y_t - c y_xx = E u with homogeneous Dirichlet data.

Discretize-then-optimize: ``apply_S0_adjoint`` is the exact transpose of the
discrete forward map, taken with respect to the quadrature pairing on states
and the control-space pairing of the model on controls.

The control space carries either the ``nodal`` pairing sum_{k,i} u v (the
default; this is the scaling under which the reference tables are reproduced)
or the ``quadrature`` pairing sum_{k,i} u v w_i dt shared with the states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import lapack

from .grid import ConfigurationError, DimensionError, Region, SpaceTimeGrid


@dataclass(frozen=True, eq=False)
class HeatModel:
    grid: SpaceTimeGrid
    c: float
    y0: np.ndarray = field(repr=False)
    control_region: Region
    control_pairing: str = "nodal"

    def __post_init__(self):
        if self.control_pairing not in ("nodal", "quadrature"):
            raise ConfigurationError(f"unknown control pairing {self.control_pairing!r}")
        if not self.c > 0:
            raise ConfigurationError(f"diffusivity must be positive, got c={self.c}")
        y0 = np.broadcast_to(np.asarray(self.y0, dtype=float), (self.grid.nx,)).copy()
        if y0[0] != 0.0 or y0[-1] != 0.0:
            raise ConfigurationError("initial state must vanish at the Dirichlet boundary")
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        if self.control_region.grid != self.grid:
            raise DimensionError("control region was built on a different grid")

    @cached_property
    def _factor(self) -> tuple[np.ndarray, np.ndarray]:
        # LDL^T of I + dt*c*K on the interior nodes, K = tridiag(-1, 2, -1)/dx^2
        n = self.grid.nx - 2
        r = self.grid.dt * self.c / self.grid.dx**2
        d = np.full(n, 1.0 + 2.0 * r)
        e = np.full(max(n - 1, 0), -r)
        d, e, info = lapack.dpttrf(d, e)
        if info != 0:
            raise ConfigurationError(f"implicit Euler matrix not positive definite (info={info})")
        return d, e

    def _solve_step(self, rhs: np.ndarray) -> np.ndarray:
        d, e = self._factor
        x, info = lapack.dpttrs(d, e, rhs)
        return x

    def restrict(self, u: np.ndarray) -> np.ndarray:
        """Zero a space-time array outside the control region."""
        return np.where(self.control_region.mask, u, 0.0)

    @cached_property
    def control_weights(self) -> np.ndarray:
        """Nodal weights rho_i of the control pairing sum_k sum_i u v rho_i (zero off omega_C)."""
        g = self.grid
        rho = np.ones(g.nx) if self.control_pairing == "nodal" else g.weights * g.dt
        return np.where(self.control_region.mask, rho, 0.0)


def inner_product_V(a: np.ndarray, b: np.ndarray, model: HeatModel) -> float:
    """Control-space pairing."""
    g = model.grid
    a = g.check(a, "a")
    b = g.check(b, "b")
    return float(np.einsum("ki,ki,i->", a, b, model.control_weights))


def norm_V(a: np.ndarray, model: HeatModel) -> float:
    return float(np.sqrt(inner_product_V(a, a, model)))


def _forward(model: HeatModel, u: np.ndarray, y0: np.ndarray) -> np.ndarray:
    g = model.grid
    u = g.check(u, "control")
    src = g.dt * model.restrict(u)[:, 1:-1]
    y = np.zeros(g.shape)
    prev = y0[1:-1]
    for k in range(g.nt):
        prev = model._solve_step(prev + src[k])
        y[k, 1:-1] = prev
    return y


def solve_state(model: HeatModel, u: np.ndarray) -> np.ndarray:
    """State levels y^1..y^nt for control ``u`` (affine map S)."""
    return _forward(model, u, model.y0)


def apply_S0(model: HeatModel, u: np.ndarray) -> np.ndarray:
    """Linear part of S (zero initial state)."""
    return _forward(model, u, np.zeros(model.grid.nx))


def apply_S0_adjoint(model: HeatModel, w: np.ndarray) -> np.ndarray:
    """Adjoint of ``apply_S0``.

    Backward sweep p^k = M^{-1}(W w^k + p^{k+1}) with the state quadrature
    weights W, then dt*p divided by the control weights on omega_C.
    """
    g = model.grid
    w = g.check(w, "adjoint data")
    ww = (w * (g.weights * g.dt))[:, 1:-1]
    p = np.zeros(g.shape)
    nxt = np.zeros(g.nx - 2)
    for k in range(g.nt - 1, -1, -1):
        nxt = model._solve_step(ww[k] + nxt)
        p[k, 1:-1] = nxt
    rho = model.control_weights
    scale = np.divide(g.dt, rho, out=np.zeros_like(rho), where=rho > 0)
    return p * scale
