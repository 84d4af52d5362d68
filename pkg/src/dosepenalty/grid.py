"""Uniform space-time grid on (0, T) x [x_left, x_right], regions and discrete L2 pairings.

Spatial quadrature is the trapezoidal rule on the nodes, temporal quadrature
the rectangle rule on the ``nt`` computed time levels (the initial level is
not stored). The control-space pairing lives with the heat model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np


class ConfigurationError(ValueError):
    """Invalid problem setup (dimensions, intervals, parameters)."""


class DimensionError(ValueError):
    """Array shapes do not conform to the grid or region."""


@dataclass(frozen=True)
class SpaceTimeGrid:
    x_left: float
    x_right: float
    nx: int
    T: float
    nt: int

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return self.T / self.nt

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nt, self.nx)

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.nx)

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal spatial weights: dx/2 at the two boundary nodes, dx elsewhere."""
        w = np.full(self.nx, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    @property
    def times(self) -> np.ndarray:
        """Times t_1..t_nt of the stored levels."""
        return self.dt * np.arange(1, self.nt + 1)

    def check(self, a: np.ndarray, name: str = "array") -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != self.shape:
            raise DimensionError(f"{name} has shape {a.shape}, expected {self.shape}")
        return a


def build_grid(x_left: float, x_right: float, nx: int, T: float, nt: int) -> SpaceTimeGrid:
    if int(nx) != nx or nx < 3:
        raise ConfigurationError(f"nx must be an integer >= 3, got {nx}")
    if int(nt) != nt or nt < 1:
        raise ConfigurationError(f"nt must be an integer >= 1, got {nt}")
    if not x_right > x_left:
        raise ConfigurationError(f"empty domain [{x_left}, {x_right}]")
    if not T > 0:
        raise ConfigurationError(f"time horizon must be positive, got T={T}")
    return SpaceTimeGrid(float(x_left), float(x_right), int(nx), float(T), int(nt))


@dataclass(frozen=True, eq=False)
class Region:
    """Finite union of closed intervals minus optional excluded closed intervals.

    The node mask is inclusive on ``intervals`` and exclusive on ``excluded``, so
    ``[-0.45, 0.45]`` minus ``[-0.2, 0.2]`` does not contain the nodes at +-0.2.
    """

    intervals: tuple[tuple[float, float], ...]
    grid: SpaceTimeGrid = field(repr=False)
    mask: np.ndarray = field(repr=False)
    excluded: tuple[tuple[float, float], ...] = ()

    @property
    def measure(self) -> float:
        total = sum(b - a for a, b in self.intervals)
        cut = sum(max(0.0, min(b, d) - max(a, c)) for a, b in self.intervals for c, d in self.excluded)
        return float(total - cut)

    @cached_property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal weights of the masked nodes (global weights restricted)."""
        return self.grid.weights[self.mask]

    @property
    def discrete_measure(self) -> float:
        return float(self.weights.sum())

    def same_as(self, other: "Region") -> bool:
        return self.grid == other.grid and np.array_equal(self.mask, other.mask)


def _normalize_intervals(intervals: Sequence[Sequence[float]]) -> tuple[tuple[float, float], ...]:
    out = []
    for iv in intervals:
        if len(iv) != 2:
            raise ConfigurationError(f"interval {iv!r} must have exactly two endpoints")
        a, b = float(iv[0]), float(iv[1])
        if not b >= a:
            raise ConfigurationError(f"interval [{a}, {b}] has right end before left end")
        out.append((a, b))
    out.sort()
    for (a0, b0), (a1, b1) in zip(out, out[1:]):
        if a1 < b0:
            raise ConfigurationError(f"intervals [{a0}, {b0}] and [{a1}, {b1}] overlap")
    return tuple(out)


def make_region(
    grid: SpaceTimeGrid,
    intervals: Sequence[Sequence[float]],
    excluded: Sequence[Sequence[float]] = (),
) -> Region:
    """Region from closed intervals; node membership is inclusive up to 1e-12*dx."""
    ivs = _normalize_intervals(intervals)
    exc = _normalize_intervals(excluded)
    tol = 1e-12 * grid.dx
    for a, b in ivs:
        if a < grid.x_left - tol or b > grid.x_right + tol:
            raise ConfigurationError(
                f"interval [{a}, {b}] not contained in [{grid.x_left}, {grid.x_right}]"
            )
    x = grid.x
    mask = np.zeros(grid.nx, dtype=bool)
    for a, b in ivs:
        mask |= (x >= a - tol) & (x <= b + tol)
    for a, b in exc:
        mask &= ~((x >= a - tol) & (x <= b + tol))
    mask.setflags(write=False)
    return Region(ivs, grid, mask, exc)


def _pieces(r: Region) -> list[tuple[float, float]]:
    out = list(r.intervals)
    for c, d in r.excluded:
        nxt = []
        for a, b in out:
            if d <= a or c >= b:
                nxt.append((a, b))
                continue
            if c > a:
                nxt.append((a, c))
            if d < b:
                nxt.append((d, b))
        out = nxt
    return out


def regions_overlap(r1: Region, r2: Region) -> bool:
    """True if the two regions share a set of positive length."""
    return any(
        min(b0, b1) > max(a0, a1) for a0, b0 in _pieces(r1) for a1, b1 in _pieces(r2)
    )


@dataclass(frozen=True, eq=False)
class DoseField:
    """Values of a spatial function on the masked nodes of a region."""

    region: Region
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.region.size,):
            raise DimensionError(
                f"dose field has shape {v.shape}, region has {self.region.size} nodes"
            )
        object.__setattr__(self, "values", v)

    def to_nodes(self, fill: float = 0.0) -> np.ndarray:
        """Scatter to a full nodal array."""
        out = np.full(self.region.grid.nx, fill)
        out[self.region.mask] = self.values
        return out


def inner_product_Q(a: np.ndarray, b: np.ndarray, grid: SpaceTimeGrid) -> float:
    """Discrete L2(Q) pairing: sum_k sum_i a[k,i] b[k,i] w_i dt."""
    a = grid.check(a, "a")
    b = grid.check(b, "b")
    return float(grid.dt * np.einsum("ki,ki,i->", a, b, grid.weights))


def norm_Q(a: np.ndarray, grid: SpaceTimeGrid) -> float:
    return float(np.sqrt(inner_product_Q(a, a, grid)))


def inner_product_region(a: DoseField, b: DoseField) -> float:
    """Discrete L2(omega) pairing with the trapezoidal weights restricted to the region."""
    if not a.region.same_as(b.region):
        raise DimensionError("dose fields live on different regions")
    return float(np.sum(a.values * b.values * a.region.weights))


def norm_region(a: DoseField) -> float:
    return float(np.sqrt(inner_product_region(a, a)))
