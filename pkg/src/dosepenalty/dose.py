"""Accumulated dose C_omega y = int_0^T y dt on a region, its adjoint, and dose-volume metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ConfigurationError, DimensionError, DoseField, Region, SpaceTimeGrid


@dataclass(frozen=True, eq=False)
class DvhCurve:
    levels: np.ndarray
    fraction: np.ndarray


def apply_C(region: Region, y: np.ndarray, grid: SpaceTimeGrid) -> DoseField:
    y = grid.check(y, "state")
    if region.grid != grid:
        raise DimensionError("region was built on a different grid")
    return DoseField(region, grid.dt * y[:, region.mask].sum(axis=0))


def apply_C_adjoint(region: Region, mu: DoseField, grid: SpaceTimeGrid) -> np.ndarray:
    """mu extended by zero off the region, constant in time."""
    if not mu.region.same_as(region):
        raise DimensionError("multiplier does not live on this region")
    out = np.zeros(grid.shape)
    out[:, region.mask] = mu.values
    return out


def _fraction(dose: DoseField, hit: np.ndarray) -> float:
    w = dose.region.weights
    return float(w[hit].sum() / w.sum())


# Fractions are normalised by the discrete region mass sum(w_i) so that they lie in [0, 1].


def volume_fraction_above(dose: DoseField, level: float) -> float:
    """Weighted fraction of the region with dose strictly above ``level``."""
    return _fraction(dose, dose.values > level)


def volume_fraction_below(dose: DoseField, level: float) -> float:
    """Weighted fraction of the region with dose strictly below ``level``."""
    return _fraction(dose, dose.values < level)


def dvh_curve(dose: DoseField, levels) -> DvhCurve:
    """Cumulative dose-volume histogram: fraction receiving at least each level."""
    levels = np.asarray(levels, dtype=float).ravel()
    if levels.size > 1 and np.any(np.diff(levels) <= 0):
        raise ConfigurationError("DVH levels must be strictly increasing")
    w = dose.region.weights
    hits = dose.values[None, :] >= levels[:, None]
    fraction = (hits * w).sum(axis=1) / w.sum() if levels.size else np.zeros(0)
    return DvhCurve(levels, np.clip(fraction, 0.0, 1.0))
