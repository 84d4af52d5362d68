"""CSV and summary files written by the experiment drivers.

Reals are written with 17 significant digits so that files round-trip exactly;
the percentage columns of homotopy tables are rounded to two decimals. Data
files never contain timestamps, so identical runs give identical bytes.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dose import DvhCurve, dvh_curve
from .grid import DoseField, Region, SpaceTimeGrid
from .homotopy import HomotopyRecord
from .penalty import PenaltyConfig
from .ssn import SsnTrace


class ReportError(OSError):
    """A report file could not be written or read."""


def fmt(x: float) -> str:
    return "%.17g" % x


def _write_rows(path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def write_dose_profile(path, grid: SpaceTimeGrid, dose: np.ndarray, config: PenaltyConfig,
                       target: Region, risk: Region) -> Path:
    """One row per node: x, dose over the whole domain, U on omega_T and L on omega_R.

    Level columns are left empty off their region.
    """
    dose = np.asarray(dose, dtype=float)
    if dose.shape != (grid.nx,):
        raise ValueError(f"dose has shape {dose.shape}, expected ({grid.nx},)")
    rows = (
        (fmt(x), fmt(d), fmt(config.U) if t else "", fmt(config.L) if r else "")
        for x, d, t, r in zip(grid.x, dose, target.mask, risk.mask)
    )
    return _write_rows(path, ("x", "dose", "target_level", "risk_level"), rows)


def default_dvh_levels(config: PenaltyConfig, n: int = 200) -> np.ndarray:
    return np.linspace(0.0, 1.2 * config.U, n)


def dvh_pair(dose_R: DoseField, dose_T: DoseField, levels) -> tuple[DvhCurve, DvhCurve]:
    return dvh_curve(dose_R, levels), dvh_curve(dose_T, levels)


def write_dvh(path, curve_R: DvhCurve, curve_T: DvhCurve) -> Path:
    if not np.array_equal(curve_R.levels, curve_T.levels):
        raise ValueError("DVH curves must share the level grid")
    rows = ((fmt(l), fmt(a), fmt(b)) for l, a, b in zip(curve_R.levels, curve_R.fraction, curve_T.fraction))
    return _write_rows(path, ("level", "fraction_risk", "fraction_target"), rows)


def _pct(f: float) -> str:
    return "" if math.isnan(f) else "%.2f" % (100.0 * f)


def write_homotopy_table(path, records: Sequence[HomotopyRecord]) -> Path:
    rows = (
        (fmt(r.gamma_ratio), str(r.ssn_iters), _pct(r.frac_risk_above_L),
         _pct(r.frac_target_below_U), str(bool(r.converged)).lower())
        for r in records
    )
    return _write_rows(
        path, ("gamma_ratio", "ssn_iters", "pct_risk_above_L", "pct_target_below_U", "converged"), rows
    )


def write_ssn_trace(path, trace: SsnTrace) -> Path:
    rows = ((str(s.k), fmt(s.tau), fmt(s.residual)) for s in trace.steps)
    return _write_rows(path, ("k", "tau", "residual"), rows)


def read_csv(path) -> list[dict[str, str]]:
    try:
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------- run summary


@dataclass
class RunSummary:
    """Everything needed to identify and judge a run.

    ``config`` holds the experiment configuration flattened to strings
    (section -> key -> value), ``gamma_history`` the (gamma_ratio, converged)
    pairs in schedule order.
    """

    mode: str
    config: dict[str, dict[str, str]]
    gamma0: float
    reduction: float
    gamma_min_factor: float
    final_gamma_ratio: float
    frac_risk_above_L: float
    frac_target_below_U: float
    wall_time: float
    gamma_history: list[tuple[float, bool]] = field(default_factory=list)
    started: str = ""

    @property
    def any_converged(self) -> bool:
        return any(c for _, c in self.gamma_history)


def write_summary(path, s: RunSummary) -> Path:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["run"] = {
        "mode": s.mode,
        "started": s.started,
        "wall_time": fmt(s.wall_time),
        "gamma0": fmt(s.gamma0),
        "reduction": fmt(s.reduction),
        "gamma_min_factor": fmt(s.gamma_min_factor),
        "final_gamma_ratio": fmt(s.final_gamma_ratio),
        "frac_risk_above_L": fmt(s.frac_risk_above_L),
        "frac_target_below_U": fmt(s.frac_target_below_U),
    }
    cp["gamma_history"] = {
        str(i): f"{fmt(g)} {str(c).lower()}" for i, (g, c) in enumerate(s.gamma_history)
    }
    for sec, items in s.config.items():
        cp[f"config.{sec}"] = dict(items)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            cp.write(fh)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def read_summary(path) -> RunSummary:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(path):
        raise ReportError(f"cannot read {path}")
    run = cp["run"]
    hist = []
    for _, v in sorted(cp["gamma_history"].items(), key=lambda kv: int(kv[0])):
        g, c = v.split()
        hist.append((float(g), c == "true"))
    config = {
        sec.split(".", 1)[1]: dict(cp[sec]) for sec in cp.sections() if sec.startswith("config.")
    }
    return RunSummary(
        mode=run["mode"],
        config=config,
        gamma0=float(run["gamma0"]),
        reduction=float(run["reduction"]),
        gamma_min_factor=float(run["gamma_min_factor"]),
        final_gamma_ratio=float(run["final_gamma_ratio"]),
        frac_risk_above_L=float(run["frac_risk_above_L"]),
        frac_target_below_U=float(run["frac_target_below_U"]),
        wall_time=float(run["wall_time"]),
        gamma_history=hist,
        started=run["started"],
    )
