"""Command line driver.

    python -m dosepenalty penalty     [--config FILE] [--out DIR] [overrides]
    python -m dosepenalty constraint  ...
    python -m dosepenalty compare     ...
    python -m dosepenalty beta-sweep  ...

Each run writes homotopy.csv, ssn_trace.csv (last converged gamma),
dose_profile.csv, dvh.csv, config.ini and summary.ini into its output
directory and prints one line per gamma. Exit status: 0 if at least one gamma
converged, 1 if none did, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import report
from .boxpen import run_box_experiment
from .config import ExperimentConfig, build_experiment, load_config, to_sections, write_config
from .dose import apply_C
from .grid import ConfigurationError, DimensionError, make_region
from .heat import solve_state
from .homotopy import HomotopyRecord, HomotopySchedule, default_gamma0, run_homotopy
from .penalty import CONSTRAINT, PENALTY
from .ssn import doses

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunResult:
    mode: str
    out_dir: Path
    records: list[HomotopyRecord]
    u: np.ndarray | None
    summary: report.RunSummary

    @property
    def converged(self) -> list[HomotopyRecord]:
        return [r for r in self.records if r.converged]

    @property
    def final(self) -> HomotopyRecord | None:
        conv = self.converged
        return conv[-1] if conv else None


def _print_record(rec: HomotopyRecord, stream=None) -> None:
    stream = stream or sys.stdout
    if rec.converged:
        print(f"gamma/gamma0 {rec.gamma_ratio:.3e}  ssn {rec.ssn_iters:3d}  "
              f"risk>L {100 * rec.frac_risk_above_L:6.2f}%  target<U {100 * rec.frac_target_below_U:6.2f}%",
              file=stream)
    else:
        print(f"gamma/gamma0 {rec.gamma_ratio:.3e}  ssn {rec.ssn_iters:3d}  not converged "
              f"({rec.trace.reason if rec.trace else ''})", file=stream)


def run_single(cfg: ExperimentConfig, mode: str, out_dir, stream=None) -> RunResult:
    """One homotopy run in ``penalty`` or ``constraint`` mode with all report files."""
    out = Path(out_dir)
    exp = build_experiment(cfg)
    p = exp.problem
    pen = exp.penalty
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    t0 = time.perf_counter()
    cb = lambda rec, u: _print_record(rec, stream)  # noqa: E731
    if mode == PENALTY:
        gamma_min = cfg.gamma_min_factor
        schedule = HomotopySchedule(default_gamma0(PENALTY, pen), cfg.reduction, gamma_min)
        u, records = run_homotopy(p, pen, schedule, exp.settings, callback=cb)
    elif mode == CONSTRAINT:
        gamma_min = cfg.box_gamma_min_factor
        schedule = HomotopySchedule(1.0, cfg.reduction, gamma_min)
        u, records = run_box_experiment(p, pen, exp.settings, gamma_min, callback=cb)
    else:
        raise ConfigurationError(f"unknown mode {mode!r}")
    wall = time.perf_counter() - t0

    report.write_homotopy_table(out / "homotopy.csv", records)
    conv = [r for r in records if r.converged]
    final = conv[-1] if conv else None
    if final is not None:
        report.write_ssn_trace(out / "ssn_trace.csv", final.trace)
        y = solve_state(p.model, u)
        everywhere = make_region(p.grid, [(p.grid.x_left, p.grid.x_right)])
        full_dose = apply_C(everywhere, y, p.grid).values
        report.write_dose_profile(out / "dose_profile.csv", p.grid, full_dose, pen, p.target, p.risk)
        dT, dR = doses(p, y)
        levels = report.default_dvh_levels(pen, cfg.dvh_levels)
        report.write_dvh(out / "dvh.csv", *report.dvh_pair(dR, dT, levels))
    write_config(out / "config.ini", cfg)
    summary = report.RunSummary(
        mode=mode,
        config=to_sections(cfg),
        gamma0=schedule.gamma0,
        reduction=schedule.reduction,
        gamma_min_factor=schedule.gamma_min_factor,
        final_gamma_ratio=final.gamma_ratio if final else float("nan"),
        frac_risk_above_L=final.frac_risk_above_L if final else float("nan"),
        frac_target_below_U=final.frac_target_below_U if final else float("nan"),
        wall_time=wall,
        gamma_history=[(r.gamma_ratio, r.converged) for r in records],
        started=started,
    )
    report.write_summary(out / "summary.ini", summary)
    return RunResult(mode, out, records, u, summary)


def _final_row(label: str, res: RunResult) -> list[str]:
    f = res.final
    if f is None:
        return [label, res.mode, "", "", "", "", "0"]
    return [label, res.mode, report.fmt(f.gamma_ratio), str(f.ssn_iters),
            "%.2f" % (100 * f.frac_risk_above_L), "%.2f" % (100 * f.frac_target_below_U),
            str(len(res.converged))]


_COMBINED_HEADER = ["label", "mode", "final_gamma_ratio", "ssn_iters", "pct_risk_above_L",
                    "pct_target_below_U", "converged_gammas"]


def _write_combined(path: Path, rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_COMBINED_HEADER)
        w.writerows(rows)


def run_compare(cfg: ExperimentConfig, out_dir, stream=None) -> list[RunResult]:
    out = Path(out_dir)
    results = []
    for mode in (PENALTY, CONSTRAINT):
        print(f"== {mode}", file=stream or sys.stdout)
        results.append(run_single(cfg, mode, out / mode, stream))
    _write_combined(out / "compare.csv", [_final_row(r.mode, r) for r in results])
    return results


def run_beta_sweep(cfg: ExperimentConfig, out_dir, stream=None) -> list[RunResult]:
    """Penalty runs with beta1_tilde = beta2_tilde = b for every b in ``cfg.beta_sweep``."""
    out = Path(out_dir)
    results, rows = [], []
    for b in cfg.beta_sweep:
        label = f"beta_{b:.0e}".replace("+", "")
        print(f"== beta1_tilde = beta2_tilde = {b:g}", file=stream or sys.stdout)
        res = run_single(cfg.with_overrides(beta1_tilde=b, beta2_tilde=b), PENALTY, out / label, stream)
        results.append(res)
        rows.append(_final_row(report.fmt(b), res))
    _write_combined(out / "sweep.csv", rows)
    return results


# ---------------------------------------------------------------- argument parsing

_OVERRIDES = {
    "--beta1-tilde": ("beta1_tilde", float),
    "--beta2-tilde": ("beta2_tilde", float),
    "--gamma-min-factor": ("gamma_min_factor", float),
    "--nx": ("nx", int),
    "--nt": ("nt", int),
    "--max-ssn": ("max_ssn", int),
    "--krylov-max": ("krylov_max", int),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dosepenalty", description="Dose-penalised optimal control of the 1D heat equation.")
    ap.add_argument("mode", choices=["penalty", "constraint", "compare", "beta-sweep"])
    ap.add_argument("--config", type=Path, default=None, help="INI file; omitted keys take reference values")
    ap.add_argument("--out", type=Path, default=None, help="output directory (overrides [output] out_dir)")
    for flag, (key, typ) in _OVERRIDES.items():
        ap.add_argument(flag, dest=key, type=typ, default=None)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        over = {key: getattr(args, key) for key, _ in _OVERRIDES.values()}
        if args.gamma_min_factor is not None and args.mode == "constraint":
            over["box_gamma_min_factor"] = over.pop("gamma_min_factor")
        cfg = cfg.with_overrides(**over)
        build_experiment(cfg)
        out = args.out if args.out is not None else Path(cfg.out_dir)
        if args.mode in (PENALTY, CONSTRAINT):
            results = [run_single(cfg, args.mode, out)]
        elif args.mode == "compare":
            results = run_compare(cfg, out)
        else:
            results = run_beta_sweep(cfg, out)
    except (ConfigurationError, DimensionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except report.ReportError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK if any(r.converged for r in results) else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
