"""Constraint-mode homotopy on the reference geometry (dose levels as hard constraints).

    python3 scripts/constraint_run.py [out_dir]
"""
import sys

from dosepenalty import ExperimentConfig
from dosepenalty.cli import run_single

out = sys.argv[1] if len(sys.argv) > 1 else "results/constraint"
res = run_single(ExperimentConfig(), "constraint", out)
print(f"{len(res.converged)} converged gammas, files in {out}")
