"""Penalty runs with beta1_tilde = beta2_tilde in {1e7, 1e8, 1e9, 1e10}; writes sweep.csv.

    python3 scripts/beta_sweep.py [out_dir]
"""
import sys

from dosepenalty import ExperimentConfig
from dosepenalty.cli import run_beta_sweep

out = sys.argv[1] if len(sys.argv) > 1 else "results/beta_sweep"
for res in run_beta_sweep(ExperimentConfig(), out):
    f = res.final
    print(f"{res.out_dir.name}: risk>L {100 * f.frac_risk_above_L:.2f}%  target<U {100 * f.frac_target_below_U:.2f}%")
