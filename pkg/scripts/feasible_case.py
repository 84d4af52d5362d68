"""Risk region without the central interval, so both dose levels can be met at once.

Penalty mode with beta tilde = 1e7 and the schedule continued to 1e-11 gamma0.
"""
import sys

from dosepenalty import ExperimentConfig
from dosepenalty.cli import run_single

out = sys.argv[1] if len(sys.argv) > 1 else "results/feasible"
cfg = ExperimentConfig().with_overrides(
    risk=((-0.7, -0.55), (0.55, 0.7)), beta1_tilde=1e7, beta2_tilde=1e7, gamma_min_factor=1e-11)
res = run_single(cfg, "penalty", out)
f = res.final
print(f"final gamma/gamma0 {f.gamma_ratio:.3e}: risk>L {100 * f.frac_risk_above_L:.2f}%, "
      f"target<U {100 * f.frac_target_below_U:.2f}%")
