"""Penalty-mode homotopy for the four (beta1_tilde, beta2_tilde) combinations of 1e5 and 1e6.

    python3 scripts/penalty_weights.py [out_dir]
"""
import sys
from pathlib import Path

from dosepenalty import ExperimentConfig
from dosepenalty.cli import run_single

out = Path(sys.argv[1] if len(sys.argv) > 1 else "results/penalty_weights")
rows = []
for b1, b2 in ((1e5, 1e5), (1e6, 1e5), (1e5, 1e6), (1e6, 1e6)):
    print(f"== beta1_tilde {b1:g}, beta2_tilde {b2:g}")
    cfg = ExperimentConfig().with_overrides(beta1_tilde=b1, beta2_tilde=b2)
    res = run_single(cfg, "penalty", out / f"b1_{b1:.0e}_b2_{b2:.0e}".replace("+", ""))
    f = res.final
    rows.append((b1, b2, f.gamma_ratio, 100 * f.frac_risk_above_L, 100 * f.frac_target_below_U))

print("\nbeta1_tilde beta2_tilde  final gamma/gamma0  risk>L %  target<U %")
for b1, b2, g, r, t in rows:
    print(f"{b1:11.0e} {b2:11.0e}  {g:17.3e}  {r:8.2f}  {t:10.2f}")
