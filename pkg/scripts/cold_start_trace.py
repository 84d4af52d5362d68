"""One SSN solve from u = 0 at gamma = 1e-7 gamma0 (beta tilde = 1e6), printing the damping trace."""
import numpy as np

from dosepenalty import ExperimentConfig, build_experiment, ssn_solve

exp = build_experiment(ExperimentConfig().with_overrides(beta1_tilde=1e6, beta2_tilde=1e6))
pen = exp.penalty
cfg = pen.with_gamma(1e-7 * max(pen.beta1, pen.beta2))
u, trace = ssn_solve(np.zeros(exp.problem.grid.shape), exp.problem, cfg, exp.settings)

print(f"{'k':>3} {'tau':>6} {'residual':>12}")
print(f"{0:3d} {'':>6} {trace.initial_residual:12.4e}")
for s in trace.steps:
    print(f"{s.k:3d} {s.tau:6.3g} {s.residual:12.4e}")
print(f"converged: {trace.converged}" + (f" ({trace.reason})" if trace.reason else ""))
