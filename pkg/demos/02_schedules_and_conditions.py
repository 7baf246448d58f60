"""The seven non-stationary parameter schedules and their verifier.

The solvers never tune step sizes: every iteration reads its parameter
tuple (tau, rho, gamma, beta, eta) from a schedule.  The rational
schedules shrink tau like 1/k and grow rho like k; the quadratic
recursions (used under strong convexity) grow rho like k^2.

``check_conditions`` sweeps the inequality system each solver family is
analyzed with.  The c*tau0 = 1 and quadratic-recursion schedules satisfy
it exactly; the accelerated c*tau0 > 1 variants do not (their analysis
uses a weighted telescoping instead), which the report makes visible.
"""

import numpy as np

from randpd.problems import ProblemConstants
from randpd.schedules import check_conditions, closed_form_s1, make_schedule

consts = ProblemConstants.uniform(m=8, n=8, L_bar_sigma=4.0)
consts_sc = ProblemConstants.uniform(m=8, n=8, L_bar_sigma=4.0, mu_f=1.0, mu_g=1.0)

print("schedule values at k = 0, 10, 100, 1000 (tau | rho):")
for tag in ("s1", "s2", "s3", "s4", "s5", "s6", "s7"):
    co = consts_sc if tag in ("s4", "s5", "s6", "s7") else consts
    sched = make_schedule(tag, co, rho0=(1.0 if tag in ("s1", "s2", "s3") else "auto"))
    arr = sched.params_array(1000)
    cells = [f"{arr['tau'][k]:.4f}|{arr['rho'][k]:.3g}" for k in (0, 10, 100, 1000)]
    print(f"  {tag}: " + "  ".join(cells))

# the closed forms of the basic schedule are exact, not approximate
sched = make_schedule("s1", consts, rho0=1.0)
k = 12345
tau, rho, omega = closed_form_s1(sched.tau0, 1.0, k)
p = sched.params(k)
print(f"\nclosed form at k={k}: tau matches exactly: {p.tau == tau}, "
      f"rho matches exactly: {p.rho == rho}")

print("\ncondition sweep over k <= 10^4:")
for tag in ("s1", "s3", "s4", "s6", "s2"):
    co = consts_sc if tag in ("s4", "s6") else consts
    sched = make_schedule(tag, co, rho0=(1.0 if tag in ("s1", "s2", "s3") else "auto"))
    rep = check_conditions(sched, 10_000)
    print()
    print(rep)
