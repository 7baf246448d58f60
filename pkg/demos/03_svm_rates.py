"""Convergence-rate study on a synthetic SVM.

Runs both randomized solvers on a margin-separated SVM instance with a
tiny ridge weight, once with the basic schedule (c*tau0 = 1) and once
with the accelerated one (c*tau0 = 2), ten seeds each.  The fitted
log-log slope of the median duality gap shows the rate difference; the
accelerated runs are visibly steeper than 1/k.

Traces are written to demos/output/ in the harness CSV schema so the
plotting frontend can render them:

    node frontend/dist/cli.js demos/output/svm_*.csv --column gap \
         --out demos/output/svm_rates.svg
"""

import pathlib

import numpy as np

from randpd import frpd, srpd
from randpd.cli import write_trace_csv
from randpd.dataio import gen_svm
from randpd.metrics import fit_rate
from randpd.problems import build_svm, constants
from randpd.schedules import make_schedule

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

dataset = gen_svm(250, 100, seed=7)
spec = build_svm(dataset, 1e-4, n_blocks=16, m_blocks=16)
co = constants(spec)
seeds = range(1, 11)

for method, runner, tau0 in [("frpd", frpd.run, co.tau0), ("srpd", srpd.run, co.tau0_primal)]:
    for ctau0 in (1.0, 2.0):
        tag = {("frpd", 1.0): "s1", ("frpd", 2.0): "s2"}.get((method, ctau0), "s3")
        sched = make_schedule(tag, co, c=("auto" if ctau0 == 1.0 else ctau0 / tau0))
        curves = []
        for seed in seeds:
            trace, _ = runner(spec, sched, epochs=200, seed=seed, checkpoint_every=5)
            curves.append([r.gap for r in trace])
            write_trace_csv(OUT / f"svm_{method}_c{int(ctau0)}_seed{seed}.csv", trace)
        epochs = np.array([r.epoch for r in trace], dtype=float)
        median = np.median(np.array(curves), axis=0)
        slope = fit_rate(epochs, median).slope
        print(f"{method} ({tag}, c*tau0 = {ctau0:g}): median gap "
              f"{median[0]:9.3f} -> {median[-1]:9.4f}, tail slope {slope:+.2f}")

print(f"\ntraces written to {OUT}/")
