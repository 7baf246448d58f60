"""The averaged iterate is a convex combination of the candidates.

Both solvers keep two primal sequences: the candidate blocks that the
prox updates touch, and the averaged iterate the guarantees speak
about.  The recombination weights follow a short recursion in tau and
form a probability vector over the past candidates.  This script
rebuilds the iterate from the recorded history and the weights alone.
"""

import numpy as np

from randpd import frpd, srpd
from randpd.blockmat import BlockMatrix
from randpd.dataio import gen_lad, partition
from randpd.problems import build_lad, constants
from randpd.schedules import averaging_weights, make_schedule

K_raw, b, _ = gen_lad(40, 30, density=0.4, noise_scale=0.1, seed=77)
K = BlockMatrix(K_raw, partition(40, 5), partition(30, 6))
spec = build_lad(K, b, 1.0 / 40)
co = constants(spec)

for name, module, tag in [("fully randomized", frpd, "s1"), ("semi-randomized", srpd, "s3")]:
    sched = make_schedule(tag, co, rho0=0.5)
    _, state, hist = module.run(
        spec, sched, epochs=34, seed=3, checkpoint_every=34, record_tilde_history=True
    )
    k = len(hist["tau"])
    W = averaging_weights(np.array(hist["tau"]), sched.tau0, k)
    rebuilt = W[k] @ np.array(hist["x_tilde"])
    print(f"{name} ({k} iterations):")
    print(f"  weight row sums to {W[k].sum():.12f}, min weight {W[k].min():.2e}")
    print(f"  ||x - rebuilt|| = {np.linalg.norm(state.x - rebuilt):.2e}")
