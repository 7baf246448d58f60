"""Tour of the proximal toolbox.

Every function kind used by the solvers has a closed-form prox and
conjugate.  This script exercises them on scalars and shows the two
identities everything else leans on: Moreau's identity (dual prox from
the primal one) and Young-Fenchel (weak duality in one dimension).
"""

import numpy as np

from randpd.proxlib import Hinge, L1, SqNorm, Zero, moreau_prox_conjugate

z = np.linspace(-3, 3, 7)

print("soft-thresholding (l1 weight 1, step 0.75):")
print("  z      ", np.round(z, 2))
print("  prox(z)", np.round(L1(1.0).prox(z, 0.75), 2))

print("\nhinge loss (weight 1, step 0.5): flat above 1, shifted below")
print("  prox(z)", np.round(Hinge(1.0).prox(z, 0.5), 2))

print("\nridge shrinkage (curvature 2, step 1): z / (1 + 2)")
print("  prox(z)", np.round(SqNorm(2.0).prox(z, 1.0), 2))

# Moreau: prox of rho*g* from the prox of g, for any kind
rng = np.random.default_rng(0)
for fn in [L1(0.7), Hinge(0.4), SqNorm(1.5), Zero()]:
    zz = rng.uniform(-4, 4, size=5)
    rho = 1.3
    lhs = fn.prox_conj(zz, rho)
    rhs = moreau_prox_conjugate(fn, zz, rho)
    print(f"\n{fn!r}: closed-form conjugate prox vs Moreau route "
          f"max diff {np.max(np.abs(lhs - rhs)):.2e}")

# Young-Fenchel: f(x) + f*(v) >= x v, with equality iff v is a subgradient
fn = Hinge(1.0)
x, v = 1.0, -0.3  # v in the hinge subdifferential at the kink
fx = fn.value(np.array([x]))
fv = fn.conj_value(np.array([v]))
print(f"\nYoung-Fenchel at the hinge kink: f(x) + f*(v) = {fx + fv:.3f}, "
      f"x*v = {x * v:.3f} (equality: v is a subgradient there)")
