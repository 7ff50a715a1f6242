"""
Spin coherence of the dissociated pair
======================================

The pair is an effective two-level system spanned by |00> and the symmetric
|+1 -1> combination.  The coherence parameter lambda sets the off-diagonal
weight, and with it the purity.
"""

import numpy as np

from twinatom import twinstate

for lam in (0.0, 0.5, 1.0):
    rho = twinstate.rho0(lam)
    bloch = twinstate.bloch_vector(rho)
    print(
        f"lambda={lam:.1f}  purity={twinstate.purity(rho):.4f}  "
        f"linear entropy={twinstate.linear_entropy(rho):.4f}  "
        f"|Bloch|={np.linalg.norm(bloch):.4f}"
    )

# At lambda = 1 the state is the total-angular-momentum singlet.
s = twinstate.singlet()
print("rho0(1) is the singlet projector:", np.allclose(twinstate.rho0(1.0), np.outer(s, s.conj())))

# The diagnostics flag unphysical input instead of raising.
broken = twinstate.rho0(0.3).copy()
broken[0, 0] += 0.5
print(twinstate.is_physical_density(broken))
