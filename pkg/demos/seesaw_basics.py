"""
Separable optimization with the see-saw
========================================

Maximize <C, rho (x) sigma> over product states for a few small operators.
"""

import numpy as np

from sepopt import SeesawConfig, seesaw_dense
from sepopt.operators import projector
from sepopt.ising import special_hamiltonian

# a product projector is attained exactly by a product state
e00 = np.zeros(4)
e00[0] = 1
res = seesaw_dense(projector(e00), 2, 2)
print("|00><00|:", res.value)

# the singlet projector has separable value 1/2
singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
res = seesaw_dense(projector(singlet), 2, 2, SeesawConfig(init=("mixed", "uniform", "random"), restarts=20))
print("singlet:", res.value)

# a Hamiltonian whose top eigenvector is entangled but close to |00>
for eps in (0.01, 0.1, 0.3):
    res = seesaw_dense(special_hamiltonian(eps), 2, 2, SeesawConfig(init=("mixed", "uniform", "random")))
    print(f"eps={eps}: alpha={res.value:.6f}  (1 - eps = {1 - eps})")

# every run is monotone; the best run wins
rng = np.random.default_rng(0)
a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
c = (a + a.conj().T) / 2
res = seesaw_dense(c, 3, 3, SeesawConfig(init=("mixed", "uniform", "random"), restarts=10))
print("random 3x3: best", res.value, "from", res.init, "run", res.restart_index)
print("trace:", np.round(res.trace, 6))
