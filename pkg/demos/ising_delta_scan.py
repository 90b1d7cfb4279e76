"""
Ground-space entanglement of the transverse-field Ising chain
=============================================================

Scan the transverse field h and compute

    delta_hat = (lambda_max - alpha_hat) / (lambda_max - lambda_min),

which vanishes when a product state reaches the top of the spectrum.
"""

import numpy as np

from sepopt import SeesawConfig
from sepopt.ising import IsingParams, delta_scan

N = 8
cfg = SeesawConfig(init=("mixed", "uniform", "random"), restarts=20)
hs = np.round(np.arange(0, 3.01, 0.25), 10)

rows = delta_scan(IsingParams(N, j=1.0, g=0.0), hs, cfg)
print(f"{'h':>5} {'alpha':>10} {'lambda_max':>11} {'delta':>9}  flags")
for h, rep in rows:
    print(f"{h:5.2f} {rep.alpha_hat:10.5f} {rep.lambda_max:11.5f} {rep.delta_hat:9.5f}  {rep.flag_string}")

best = max(rows, key=lambda r: r[1].delta_hat)
print(f"largest delta_hat at h = {best[0]}")
