"""
Estimating coherence from a measured scan
=========================================

A fringe scan pins down both lambda and the unknown overall constant.  Here
the scan is corrupted with 5% multiplicative noise before fitting.
"""

import math

import numpy as np

from twinatom import interferometer as ifm

rng = np.random.default_rng(0)
grid = ifm.phase_grid(256)

for true_lam in (0.0, 0.3, 0.7, 1.0):
    clean = ifm.scan(true_lam, math.pi / 2, grid)
    noisy = clean.intensity * (1 + 0.05 * rng.standard_normal(grid.size))
    fit = ifm.fit_lambda(ifm.ScanResult(clean.phi_l, true_lam, grid, noisy, np.nan))
    purity = 5 / 9 + 4 * fit.lam**2 / 9
    print(f"true {true_lam:.2f}  fitted {fit.lam:.4f}  C {fit.C:.5f}  purity {purity:.4f}")

# Two-point estimate from the quarter-turn peaks alone.
i1 = ifm.signal(0.6, (math.pi / 2, math.pi / 2))
i2 = ifm.signal(0.6, (math.pi / 2, 3 * math.pi / 2))
print("two-point estimate:", ifm.estimate_lambda_from_ratio(i1, i2))
