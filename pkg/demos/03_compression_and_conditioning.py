"""Covariance compression and preconditioning at a glance.

In wavelet coordinates the exponential-kernel covariance admits an a-priori
sparsity pattern with O(p) entries, stays symmetric positive definite after
tapering, and the level scaling D^ra C D^ra keeps the condition number flat
while the single-scale one deteriorates by 2^|r| = 4 per level.
"""

import numpy as np

from wavegrf import condition_number
from wavegrf.pipeline import CovarianceModel

for p in (64, 128, 256):
    m = CovarianceModel(kernel="matern12", wavelet=(2, 6), p=p)
    cond_ss = condition_number(m.single_scale)
    cond_pc = condition_number(m.preconditioned)
    lo = np.linalg.eigvalsh(m.tapered.to_dense())[0]
    print(f"p={p:4d}: pattern {100 * m.pattern.nnz_fraction:5.1f}% "
          f"| single-scale cond {cond_ss:9.3g} | preconditioned {cond_pc:7.3g} "
          f"| tapered min eig {lo:.2e}")

m = CovarianceModel(kernel="matern12", wavelet=(2, 6), p=256)
diag = np.diag(m.wavelet_dense)
print("\nper-level diagonal means (jump 4 = 2^|r| between wavelet levels):")
for j in m.idx.levels:
    print(f"  level {j}: {np.mean(diag[m.idx.level_slice(j)]):.4e}")
