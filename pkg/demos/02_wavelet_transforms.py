"""Periodic biorthogonal spline wavelets: filters, transforms, moments.

The spline wavelet of the (2, dt) family annihilates polynomials of degree
below dt, which is what empties the far field of covariance matrices; the
fast transforms and their duals are exact inverses and adjoints of each
other.
"""

import numpy as np

from wavegrf import get_system

sys_ = get_system(2, 6)
print("filter lengths: lo", len(sys_.bank.lo.coeffs), " lo_dual",
      len(sys_.bank.lo_dual.coeffs))
print("discrete moments of the wavelet mask (first 7):",
      np.round(sys_.bank.hi.moments(7), 12))

rng = np.random.default_rng(0)
x = rng.standard_normal(256)
w = sys_.fwt(x)
print("\nround trip |ifwt(fwt(x)) - x|_inf :", np.abs(sys_.ifwt(w) - x).max())

idx = sys_.index_set_for_dim(256)
w_const = sys_.fwt(np.ones(256))
details = w_const[idx.level_slice(idx.j0).stop:]
print("details of the constant vector    :", np.abs(details).max())

y = rng.standard_normal(256)
print("adjoint identity <fwt x, y> - <x, ifwt_dual y> :",
      sys_.fwt(x) @ y - x @ sys_.ifwt_dual(y))

print("\nper-level coefficient counts:", dict(idx.level_sizes))
print("support width of a level-5 wavelet:", sys_.support_width(5),
      "(halves per level)")
