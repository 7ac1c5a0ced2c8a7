"""The test boundary and the covariance kernels.

The experiment geometry is a star-shaped analytic curve given by a small
Fourier perturbation of a circle of radius 50; all computations rescale it
to unit chordal diameter.  The covariance kernels are the half-integer
Matern family evaluated at chordal distance.
"""

import numpy as np

from wavegrf import (KernelSpec, diameter, eval_kernel, normalize_to_unit_diameter,
                     operator_order, paper_boundary)

curve = paper_boundary()
print("radius at phi=0      :", curve.radius_at(0.0))
print("radius range on grid :",
      curve.radius_at(np.linspace(0, 2 * np.pi, 4096)).min(),
      "to", curve.radius_at(np.linspace(0, 2 * np.pi, 4096)).max())
print("chordal diameter     :", diameter(curve))

unit = normalize_to_unit_diameter(curve)
print("rescaled diameter    :", diameter(unit), f"(scale {unit.scale:.6f})")

print("\nkernel values at z = 0, 0.25, 0.5, 1 (ell = 1):")
for nu in (0.5, 1.5, 2.5):
    spec = KernelSpec(nu, ell=1.0)
    vals = eval_kernel(spec, np.array([0.0, 0.25, 0.5, 1.0]))
    order = operator_order(spec)
    print(f"  nu={nu}: {np.round(vals, 4)}   covariance operator order r={order.r:g}"
          f" (coloring order {order.ra:g})")
