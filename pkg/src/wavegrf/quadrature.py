"""Gauss-Legendre panel rule.

Galerkin integrands on a closed curve are smooth away from the diagonal
s = t, and on cell pairs that merely touch the diagonal they are one-sidedly
smooth; with self cells split into two triangles, one tensor panel per
(sub)domain integrates everything to near machine precision.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_rule(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1.0), 0.5 * w
