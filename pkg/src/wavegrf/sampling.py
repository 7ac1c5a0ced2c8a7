"""Gaussian field simulation through a rational matrix square root.

The preconditioned tapered covariance ``R = D^ra C_eps D^ra`` has its
spectrum in a J-independent interval ``[c-, c+]``; its square root is
approximated by a K-node quadrature of the inverse-square-root contour
integral,

    sqrt(R) ~ S_K = (2 T sqrt(c-) / (pi K)) R sum_k (dn/cn^2)(t_k | m)
                                               (R + w_k^2 I)^(-1),

with m = 1 - c-/c+, t_k = (k - 1/2) T / K, w_k = sqrt(c-) sn/cn(t_k | m)
and T the complete first-kind integral K(m) (the half-period over which
w sweeps (0, inf)); convergence in K is exponential at a rate set only by
c+/c-.  A field sample is then ``z = D^-ra S_K xi`` with standard normal
``xi`` from a counter-based stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .elliptic import elliptic_complete, jacobi_sn_cn_dn
from .linalg import SparseSymMatrix, SpectralBounds, cg_solve, _as_apply
from .wavelets import LevelIndexSet, WaveletSystem, diag_scaling


@dataclass(frozen=True)
class ContourQuadrature:
    c_minus: float
    c_plus: float
    K: int
    m: float                      # elliptic parameter 1 - c-/c+
    half_period: float            # K(m), the integration endpoint
    second_kind: float            # E(m), kept for diagnostics
    nodes: np.ndarray             # t_k
    poles: np.ndarray             # w_k^2
    weights: np.ndarray           # dn/cn^2 at the nodes
    scalar: bool = False          # degenerate bounds: sqrt(c) * identity

    @property
    def prefactor(self) -> float:
        return 2.0 * self.half_period * np.sqrt(self.c_minus) / (np.pi * self.K)

    def scalar_values(self, lam):
        """The rational approximation evaluated at scalar arguments."""
        lam = np.asarray(lam, dtype=float)
        if self.scalar:
            return np.sqrt(self.c_minus) * np.ones_like(lam)
        acc = np.zeros_like(lam)
        for w2, g in zip(self.poles, self.weights):
            acc += g / (lam + w2)
        return self.prefactor * lam * acc


def build_contour(bounds: SpectralBounds, K: int) -> ContourQuadrature:
    """Quadrature data for given spectral bounds and node count."""
    if K < 1:
        raise ValueError("need at least one quadrature node")
    lo, hi = bounds.lambda_min, bounds.lambda_max
    if lo <= 0 or hi <= 0:
        raise ValueError("spectral bounds must be positive")
    if np.isclose(lo, hi, rtol=1e-12):
        return ContourQuadrature(lo, hi, K, 0.0, np.pi / 2, np.pi / 2,
                                 np.zeros(K), np.zeros(K), np.zeros(K), scalar=True)
    m = 1.0 - lo / hi
    T, E = elliptic_complete(m)
    t = (np.arange(1, K + 1) - 0.5) * T / K
    sn, cn, dn = jacobi_sn_cn_dn(t, m)
    w2 = lo * (sn / cn) ** 2
    return ContourQuadrature(lo, hi, K, m, T, E, t, w2, dn / cn**2)


def apply_sqrt(R, contour: ContourQuadrature, x: np.ndarray,
               cg_tol: float = 1e-12) -> np.ndarray:
    """Apply the rational square-root approximation of ``R`` to ``x``.

    Each shifted system is solved independently by CG to ``cg_tol``.
    """
    x = np.asarray(x, dtype=float)
    if contour.scalar:
        return np.sqrt(contour.c_minus) * x
    apply_R = _as_apply(R)
    acc = np.zeros_like(x)
    for w2, g in zip(contour.poles, contour.weights):
        res = cg_solve(lambda v, s=w2: apply_R(v) + s * v, x, tol=cg_tol)
        acc += g * res.x
    return contour.prefactor * apply_R(acc)


def sqrt_matrix(R, contour: ContourQuadrature) -> np.ndarray:
    """Dense ``S_K`` via direct shifted solves (small and moderate p)."""
    Rd = R.to_dense() if isinstance(R, SparseSymMatrix) else np.asarray(R, dtype=float)
    p = Rd.shape[0]
    if contour.scalar:
        return np.sqrt(contour.c_minus) * np.eye(p)
    acc = np.zeros_like(Rd)
    eye = np.eye(p)
    for w2, g in zip(contour.poles, contour.weights):
        acc += g * np.linalg.solve(Rd + w2 * eye, eye)
    return contour.prefactor * (Rd @ acc)


@dataclass
class GrfSample:
    coefficients: np.ndarray
    seed: int
    sample_index: int
    meta: dict = field(default_factory=dict)


class GrfSampler:
    """Draws dual-coordinate field samples ``z = D^-ra S_K xi``.

    ``method='dense'`` precomputes the p x p operator (fast for repeated
    draws at moderate p); ``method='cg'`` applies the shifted solves per
    draw and never forms matrices.
    """

    def __init__(self, Ceps, idx: LevelIndexSet, ra: float,
                 contour: ContourQuadrature, method: str = "dense",
                 cg_tol: float = 1e-12, taper_eps_params: dict | None = None):
        self.idx = idx
        self.ra = ra
        self.contour = contour
        self.method = method
        self.cg_tol = cg_tol
        self.meta = {
            "J": idx.J, "j0": idx.j0, "K": contour.K,
            "cond_estimate": contour.c_plus / contour.c_minus,
            "taper": taper_eps_params or {},
        }
        dvec = diag_scaling(idx, ra)
        if isinstance(Ceps, SparseSymMatrix):
            self.R = Ceps.scaled(dvec)
        else:
            self.R = dvec[:, None] * np.asarray(Ceps) * dvec[None, :]
        self.dinv = diag_scaling(idx, -ra)
        self._op = None
        if method == "dense":
            self._op = self.dinv[:, None] * sqrt_matrix(self.R, contour)
        elif method != "cg":
            raise ValueError("method must be 'dense' or 'cg'")

    def covariance(self) -> np.ndarray:
        """The exact covariance of the draws, ``D^-ra S_K^2 D^-ra``."""
        SK = sqrt_matrix(self.R, self.contour)
        return self.dinv[:, None] * (SK @ SK) * self.dinv[None, :]

    def draw(self, seed: int, sample_index: int = 0) -> GrfSample:
        xi = rng.standard_normal(seed, sample_index, self.idx.p)
        z = self._apply(xi)
        meta = dict(self.meta, seed=seed, sample_index=sample_index)
        return GrfSample(z, seed, sample_index, meta)

    def draw_matrix(self, seed: int, count: int, first_index: int = 0) -> np.ndarray:
        """(count, p) array of samples with indices first_index + i."""
        if self._op is not None:
            xi = np.stack([rng.standard_normal(seed, first_index + i, self.idx.p)
                           for i in range(count)])
            return xi @ self._op.T
        return np.stack([self.draw(seed, first_index + i).coefficients
                         for i in range(count)])

    def _apply(self, xi: np.ndarray) -> np.ndarray:
        if self._op is not None:
            return self._op @ xi
        return self.dinv * apply_sqrt(self.R, self.contour, xi, self.cg_tol)


def sample_grf(system: WaveletSystem, Ceps, ra: float,
               contour: ContourQuadrature, seed: int,
               sample_index: int = 0, method: str = "dense") -> GrfSample:
    p = Ceps.shape[0]
    idx = system.index_set_for_dim(p)
    return GrfSampler(Ceps, idx, ra, contour, method=method).draw(seed, sample_index)


def synthesize_field(system: WaveletSystem, coefficients: np.ndarray,
                     resolution: int) -> np.ndarray:
    """Field values ``sum_lam z_lam dual_lam(t)`` on the dyadic grid 2^-resolution."""
    return system.synthesize_on_grid(np.asarray(coefficients, dtype=float),
                                     resolution, dual=True)
