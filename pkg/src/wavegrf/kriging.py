"""Posterior-mean spatial prediction from noisy local-average observations.

Observations are box averages on the curve (unit mass against the surface
measure, pairwise disjoint supports).  With coefficient vector ``z`` of the
field in the dual expansion, the data model is ``y = G z + eta`` where
``G[i, lam]`` pairs the i-th functional with the lam-th dual basis function;
in parameter coordinates this is a plain unweighted integral, computed in
the single-scale dual basis and pushed to wavelet coordinates by the fast
transform.  The posterior mean

    mu = C G^T (G C G^T + sigma^2 I)^(-1) y

is evaluated with the Gram solve done by CG and every operator applied in
factored form (sparse C_eps, banded single-scale observation matrix, fast
transforms); the Gram matrix is never assembled for the solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .curves import CurveSpec
from .linalg import CgResult, cg_solve, dense_eigvals
from .wavelets import WaveletSystem


@dataclass(frozen=True)
class ObservationSet:
    """K disjoint box-average functionals with i.i.d. Gaussian noise."""

    centers: np.ndarray            # parameter positions in [0, 1)
    widths: np.ndarray             # parameter widths
    sigma2: float
    values: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float) % 1.0
        w = np.asarray(self.widths, dtype=float)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "widths", w)
        if self.sigma2 <= 0:
            raise ValueError("noise variance must be positive "
                             "(noise-free kriging is out of scope)")
        if len(c) != len(w) or np.any(w <= 0):
            raise ValueError("need one positive width per center")
        if np.sum(w) > 1.0 + 1e-12:
            raise ValueError("observation supports overlap")
        if len(c) > 1:
            order = np.argsort((c - w / 2.0) % 1.0)
            starts = ((c - w / 2.0) % 1.0)[order]
            widths = w[order]
            for i in range(len(c)):
                nxt = (i + 1) % len(c)
                room = (starts[nxt] - starts[i]) % 1.0
                if nxt == 0:
                    room = 1.0 - ((starts[i] - starts[0]) % 1.0)
                if widths[i] > room + 1e-12:
                    raise ValueError("observation supports overlap")

    @property
    def K(self) -> int:
        return len(self.centers)

    def norms(self, curve: CurveSpec, samples: int = 256) -> np.ndarray:
        """L2 norms of the functionals against the surface measure, 1/sqrt(mass)."""
        out = np.empty(self.K)
        for i, (c, w) in enumerate(zip(self.centers, self.widths)):
            t = (c - w / 2.0 + np.linspace(0, 1, samples, endpoint=False) * w) % 1.0
            mass = float(np.mean(curve.weight_t(t)) * w)
            out[i] = 1.0 / np.sqrt(mass)
        return out


def equispaced_observations(K: int, width: float, sigma2: float,
                            values=None) -> ObservationSet:
    centers = (np.arange(K) + 0.5) / K
    return ObservationSet(centers=centers, widths=np.full(K, width),
                          sigma2=sigma2, values=values)


@dataclass
class ObservationMatrix:
    G_single: sparse.csr_matrix     # K x N against the dual single-scale basis
    G: np.ndarray                   # K x p against the dual wavelets
    level: int

    @property
    def K(self) -> int:
        return self.G.shape[0]


def build_observation_matrix(system: WaveletSystem, obs: ObservationSet,
                             J: int, curve: CurveSpec | None = None,
                             oversample: int = 6) -> ObservationMatrix:
    """Pairings of the observation functionals with the dual basis.

    Single-scale entries are composite trapezoid quadratures of the
    cascade-evaluated dual scaling function over each box (box endpoints are
    snapped to the quadrature grid); wavelet rows follow by the fast
    transform.  Unit-mass normalization is against the surface measure when
    a curve is supplied, else against parameter length.  Boxes must span at
    least one fine-level cell so the quadrature resolves them.
    """
    idx = system.index_set(J)
    L = J + 1
    N = 2**L
    if np.any(obs.widths < 2.0 ** (-L)):
        raise ValueError("observation width below one fine-level cell; "
                         "refine J or widen the functionals")
    phi, _ = system.scaling_values(dual=True, sweeps=oversample)
    start = system.bank.lo_dual.start
    per = 2**oversample
    tau = 2.0 ** (-L) / per                      # quadrature step
    rows, cols, vals = [], [], []
    for i, (c, w) in enumerate(zip(obs.centers, obs.widths)):
        n0 = int(round((c - w / 2.0) / tau))
        n1 = int(round((c + w / 2.0) / tau))
        nodes = np.arange(n0, n1 + 1)
        wq = np.full(len(nodes), tau)
        wq[0] = wq[-1] = tau / 2.0
        if curve is not None:
            mass = float(np.sum(wq * curve.weight_t(nodes * tau)))
        else:
            mass = (n1 - n0) * tau
        # phi_{L,k}(t_n) = 2^{L/2} phi(n/per - k), tabulated index n - per*k
        lo_idx = start * per
        n_tab = len(phi)
        for k in range((n0 - lo_idx - n_tab + per - 1) // per,
                       (n1 - lo_idx) // per + 1):
            jdx = nodes - per * k - lo_idx
            ok = (jdx >= 0) & (jdx < n_tab)
            if not np.any(ok):
                continue
            val = 2.0 ** (L / 2.0) * float(np.sum(wq[ok] * phi[jdx[ok]])) / mass
            if abs(val) > 1e-14:
                rows.append(i)
                cols.append(k % N)
                vals.append(val)
    G_single = sparse.coo_matrix((vals, (rows, cols)), shape=(obs.K, N)).tocsr()
    G = np.stack([system.fwt(G_single[i].toarray().ravel())
                  for i in range(obs.K)])
    return ObservationMatrix(G_single=G_single, G=G, level=L)


class FactoredGram:
    """Applies ``v -> (G C G^T + sigma2 I) v`` without forming the Gram matrix."""

    def __init__(self, Ceps, obsmat: ObservationMatrix, system: WaveletSystem,
                 sigma2: float):
        self.C = Ceps
        self.om = obsmat
        self.system = system
        self.sigma2 = sigma2
        self.applies = 0

    def apply_GT(self, v: np.ndarray) -> np.ndarray:
        return self.system.fwt(self.om.G_single.T @ v)

    def apply_G(self, w: np.ndarray) -> np.ndarray:
        return self.om.G_single @ self.system.ifwt_dual(w)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        self.applies += 1
        Cw = self.C @ self.apply_GT(v)
        return self.apply_G(Cw) + self.sigma2 * v


def posterior_mean(Ceps, obsmat: ObservationMatrix, system: WaveletSystem,
                   y: np.ndarray, sigma2: float,
                   cg_tol: float = 1e-10) -> tuple[np.ndarray, CgResult]:
    """Kriging coefficients ``mu`` in dual coordinates and the CG record."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    y = np.asarray(y, dtype=float)
    gram = FactoredGram(Ceps, obsmat, system, sigma2)
    res = cg_solve(gram, y, tol=cg_tol, max_iter=max(10 * obsmat.K, 200))
    mu = Ceps @ gram.apply_GT(res.x)
    return mu, res


def posterior_mean_dense(C: np.ndarray, G: np.ndarray, y: np.ndarray,
                         sigma2: float) -> np.ndarray:
    """Direct evaluation of the posterior mean (validation oracle)."""
    C = np.asarray(C, dtype=float)
    M = G @ C @ G.T + sigma2 * np.eye(G.shape[0])
    return C @ G.T @ np.linalg.solve(M, np.asarray(y, dtype=float))


def gram_matrix(Ceps, obsmat: ObservationMatrix, system: WaveletSystem,
                sigma2: float) -> np.ndarray:
    gram = FactoredGram(Ceps, obsmat, system, sigma2)
    K = obsmat.K
    if K > 2048:
        raise ValueError("dense Gram assembly capped at K = 2048")
    return np.stack([gram(e) for e in np.eye(K)]).T

def gram_condition(Ceps, obsmat: ObservationMatrix, system: WaveletSystem,
                   sigma2: float) -> float:
    ev = dense_eigvals(gram_matrix(Ceps, obsmat, system, sigma2))
    return float(ev[-1] / ev[0])


def predict_at(system: WaveletSystem, curve: CurveSpec, mu: np.ndarray,
               targets: np.ndarray, resolution: int | None = None) -> np.ndarray:
    """Field prediction at parameter points (snapped to a dyadic grid).

    The synthesized parameter-domain expansion is divided by the arc-length
    weight, matching the pairing in which the coefficients were estimated.
    """
    idx = system.index_set_for_dim(len(mu))
    res = (idx.J + 1 + 4) if resolution is None else resolution
    grid_vals = system.synthesize_on_grid(mu, res, dual=True)
    t = np.asarray(targets, dtype=float) % 1.0
    pos = np.round(t * 2**res).astype(int) % 2**res
    tgrid = pos / float(2**res)
    return grid_vals[pos] / curve.weight_t(tgrid)
