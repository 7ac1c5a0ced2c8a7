"""A-priori tapering patterns and a-posteriori thresholding.

The taper drops an entry (lam, lam') of the wavelet-coordinate matrix when
the supports of the two basis functions are farther apart (chordally, on the
curve) than a level-pair cutoff ``tau_{jj'}``, or, for unequal levels, when
the finer function's support keeps a distance ``tau'_{jj'}`` from the
coarser one's spline knots while the supports themselves are close.  All
pairs touching the coarsest block are kept.  The cutoffs are

  tau_{jj'}  = a  * max(2^-min(j,j'),
                        2^((2J(d'-r/2) - (j+j')(d'+dt)) / (2 dt + r)))
  tau'_{jj'} = a' * max(2^-max(j,j'),
                        2^((2J(d'-r/2) - (j+j')d' - max(j,j') dt) / (dt + r)))

and the induced consistency scale is ``eps = a^(-2(d+r/2)) + a'^(-(dt+r))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .curves import ChordBounds, CurveSpec
from .wavelets import LevelIndexSet, WaveletSystem


@dataclass(frozen=True)
class CompressionParams:
    d: int
    dt: int
    r: float
    a: float = 2.0
    a_prime: float = 2.0
    dprime: float | None = None

    def __post_init__(self):
        if self.a <= 1.0 or self.a_prime <= 1.0:
            raise ValueError("taper constants a, a' must exceed 1")
        dp = self.resolved_dprime
        # d < d' < dt + r, with equality admitted in the borderline case
        # dt = d - r (the loglinear regime, still run in the experiments)
        if not (self.d <= dp <= self.dt + self.r):
            raise ValueError(
                f"d' = {dp} violates d <= d' <= dt + r = {self.dt + self.r}")

    @property
    def resolved_dprime(self) -> float:
        if self.dprime is not None:
            return self.dprime
        return self.d + (self.dt - self.d + self.r) / 4.0

    @property
    def is_borderline(self) -> bool:
        dp = self.resolved_dprime
        return not (self.d < dp < self.dt + self.r)

    @property
    def consistency_scale(self) -> float:
        """eps = a^(-2(d + r/2)) + a'^(-(dt + r))"""
        return (self.a ** (-2.0 * (self.d + self.r / 2.0))
                + self.a_prime ** (-(self.dt + self.r)))


def taper_params(params: CompressionParams, j: int, jp: int, J: int) -> tuple[float, float]:
    """The pair (tau_{jj'}, tau'_{jj'}) for finest level J."""
    if not (j <= J and jp <= J):
        raise ValueError("levels must not exceed J")
    dp = params.resolved_dprime
    d, dt, r = params.d, params.dt, params.r
    num = 2.0 * J * (dp - r / 2.0)
    tau = params.a * max(2.0 ** (-min(j, jp)),
                         2.0 ** ((num - (j + jp) * (dp + dt)) / (2.0 * dt + r)))
    taup = params.a_prime * max(2.0 ** (-max(j, jp)),
                                2.0 ** ((num - (j + jp) * dp - max(j, jp) * dt) / (dt + r)))
    return tau, taup


@dataclass
class TaperPattern:
    idx: LevelIndexSet
    mask: np.ndarray                      # boolean (p, p), symmetric
    params: CompressionParams
    _nnz: int = field(init=False)

    def __post_init__(self):
        self._nnz = int(np.count_nonzero(self.mask))

    @property
    def nnz(self) -> int:
        return self._nnz

    @property
    def nnz_fraction(self) -> float:
        return self._nnz / float(self.idx.p) ** 2

    def block(self, j: int, jp: int) -> np.ndarray:
        return self.mask[self.idx.level_slice(j), self.idx.level_slice(jp)]

    def to_coo(self) -> sparse.coo_matrix:
        r, c = np.nonzero(self.mask)
        return sparse.coo_matrix((np.ones(len(r)), (r, c)), shape=self.mask.shape)


def _classify_vs_threshold(gap, thresh, bounds: ChordBounds, chord_fn):
    """Sign of (chordal distance - thresh) from parameter gaps.

    ``gap`` is the circular parameter distance between the two sets; pairs in
    the bracket band get an exact sampled chordal distance via ``chord_fn``.
    Returns boolean "distance > thresh".
    """
    above = bounds.c_lo * gap > thresh
    below = bounds.c_hi * gap <= thresh
    unsure = ~(above | below)
    if np.any(unsure):
        above = above.copy()
        above[unsure] = chord_fn(np.nonzero(unsure)) > thresh
    return above


def build_pattern(system: WaveletSystem, curve: CurveSpec,
                  params: CompressionParams, J: int,
                  n_arc_samples: int = 8) -> TaperPattern:
    """A-priori taper pattern over ``Lambda_J`` with chordal distances.

    Support-to-support distances are minima over ``n_arc_samples`` points
    per arc (endpoints included); a two-sided comparison of chord versus
    parameter distance keeps the sampled evaluations to a thin band.  The
    cutoff formulas are evaluated with the single-scale resolution level
    ``J + 1 = log2 p`` (the coarsest block shifts the wavelet level count
    down by one relative to the dimension).
    """
    idx = system.index_set(J)
    J_formula = J + 1
    j0 = idx.j0
    bounds = ChordBounds(curve)
    mask = np.ones((idx.p, idx.p), dtype=bool)
    rel = np.linspace(0.0, 1.0, n_arc_samples)

    def arc_points(j, ks, starts_width):
        start, width = starts_width
        t = (start[ks][:, None] + rel[None, :] * width) % 1.0
        return curve.xy_t(t)                       # (m, S, 2)

    geom = {}
    for j in range(j0 + 1, J + 1):
        n = idx.level_sizes[j]
        lo, hi = system._reference_support(j)
        h = 2.0 ** (-j)
        start = ((np.arange(n) + lo) * h) % 1.0
        width = (hi - lo) * h
        center = (start + width / 2.0) % 1.0
        knot_step = h / 2.0
        geom[j] = dict(start=start, width=width, center=center,
                       lo=lo, hi=hi, h=h, knot_step=knot_step)

    def circ(x):
        x = np.abs(np.mod(x, 1.0))
        return np.minimum(x, 1.0 - x)

    for j in range(j0 + 1, J + 1):
        gj = geom[j]
        for jp in range(j, J + 1):
            gp = geom[jp]
            tau, taup = taper_params(params, j, jp, J_formula)
            if min(gj["width"], gp["width"]) >= 1.0 or (gj["width"] + gp["width"]) / 2.0 >= 0.5:
                continue                            # supports wrap: keep block
            dc = circ(gj["center"][:, None] - gp["center"][None, :])
            gap = np.maximum(0.0, dc - (gj["width"] + gp["width"]) / 2.0)

            def chord_support(which, _j=j, _jp=jp, _gap=gap):
                ii, jj = which
                a = arc_points(_j, ii, (geom[_j]["start"], geom[_j]["width"]))
                b = arc_points(_jp, jj, (geom[_jp]["start"], geom[_jp]["width"]))
                d = a[:, :, None, :] - b[:, None, :, :]
                return np.sqrt(np.sum(d * d, axis=-1)).min(axis=(1, 2))

            drop = _classify_vs_threshold(gap, tau, bounds, chord_support)

            if jp > j:
                # second branch: support of the finer function inside the
                # smooth part of the coarser one
                near = ~_classify_vs_threshold(gap, 2.0 ** (-j), bounds, chord_support)
                cand = near & ~drop
                if np.any(cand):
                    ii, jj = np.nonzero(cand)
                    kgap = _knot_gap(gj, gp, ii, jj)
                    sub_bounds = bounds

                    def chord_knots(which, _ii=ii, _jj=jj):
                        sel = which[0]
                        return _sampled_knot_chord(system, curve, j, jp,
                                                   _ii[sel], _jj[sel], geom, rel)

                    far_knots = _classify_vs_threshold(kgap, taup, sub_bounds, chord_knots)
                    drop[ii[far_knots], jj[far_knots]] = True

            bj = idx.level_slice(j)
            bp = idx.level_slice(jp)
            keep = ~drop
            mask[bj, bp] = keep
            mask[bp, bj] = keep.T
    return TaperPattern(idx=idx, mask=mask, params=params)


def _knot_gap(gj, gp, ii, jj):
    """Circular parameter distance from the knot grid of the coarse function
    (clamped to its support) to the fine support arc."""
    s_f = gp["start"][jj]
    w_f = gp["width"]
    cen_f = (s_f + w_f / 2.0) % 1.0
    s_c = gj["start"][ii]
    w_c = gj["width"]
    step = gj["knot_step"]
    nk = int(round(w_c / step))
    # signed offset of the fine center from the coarse support start, in [0,1)
    delta = np.mod(cen_f - s_c, 1.0)
    knot_pos = np.clip(np.round(delta / step), 0, nk)
    d = np.abs(delta - knot_pos * step)
    d = np.minimum(d, 1.0 - d)
    return np.maximum(0.0, d - w_f / 2.0)


def _sampled_knot_chord(system, curve, j, jp, ii, jj, geom, rel):
    """Min chordal distance between coarse knots and sampled fine arcs."""
    gj, gp = geom[j], geom[jp]
    step = gj["knot_step"]
    nk = int(round(gj["width"] / step)) + 1
    knots_t = (gj["start"][ii][:, None] + np.arange(nk)[None, :] * step) % 1.0
    kp = curve.xy_t(knots_t)                       # (m, nk, 2)
    t = (gp["start"][jj][:, None] + rel[None, :] * gp["width"]) % 1.0
    ap = curve.xy_t(t)                             # (m, S, 2)
    d = kp[:, :, None, :] - ap[:, None, :, :]
    return np.sqrt(np.sum(d * d, axis=-1)).min(axis=(1, 2))


def apply_pattern(A: np.ndarray, pattern: TaperPattern):
    """Zero the complement of the pattern, keeping entries bit-exactly."""
    from .linalg import SparseSymMatrix
    A = np.asarray(A)
    if A.shape != pattern.mask.shape:
        raise ValueError("dimension mismatch between matrix and pattern")
    r, c = np.nonzero(pattern.mask)
    M = sparse.coo_matrix((A[r, c], (r, c)), shape=A.shape).tocsr()
    return SparseSymMatrix(M)


def aposteriori_threshold(S, idx: LevelIndexSet, ra: float, delta: float):
    """Drop entries small after diagonal preconditioning.

    Entry (lam, lam') is dropped when ``2^(ra(|lam|+|lam'|)) |entry| < delta``;
    the diagonal is never dropped and drops are symmetric.
    """
    from .linalg import SparseSymMatrix
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    M = S.csr.tocoo() if isinstance(S, SparseSymMatrix) else sparse.coo_matrix(S)
    lev = idx.level_of_position()
    weight = np.power(2.0, ra * (lev[M.row] + lev[M.col]))
    keep = (np.abs(M.data) * weight >= delta) | (M.row == M.col)
    out = sparse.coo_matrix((M.data[keep], (M.row[keep], M.col[keep])),
                            shape=M.shape).tocsr()
    # symmetrize drops: keep an entry only if its mirror survived too
    pat = (np.abs(out) > 0)
    both = pat.multiply(pat.T)
    out = out.multiply(both)
    return SparseSymMatrix(sparse.csr_matrix(out))


def sparsity_report(obj, idx: LevelIndexSet | None = None) -> dict:
    """nnz statistics of a pattern or sparse/dense symmetric matrix."""
    from .linalg import SparseSymMatrix
    if isinstance(obj, TaperPattern):
        idx = obj.idx
        mat = sparse.csr_matrix(obj.to_coo())
    elif isinstance(obj, SparseSymMatrix):
        mat = obj.csr
    else:
        mat = sparse.csr_matrix(np.asarray(obj) != 0)
    if idx is None:
        raise ValueError("index set required for per-level-block counts")
    p = mat.shape[0]
    blocks = {}
    coo = mat.tocoo()
    lev = idx.level_of_position()
    for j in idx.levels:
        for jp in idx.levels:
            key = (j, jp)
            blocks[key] = int(np.count_nonzero((lev[coo.row] == j) & (lev[coo.col] == jp)))
    nnz = int(mat.nnz)
    return {"p": p, "nnz": nnz, "nnz_fraction": nnz / p**2, "blocks": blocks}
