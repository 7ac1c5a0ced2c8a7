"""Multilevel Monte Carlo estimation of the tapered covariance matrix.

Level-pair blocks of the covariance are averaged over block-dependent
sample counts ``M_{jj'} = M~_{max(j,j')}`` where the per-level budget
follows the geometric schedule ``M~_j = M_finest * 2^((J-j)(n+alpha)2/3)``
(rounded up), anchored at the finest level.  Each block uses fresh draws;
blocks (j,j') and (j',j) are estimated once and mirrored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from . import rng
from .compression import TaperPattern
from .linalg import DenseOracle, SparseSymMatrix
from .wavelets import LevelIndexSet


@dataclass(frozen=True)
class SampleSchedule:
    j0: int
    J: int
    counts: dict                       # level -> samples available at that level
    n: int
    alpha: float
    alpha0: float

    def __post_init__(self):
        lv = sorted(self.counts)
        if lv != list(range(self.j0, self.J + 1)):
            raise ValueError("schedule must cover levels j0..J")
        vals = [self.counts[j] for j in lv]
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise ValueError("per-level sample counts must be non-increasing in j")

    @property
    def regime(self) -> str:
        if 2 * self.alpha > self.n:
            return "2a>n"
        if 2 * self.alpha == self.n:
            return "2a=n"
        return "2a<n"

    def block_count(self, j: int, jp: int) -> int:
        return self.counts[max(j, jp)]

    def work(self) -> int:
        """Cost counter sum_j M~_j 2^(j n)."""
        return int(sum(m * 2 ** (j * self.n) for j, m in self.counts.items()))


def schedule(J: int, j0: int, n: int = 1, alpha: float = 0.5,
             alpha0: float = 2.0, M_finest: int = 100) -> SampleSchedule:
    if alpha > alpha0:
        raise ValueError("need alpha <= alpha0")
    if M_finest < 1:
        raise ValueError("need at least one sample at the finest level")
    rate = (n + alpha) * 2.0 / 3.0
    counts = {j: int(np.ceil(M_finest * 2.0 ** ((J - j) * rate)))
              for j in range(j0, J + 1)}
    return SampleSchedule(j0=j0, J=J, counts=counts, n=n, alpha=alpha, alpha0=alpha0)


class GaussianCoefficientSource:
    """Exact draws of wavelet coefficient vectors at any resolution level.

    Sampling at resolution ``j`` uses the dense symmetric square root of the
    leading principal block of the covariance (the law of the truncated
    coefficient vector).  Draws are keyed by (seed, stream), reproducible.
    """

    def __init__(self, C: np.ndarray, idx: LevelIndexSet, seed: int):
        self.idx = idx
        self.seed = seed
        self._roots = {}
        self.C = np.asarray(C, dtype=float)

    def _root(self, j: int) -> np.ndarray:
        if j not in self._roots:
            sub = self.idx.truncate(j)
            self._roots[j] = DenseOracle(self.C[:sub.p, :sub.p]).sqrt()
        return self._roots[j]

    def draw(self, j_res: int, count: int, stream_id: int) -> np.ndarray:
        """(count, p(j_res)) i.i.d. coefficient vectors at resolution j_res."""
        root = self._root(j_res)
        xi = rng.stream(self.seed, stream_id).standard_normal((count, root.shape[0]))
        return xi @ root.T


class CsvSampleSource:
    """Reads per-level coefficient samples from CSV files.

    Each file holds one sample per row, columns in the flat level-major
    layout for the level recorded in its ``# level:`` header line.
    """

    def __init__(self, paths: dict):
        self._data = {}
        for j, path in paths.items():
            rows = []
            with open(path) as f:
                for line in f:
                    if line.startswith("#"):
                        continue
                    rows.append([float(v) for v in line.strip().split(",")])
            self._data[j] = np.asarray(rows)
        self._used = {j: 0 for j in self._data}

    def draw(self, j_res: int, count: int, stream_id: int) -> np.ndarray:
        data = self._data.get(j_res)
        if data is None:
            raise KeyError(f"no sample file for resolution level {j_res}")
        start = self._used[j_res]
        if start + count > len(data):
            raise RuntimeError(
                f"sample source exhausted at level {j_res}: "
                f"need {count}, have {len(data) - start} of {len(data)} left")
        self._used[j_res] = start + count
        return data[start:start + count]


def write_sample_csv(path, level: int, samples: np.ndarray) -> None:
    samples = np.atleast_2d(samples)
    with open(path, "w", newline="") as f:
        f.write(f"# level: {level}\n")
        w = csv.writer(f)
        for row in samples:
            w.writerow([f"{v:.17g}" for v in row])


@dataclass
class MlmcEstimate:
    matrix: SparseSymMatrix
    block_counts: dict
    work: int
    seed: int
    diagnostics: dict = field(default_factory=dict)


def estimate(pattern: TaperPattern, sched: SampleSchedule, source,
             seed: int) -> MlmcEstimate:
    """Blockwise multilevel Monte Carlo estimator on the taper pattern.

    The level-pair sum runs over ordered pairs, so each off-diagonal block
    is estimated twice with independent draws of ``M_{jj'}`` samples (once
    per orientation); the two estimates are averaged, which keeps the result
    exactly symmetric and halves the off-diagonal block variance relative to
    a single mirrored estimate.
    """
    idx = pattern.idx
    if sched.J != idx.J or sched.j0 != idx.j0:
        raise ValueError("schedule and pattern must share the level range")
    p = idx.p
    est = np.zeros((p, p))
    block_counts = {}
    levels = list(idx.levels)
    stream_id = 1
    for a, j in enumerate(levels):
        sj = idx.level_slice(j)
        for jp in levels[a:]:
            sp = idx.level_slice(jp)
            m = sched.block_count(j, jp)
            block_counts[(j, jp)] = m
            Z = source.draw(max(j, jp), m, stream_id)
            stream_id += 1
            blk = (Z[:, sj].T @ Z[:, sp]) / m
            if jp == j:
                blk = 0.5 * (blk + blk.T)
            else:
                Z2 = source.draw(max(j, jp), m, stream_id)
                stream_id += 1
                blk = 0.5 * (blk + (Z2[:, sp].T @ Z2[:, sj]).T / m)
            bmask = pattern.mask[sj, sp]
            blk = np.where(bmask, blk, 0.0)
            est[sj, sp] = blk
            if jp != j:
                est[sp, sj] = blk.T
    M = sparse.csr_matrix(est)
    return MlmcEstimate(matrix=SparseSymMatrix(M), block_counts=block_counts,
                        work=sched.work(), seed=seed,
                        diagnostics={"regime": sched.regime})


def error_report(est: MlmcEstimate, truth: np.ndarray, idx: LevelIndexSet,
                 t: float = 0.0, tp: float = 0.0) -> dict:
    """Operator-norm error and the level-weighted block-norm surrogate."""
    truth = np.asarray(truth, dtype=float)
    E = est.matrix.to_dense()
    if truth.shape != E.shape:
        raise ValueError("dimension mismatch between estimate and truth")
    diff = truth - E
    op = float(np.linalg.norm(diff, 2))
    weighted = 0.0
    for j in idx.levels:
        for jp in idx.levels:
            blk = diff[idx.level_slice(j), idx.level_slice(jp)]
            weighted += 2.0 ** (-j * t - jp * tp) * float(np.linalg.norm(blk, 2))
    return {"op_norm_error": op, "weighted_error": weighted,
            "truth_norm": float(np.linalg.norm(truth, 2))}
