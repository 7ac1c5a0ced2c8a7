"""Symmetric linear algebra: sparse storage, preconditioning, CG, Lanczos,
condition numbers, and the dense eigen oracle used by validation paths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .wavelets import LevelIndexSet, diag_scaling


class SparseSymMatrix:
    """CSR-backed symmetric sparse matrix (values stored on both triangles)."""

    def __init__(self, csr: sparse.csr_matrix, check: bool = True):
        csr = sparse.csr_matrix(csr)
        csr.eliminate_zeros()
        csr.sum_duplicates()
        if check:
            if csr.shape[0] != csr.shape[1]:
                raise ValueError("matrix must be square")
            d = (csr - csr.T).tocoo()
            if d.nnz and np.max(np.abs(d.data)) > 1e-12 * max(1.0, abs(csr).max()):
                raise ValueError("matrix is not symmetric")
        self.csr = csr

    @property
    def shape(self):
        return self.csr.shape

    @property
    def p(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.csr @ x

    __matmul__ = matvec

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self.csr.diagonal()

    def scaled(self, dvec: np.ndarray) -> "SparseSymMatrix":
        D = sparse.diags(dvec)
        return SparseSymMatrix((D @ self.csr @ D).tocsr(), check=False)


def precondition(A, idx: LevelIndexSet | None = None, s: float | None = None,
                 mode: str = "levels"):
    """Two-sided diagonal scaling ``D A D``.

    ``mode='levels'`` uses ``D = diag(2^(s |lam|))`` over ``idx``;
    ``mode='jacobi'`` uses ``D = diag(A)^(-1/2)``.
    Returns the same container type (dense array or SparseSymMatrix).
    """
    if mode == "levels":
        if idx is None or s is None:
            raise ValueError("levels mode needs an index set and exponent")
        d = diag_scaling(idx, s)
    elif mode == "jacobi":
        diag = A.diagonal() if isinstance(A, SparseSymMatrix) else np.diag(A)
        if np.any(diag <= 0):
            raise ValueError("jacobi scaling needs positive diagonal entries")
        d = 1.0 / np.sqrt(diag)
    else:
        raise ValueError(f"unknown preconditioning mode {mode!r}")
    if isinstance(A, SparseSymMatrix):
        return A.scaled(d)
    A = np.asarray(A)
    if A.shape[0] != len(d):
        raise ValueError("dimension mismatch")
    return d[:, None] * A * d[None, :]


@dataclass
class CgResult:
    x: np.ndarray
    iterations: int
    converged: bool
    residual: float


def _as_apply(A):
    if callable(A) and not isinstance(A, (np.ndarray, SparseSymMatrix)):
        return A
    if isinstance(A, SparseSymMatrix):
        return A.matvec
    M = np.asarray(A)
    return lambda x: M @ x


def cg_solve(A, b: np.ndarray, tol: float = 1e-12, max_iter: int | None = None,
             track_error=None) -> CgResult:
    """Conjugate gradients with residual stopping ``|r| <= tol |b|``.

    Raises on non-finite values or on indefinite curvature (p^T A p <= 0).
    ``track_error`` is an optional callback receiving the iterate each step.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    apply_A = _as_apply(A)
    b = np.asarray(b, dtype=float)
    n = len(b)
    max_iter = 10 * n if max_iter is None else max_iter
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    bn = np.sqrt(float(b @ b))
    if bn == 0.0:
        return CgResult(x, 0, True, 0.0)
    it = 0
    while np.sqrt(rs) > tol * bn and it < max_iter:
        Ap = apply_A(p)
        if not np.all(np.isfinite(Ap)):
            raise FloatingPointError("non-finite value in CG matvec")
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise np.linalg.LinAlgError("CG breakdown: operator is not SPD")
        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
        it += 1
        if track_error is not None:
            track_error(x)
    return CgResult(x, it, np.sqrt(rs) <= tol * bn, float(np.sqrt(rs) / bn))


@dataclass
class SpectralBounds:
    lambda_min: float
    lambda_max: float
    method: str
    rtol: float

    def widened(self, safety: float = 0.1) -> "SpectralBounds":
        return SpectralBounds(self.lambda_min / (1.0 + safety),
                              self.lambda_max * (1.0 + safety),
                              self.method, self.rtol)

    @property
    def cond(self) -> float:
        return self.lambda_max / self.lambda_min


def lanczos_extremes(A, p: int, tol: float = 1e-8, seed: int = 7,
                     max_iter: int | None = None) -> SpectralBounds:
    """Extremal eigenvalues by Lanczos with full reorthogonalization.

    Deterministic for a given seed.  Raises if the extremes have not
    stabilized to relative tolerance within the iteration cap.
    """
    apply_A = _as_apply(A)
    max_iter = min(p, 400) if max_iter is None else min(max_iter, p)
    rng = np.random.Generator(np.random.Philox(key=[seed, 0x1a2b3c4d]))
    q = rng.standard_normal(p)
    q /= np.linalg.norm(q)
    Q = np.zeros((p, max_iter))
    alphas, betas = [], []
    prev = None
    beta = 0.0
    q_prev = np.zeros(p)
    for m in range(max_iter):
        Q[:, m] = q
        u = apply_A(q)
        a = float(q @ u)
        alphas.append(a)
        u = u - a * q - beta * q_prev
        u -= Q[:, :m + 1] @ (Q[:, :m + 1].T @ u)          # full reorthogonalization
        beta = float(np.linalg.norm(u))
        T = np.diag(alphas)
        if betas:
            T += np.diag(betas, 1) + np.diag(betas, -1)
        ev = np.linalg.eigvalsh(T)
        cur = (ev[0], ev[-1])
        if m + 1 == p:
            return SpectralBounds(cur[0], cur[1], "lanczos", 0.0)
        if prev is not None and beta > 0:
            ok_min = abs(cur[0] - prev[0]) <= tol * max(abs(cur[0]), 1e-300)
            ok_max = abs(cur[1] - prev[1]) <= tol * abs(cur[1])
            if ok_min and ok_max and m >= 8:
                return SpectralBounds(cur[0], cur[1], "lanczos", tol)
        prev = cur
        if beta == 0.0:
            return SpectralBounds(cur[0], cur[1], "lanczos", 0.0)
        betas.append(beta)
        q_prev = q
        q = u / beta
    raise RuntimeError(f"Lanczos did not converge; best bounds {prev}")


def dense_bounds(A) -> SpectralBounds:
    ev = dense_eigvals(A)
    return SpectralBounds(float(ev[0]), float(ev[-1]), "dense", 0.0)


def _require_symmetric(A) -> np.ndarray:
    M = A.to_dense() if isinstance(A, SparseSymMatrix) else np.asarray(A, dtype=float)
    if M.shape[0] != M.shape[1] or not np.allclose(M, M.T, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError("dense oracle requires a symmetric matrix")
    return M


def dense_eigvals(A) -> np.ndarray:
    return np.linalg.eigvalsh(_require_symmetric(A))


def condition_number(A, dense_limit: int = 2048) -> float:
    """2-norm condition number; dense path up to ``dense_limit``, else Lanczos."""
    p = A.shape[0]
    if p <= dense_limit:
        ev = dense_eigvals(A)
        lo, hi = float(ev[0]), float(ev[-1])
    else:
        b = lanczos_extremes(A, p)
        lo, hi = b.lambda_min, b.lambda_max
    if lo <= 0:
        raise np.linalg.LinAlgError(f"matrix is not positive definite (min eig {lo:.3e})")
    return hi / lo


class DenseOracle:
    """Full symmetric eigendecomposition with square root and Cholesky."""

    def __init__(self, A):
        M = _require_symmetric(A)
        if M.shape[0] > 4096:
            raise ValueError("dense oracle capped at p = 4096")
        self.eigenvalues, self.vectors = np.linalg.eigh(M)
        self._M = M

    def sqrt(self) -> np.ndarray:
        if np.min(self.eigenvalues) < 0 and np.min(self.eigenvalues) < -1e-12 * max(self.eigenvalues):
            raise np.linalg.LinAlgError("matrix square root needs PSD input")
        lam = np.sqrt(np.maximum(self.eigenvalues, 0.0))
        return (self.vectors * lam) @ self.vectors.T

    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self._M)

    def apply_function(self, f) -> np.ndarray:
        return (self.vectors * f(self.eigenvalues)) @ self.vectors.T
