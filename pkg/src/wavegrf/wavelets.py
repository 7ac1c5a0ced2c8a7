"""Periodic multiresolution system on the parameter circle [0, 1).

Index convention: the wavelet index set ``Lambda_J`` holds the coarsest
scaling block (level label ``j0``, the ``2**(j0+1)`` scaling functions of
level ``j0 + 1``) followed by genuine wavelet blocks at levels
``j0+1, ..., J`` with ``2**j`` translates each, so ``p = 2**(J+1)``.  The
flat layout is level-major, translate-minor.  A coefficient vector of
length ``p`` in single-scale (hat) coordinates lives at level ``J + 1``.

Basis functions are L2-normalized in the parameter domain; the curve
measure is handled by Galerkin assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .filters import FilterBank, Mask, build_filter_bank

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class MultiIndex:
    j: int
    k: int


class LevelIndexSet:
    """Flat layout bookkeeping for ``Lambda_J = {(j,k): j0 <= j <= J}``."""

    def __init__(self, j0: int, J: int):
        if J < j0:
            raise ValueError(f"need J >= j0, got j0={j0}, J={J}")
        self.j0 = j0
        self.J = J
        sizes = [2 ** (j0 + 1)] + [2**j for j in range(j0 + 1, J + 1)]
        self.level_sizes = dict(zip(range(j0, J + 1), sizes))
        offs = np.concatenate([[0], np.cumsum(sizes)])
        self._offsets = {j: int(offs[i]) for i, j in enumerate(range(j0, J + 1))}
        self.p = int(offs[-1])

    @property
    def levels(self) -> range:
        return range(self.j0, self.J + 1)

    def level_slice(self, j: int) -> slice:
        off = self._offsets[j]
        return slice(off, off + self.level_sizes[j])

    def level_of_position(self) -> np.ndarray:
        out = np.empty(self.p, dtype=int)
        for j in self.levels:
            out[self.level_slice(j)] = j
        return out

    def position(self, lam: MultiIndex) -> int:
        if not (0 <= lam.k < self.level_sizes[lam.j]):
            raise IndexError(f"translate {lam.k} out of range at level {lam.j}")
        return self._offsets[lam.j] + lam.k

    def multi_index(self, pos: int) -> MultiIndex:
        for j in self.levels:
            s = self.level_slice(j)
            if s.start <= pos < s.stop:
                return MultiIndex(j, pos - s.start)
        raise IndexError(pos)

    def truncate(self, J: int) -> "LevelIndexSet":
        """Nested sub-index-set; its flat layout is a prefix of this one."""
        return LevelIndexSet(self.j0, J)


def index_set_for_dim(p: int, j0: int) -> LevelIndexSet:
    J = int(np.log2(p)) - 1
    if 2 ** (J + 1) != p or J < j0:
        raise ValueError(f"p={p} is not 2**(J+1) with J >= j0={j0}")
    return LevelIndexSet(j0, J)


def diag_scaling(idx: LevelIndexSet, s: float) -> np.ndarray:
    """Entries ``2**(s*|lambda|)`` over the flat layout."""
    return np.power(2.0, s * idx.level_of_position())


def _analysis_step(c: np.ndarray, mask: Mask) -> np.ndarray:
    """Periodic correlate-downsample: ``out[k] = 2^-1/2 sum_i m_i c[2k+i]``."""
    n = c.shape[0]
    nk = n // 2
    out = np.zeros((nk,) + c.shape[1:])
    for i, w in zip(range(mask.start, mask.stop + 1), mask.coeffs):
        p0 = i % 2
        s = (i - p0) // 2
        out += w * np.roll(c[p0::2], -s, axis=0)
    return out / SQRT2


def _synthesis_step(c: np.ndarray, d: np.ndarray, lo: Mask, hi: Mask) -> np.ndarray:
    """Periodic upsample-convolve, inverse of the paired analysis steps."""
    nk = c.shape[0]
    out = np.zeros((2 * nk,) + c.shape[1:])
    for block, mask in ((c, lo), (d, hi)):
        for i, w in zip(range(mask.start, mask.stop + 1), mask.coeffs):
            p0 = i % 2
            s = (i - p0) // 2
            out[p0::2] += w * np.roll(block, s, axis=0)
    return out / SQRT2


class WaveletSystem:
    """Biorthogonal spline wavelet system with fast periodic transforms.

    ``fwt``/``ifwt`` move between single-scale (hat) coefficients and
    coefficients of the spline-wavelet expansion; ``fwt_dual``/``ifwt_dual``
    are the corresponding analysis/synthesis for the dual family.  The four
    maps satisfy ``ifwt = fwt^-1``, ``ifwt_dual = fwt_dual^-1`` and the
    adjoint relations ``fwt_dual = ifwt^T``, ``fwt = ifwt_dual^T``.
    """

    def __init__(self, d: int, dt: int, j0: int | None = None):
        self.bank: FilterBank = build_filter_bank(d, dt)
        self.d = d
        self.dt = dt
        self.j0 = self.bank.default_j0 if j0 is None else j0
        if self.j0 < 1:
            raise ValueError("coarsest level j0 must be >= 1")
        # translates must stay distinguishable after periodization at the
        # coarsest block produced by the transforms
        halfcorr = (len(self.bank.lo_dual.coeffs) + len(self.bank.lo.coeffs)) // 4 + 1
        if 2 ** (self.j0 + 1) <= halfcorr:
            raise ValueError(f"j0={self.j0} too small for (d,dt)=({d},{dt})")

    # -- index helpers -----------------------------------------------------
    def index_set(self, J: int) -> LevelIndexSet:
        return LevelIndexSet(self.j0, J)

    def index_set_for_dim(self, p: int) -> LevelIndexSet:
        return index_set_for_dim(p, self.j0)

    def _check_len(self, n: int) -> int:
        J = int(np.log2(n)) - 1
        if 2 ** (J + 1) != n or J < self.j0:
            raise ValueError(f"vector length {n} is not 2**(J+1) with J >= j0")
        return J

    # -- transforms --------------------------------------------------------
    def fwt(self, values: np.ndarray) -> np.ndarray:
        """Single-scale coefficients -> spline-wavelet coefficients."""
        J = self._check_len(np.asarray(values).shape[0])
        c = np.asarray(values, dtype=float)
        blocks = []
        for j in range(J, self.j0, -1):
            d = _analysis_step(c, self.bank.hi_dual)
            c = _analysis_step(c, self.bank.lo_dual)
            blocks.append(d)
        blocks.append(c)
        return np.concatenate(blocks[::-1], axis=0)

    def ifwt(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`fwt` (synthesis with the spline masks)."""
        return self._synthesize(coeffs, self.bank.lo, self.bank.hi)

    def fwt_dual(self, values: np.ndarray) -> np.ndarray:
        """Analysis with the spline masks (adjoint of :meth:`ifwt`)."""
        J = self._check_len(np.asarray(values).shape[0])
        c = np.asarray(values, dtype=float)
        blocks = []
        for j in range(J, self.j0, -1):
            d = _analysis_step(c, self.bank.hi)
            c = _analysis_step(c, self.bank.lo)
            blocks.append(d)
        blocks.append(c)
        return np.concatenate(blocks[::-1], axis=0)

    def ifwt_dual(self, coeffs: np.ndarray) -> np.ndarray:
        """Synthesis with the dual masks (adjoint of :meth:`fwt`)."""
        return self._synthesize(coeffs, self.bank.lo_dual, self.bank.hi_dual)

    def _synthesize(self, coeffs: np.ndarray, lo: Mask, hi: Mask) -> np.ndarray:
        w = np.asarray(coeffs, dtype=float)
        idx = self.index_set_for_dim(w.shape[0])
        c = w[idx.level_slice(self.j0)]
        for j in range(self.j0 + 1, idx.J + 1):
            c = _synthesis_step(c, w[idx.level_slice(j)], lo, hi)
        return c

    # -- support geometry --------------------------------------------------
    def support(self, lam: MultiIndex) -> tuple[float, float]:
        """Parameter interval ``(start, width)`` of the basis function, mod 1.

        Width is capped at 1 when the periodized function covers the circle.
        """
        lo, hi = self._reference_support(lam.j)
        j_eff = lam.j + 1 if lam.j == self.j0 else lam.j
        h = 2.0 ** (-j_eff)
        return ((lam.k + lo) * h) % 1.0, min((hi - lo) * h, 1.0)

    def _reference_support(self, j: int) -> tuple[float, float]:
        if j == self.j0:          # coarse block: hat at level j0+1
            return (-1.0, 1.0)
        return (-self.dt / 2.0, self.dt / 2.0 + 1.0)

    def support_width(self, j: int) -> float:
        lo, hi = self._reference_support(j)
        j_eff = j + 1 if j == self.j0 else j
        return (hi - lo) * 2.0 ** (-j_eff)

    def singular_support(self, lam: MultiIndex) -> np.ndarray:
        """Spline knots of the (piecewise linear) basis function, mod 1."""
        lo, hi = self._reference_support(lam.j)
        if lam.j == self.j0:
            knots = np.arange(lo, hi + 0.5, 1.0)
            h = 2.0 ** (-(lam.j + 1))
        else:
            knots = np.arange(lo, hi + 0.25, 0.5)
            h = 2.0 ** (-lam.j)
        return ((lam.k + knots) * h) % 1.0

    # -- pointwise evaluation ----------------------------------------------
    @lru_cache(maxsize=8)
    def scaling_values(self, dual: bool = True, sweeps: int = 8) -> tuple[np.ndarray, float]:
        """Values of the (dual) scaling function on a dyadic grid.

        Returns ``(values, step)`` with ``values[i]`` the function at
        ``support_start + i * step``.  The dual function is evaluated by the
        refinement cascade seeded with its exact integer-grid values (the
        eigenvector of the downsampled two-scale relation); the primal hat is
        exact by closed form.
        """
        if not dual:
            lo, hi = -1, 1
            step = 2.0**-sweeps
            x = np.arange(lo, hi + step / 2, step)
            return np.maximum(0.0, 1.0 - np.abs(x)), step
        mask = self.bank.lo_dual
        lo, hi = mask.start, mask.stop
        # exact values at the interior integers: eigenvector of T[n,i] = a_{2n-i}
        pts = np.arange(lo + 1, hi)
        T = np.zeros((len(pts), len(pts)))
        for a, n in enumerate(pts):
            for b, i in enumerate(pts):
                t = 2 * n - i
                if mask.start <= t <= mask.stop:
                    T[a, b] = mask.coeffs[t - mask.start]
        w, V = np.linalg.eig(T)
        v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
        v /= v.sum()
        vals = np.zeros(hi - lo + 1)
        vals[1:-1] = v
        for m in range(1, sweeps + 1):
            n_prev = len(vals)
            new = np.zeros(2 * n_prev - 1)
            new[::2] = vals
            # odd grid points: f(lo + s 2^-m) = sum_i a_i f(2(lo + s 2^-m) - i),
            # the argument sits at previous-grid index (lo - i) 2^(m-1) + s
            s = np.arange(1, 2 * n_prev - 1, 2)
            acc = np.zeros(len(s))
            for i, c in zip(range(mask.start, mask.stop + 1), mask.coeffs):
                j = (lo - i) * 2 ** (m - 1) + s
                ok = (j >= 0) & (j < n_prev)
                acc[ok] += c * vals[j[ok]]
            new[1::2] = acc
            vals = new
        return vals, 2.0**-sweeps

    @lru_cache(maxsize=8)
    def wavelet_values(self, dual: bool = True, sweeps: int = 8) -> tuple[np.ndarray, float]:
        """Values of the (dual) mother wavelet on a dyadic grid, as above."""
        phi, step = self.scaling_values(dual=dual, sweeps=sweeps)
        mask = self.bank.hi_dual if dual else self.bank.hi
        sc_lo = self.bank.lo_dual.start if dual else self.bank.lo.start
        sc_hi = self.bank.lo_dual.stop if dual else self.bank.lo.stop
        lo = (mask.start + sc_lo) / 2.0
        hi = (mask.stop + sc_hi) / 2.0
        n = int(round((hi - lo) / (step / 1))) + 1
        x = lo + np.arange(n) * step
        out = np.zeros(n)
        for i, c in zip(range(mask.start, mask.stop + 1), mask.coeffs):
            arg = 2.0 * x - i
            j = np.round((arg - sc_lo) / step).astype(int)
            ok = (j >= 0) & (j < len(phi))
            out[ok] += c * phi[j[ok]]
        return out, step

    def synthesize_on_grid(self, coeffs: np.ndarray, resolution: int,
                           dual: bool = True) -> np.ndarray:
        """Evaluate ``sum_lam coeffs[lam] * basis_lam`` on the grid ``2^-resolution``.

        With ``dual=True`` this realizes the field expansion in the dual
        family.  ``resolution`` must be at least the single-scale level.
        """
        idx = self.index_set_for_dim(np.asarray(coeffs).shape[0])
        L = idx.J + 1
        if resolution < L:
            raise ValueError(f"resolution 2^-{resolution} too coarse for level {L}")
        c = self.ifwt_dual(coeffs) if dual else self.ifwt(coeffs)
        sweeps = resolution - L
        phi, _ = self.scaling_values(dual=dual, sweeps=max(sweeps, 1))
        stride = 1 if sweeps >= 1 else 2
        vals = phi[::stride]                       # values at step 2^-sweeps
        start = self.bank.lo_dual.start if dual else -1
        n = 2**resolution
        per = 2**sweeps
        out = np.zeros(n)
        scale = 2.0 ** (L / 2.0)
        ks = np.arange(2**L)
        # field(t_m) = sum_k c_k 2^{L/2} phi(m/per - k); grid point m receives
        # the tabulated value at index i where m = per*(k + start) + i
        for i, v in enumerate(vals):
            if v == 0.0:
                continue
            pos = (ks * per + start * per + i) % n
            out[pos] += v * scale * c[ks]
        return out


@lru_cache(maxsize=16)
def get_system(d: int, dt: int, j0: int | None = None) -> WaveletSystem:
    return WaveletSystem(d, dt, j0)
