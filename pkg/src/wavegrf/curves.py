"""Closed parametrized curves in the plane.

Two families are supported: circles, and star-shaped boundaries whose
radius is a finite Fourier series

    g(phi) = a0 + (1/100) * sum_{k=1..5} (a_{-k} sin(k phi) + a_k cos(k phi)).

The test boundary used throughout the experiments ships as the preset
``paper_boundary()``.  All geometry (evaluation, arc-length weight, chordal
distance) is exact up to rounding; derivatives of g are analytic, not
numerical.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * np.pi

#: radius Fourier coefficients of the experiment boundary, index -5..5
BOUNDARY_COEFFS = {
    -5: 2.2, -4: 0.56, -3: 0.14, -2: 1.1, -1: 1.4,
    0: 50.0,
    1: -0.57, 2: -1.5, 3: -1.2, 4: -1.5, 5: 0.89,
}


@dataclass(frozen=True)
class CurvePoint:
    phi: float
    xy: tuple[float, float]


@dataclass(frozen=True)
class CurveSpec:
    """A closed curve: ``circle`` of given radius or ``fourier`` boundary.

    ``scale`` is a global rescaling of the ambient coordinates.
    """

    kind: str                      # "circle" | "fourier"
    radius: float = 1.0            # circle only
    cos_coeffs: tuple = ()         # fourier: (a0, a1, ..., a5)
    sin_coeffs: tuple = ()         # fourier: (a_{-1}, ..., a_{-5})
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("circle", "fourier"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.kind == "circle" and self.radius <= 0:
            raise ValueError("circle radius must be positive")
        if self.kind == "fourier":
            g = self.radius_at(np.linspace(0.0, TWO_PI, 4096, endpoint=False))
            if np.min(g) <= 0:
                raise ValueError("radius function must stay positive")

    # -- radius and derivatives ---------------------------------------------
    def radius_at(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == "circle":
            return np.full_like(phi, self.radius)
        a = self.cos_coeffs
        b = self.sin_coeffs
        g = np.full_like(phi, a[0])
        for k in range(1, len(a)):
            g = g + 0.01 * (b[k - 1] * np.sin(k * phi) + a[k] * np.cos(k * phi))
        return g

    def radius_deriv(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == "circle":
            return np.zeros_like(phi)
        a = self.cos_coeffs
        b = self.sin_coeffs
        dg = np.zeros_like(phi)
        for k in range(1, len(a)):
            dg = dg + 0.01 * k * (b[k - 1] * np.cos(k * phi) - a[k] * np.sin(k * phi))
        return dg

    # -- geometry -------------------------------------------------------------
    def xy(self, phi):
        """Ambient coordinates, shape (..., 2), scale applied."""
        phi = np.asarray(phi, dtype=float)
        g = self.scale * self.radius_at(phi)
        return np.stack([g * np.cos(phi), g * np.sin(phi)], axis=-1)

    def speed(self, phi):
        """|d gamma / d phi| (arc-length density in the scaled ambient space)."""
        g = self.radius_at(phi)
        dg = self.radius_deriv(phi)
        return self.scale * np.sqrt(g * g + dg * dg)

    # t-domain helpers (t in [0,1), phi = 2 pi t) used by Galerkin assembly
    def xy_t(self, t):
        return self.xy(TWO_PI * np.asarray(t, dtype=float))

    def weight_t(self, t):
        return TWO_PI * self.speed(TWO_PI * np.asarray(t, dtype=float))


def evaluate(curve: CurveSpec, phi: float) -> CurvePoint:
    phi = float(phi) % TWO_PI
    x, y = curve.xy(phi)
    return CurvePoint(phi, (float(x), float(y)))


def measure_weight(curve: CurveSpec, phi: float) -> float:
    return float(curve.speed(float(phi)))


def distance(curve: CurveSpec, phi1, phi2):
    """Chordal (ambient Euclidean) distance between curve points."""
    d = curve.xy(phi1) - curve.xy(phi2)
    return np.sqrt(np.sum(d * d, axis=-1))


def _golden_max(f, lo, hi, tol=1e-12, iters=200):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def diameter(curve: CurveSpec, grid: int = 4096, rtol: float = 1e-10) -> float:
    """Max chordal distance, by dense grid search plus 1-D refinement."""
    phi = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    pts = curve.xy(phi)
    best = 0.0
    bi = bj = 0
    chunk = 512
    for s in range(0, grid, chunk):
        d = np.linalg.norm(pts[s:s + chunk, None, :] - pts[None, :, :], axis=-1)
        k = int(np.argmax(d))
        i, j = divmod(k, grid)
        if d[i, j] > best:
            best, bi, bj = float(d[i, j]), s + i, j
    if best <= 0.0:
        raise ValueError("degenerate curve: zero diameter")
    # coordinate-wise golden-section refinement around the best grid pair
    h = TWO_PI / grid
    p1, p2 = phi[bi], phi[bj]
    for _ in range(4):
        p1 = _golden_max(lambda a: float(distance(curve, a, p2)), p1 - h, p1 + h,
                         tol=rtol * TWO_PI)
        p2 = _golden_max(lambda b: float(distance(curve, p1, b)), p2 - h, p2 + h,
                         tol=rtol * TWO_PI)
    return float(distance(curve, p1, p2))


def normalize_to_unit_diameter(curve: CurveSpec) -> CurveSpec:
    """Rescale so that the chordal diameter equals 1."""
    d = diameter(curve)
    return replace(curve, scale=curve.scale / d)


def circle(radius: float = 1.0, scale: float = 1.0) -> CurveSpec:
    return CurveSpec(kind="circle", radius=radius, scale=scale)


def paper_boundary(scale: float = 1.0) -> CurveSpec:
    """The analytic test boundary preset used by the experiment suite."""
    a = tuple(BOUNDARY_COEFFS[k] for k in range(0, 6))
    b = tuple(BOUNDARY_COEFFS[-k] for k in range(1, 6))
    return CurveSpec(kind="fourier", cos_coeffs=a, sin_coeffs=b, scale=scale)


CURVE_PRESETS = {
    "paper-boundary": paper_boundary,
    "unit-circle": lambda: circle(1.0),
}


def from_config(obj) -> CurveSpec:
    """Build a curve from a preset name or a config mapping."""
    if isinstance(obj, str):
        try:
            return CURVE_PRESETS[obj]()
        except KeyError:
            raise ValueError(f"unknown curve preset {obj!r}") from None
    kind = obj.get("kind", "circle")
    if kind == "circle":
        return circle(obj.get("radius", 1.0), obj.get("scale", 1.0))
    return CurveSpec(kind="fourier",
                     cos_coeffs=tuple(obj["cos_coeffs"]),
                     sin_coeffs=tuple(obj["sin_coeffs"]),
                     scale=obj.get("scale", 1.0))


def to_config(curve: CurveSpec) -> dict:
    if curve.kind == "circle":
        return {"kind": "circle", "radius": curve.radius, "scale": curve.scale}
    return {"kind": "fourier", "cos_coeffs": list(curve.cos_coeffs),
            "sin_coeffs": list(curve.sin_coeffs), "scale": curve.scale}


class ChordBounds:
    """Two-sided comparison of chordal distance with parameter distance.

    For star-shaped curves, ``c_lo * dt <= chord <= c_hi * dt`` where ``dt``
    is the circular parameter distance in [0, 1/2].  Used to prune distance
    computations in pattern construction.
    """

    def __init__(self, curve: CurveSpec, grid: int = 4096):
        phi = np.linspace(0.0, TWO_PI, grid, endpoint=False)
        r = curve.scale * curve.radius_at(phi)
        if np.min(r) <= 0:
            raise ValueError("chord bounds require a star-shaped curve")
        # chord >= 2 r_min sin(pi dt) >= 4 r_min dt on dt in [0, 1/2]
        self.c_lo = 4.0 * float(np.min(r)) * 0.999999
        self.c_hi = float(np.max(curve.weight_t(phi / TWO_PI))) * 1.000001
