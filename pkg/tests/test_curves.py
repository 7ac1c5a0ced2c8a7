import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavegrf import curves
from wavegrf.curves import (ChordBounds, CurveSpec, circle, diameter, distance,
                            evaluate, measure_weight, normalize_to_unit_diameter,
                            paper_boundary)


def test_circle_evaluate():
    c = circle(1.0)
    pt = evaluate(c, 0.0)
    assert pt.xy == pytest.approx((1.0, 0.0))
    assert evaluate(c, np.pi).xy == pytest.approx((-1.0, 0.0))
    # phi reduced mod 2 pi
    assert evaluate(c, 2 * np.pi + 0.25).phi == pytest.approx(0.25)


def test_boundary_radius_and_point_at_zero():
    b = paper_boundary()
    # direct evaluation of the finite Fourier series at phi = 0
    assert b.radius_at(0.0) == pytest.approx(49.9612, abs=1e-12)
    assert evaluate(b, 0.0).xy[0] == pytest.approx(49.9612, abs=1e-12)
    assert evaluate(b, 0.0).xy[1] == pytest.approx(0.0, abs=1e-12)


def test_boundary_weight_at_zero():
    b = paper_boundary()
    # g'(0) = (1/100) sum k a_{-k}, cross-checked by central differences
    gp = sum(k * c for k, c in zip(range(1, 6), (1.4, 1.1, 0.14, 0.56, 2.2))) / 100.0
    assert b.radius_deriv(0.0) == pytest.approx(gp, abs=1e-14)
    h = 1e-6
    fd = (b.radius_at(h) - b.radius_at(-h)) / (2 * h)
    assert b.radius_deriv(0.0) == pytest.approx(fd, abs=1e-7)
    assert measure_weight(b, 0.0) == pytest.approx(np.hypot(49.9612, gp), rel=1e-12)


def test_circle_weights():
    assert measure_weight(circle(1.0), 0.3) == pytest.approx(1.0)
    assert measure_weight(circle(2.0), 1.1) == pytest.approx(2.0)


def test_distances_trivial():
    c = circle(1.0)
    assert distance(c, 0.0, np.pi) == pytest.approx(2.0)
    assert distance(c, 0.7, 0.7) == 0.0
    assert distance(c, 0.0, np.pi / 2) == pytest.approx(np.sqrt(2.0))


@settings(max_examples=60, deadline=None)
@given(st.tuples(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi),
                 st.floats(0, 2 * np.pi)))
def test_distance_is_a_metric_on_samples(phis):
    b = paper_boundary()
    p1, p2, p3 = phis
    d12 = float(distance(b, p1, p2))
    d21 = float(distance(b, p2, p1))
    d13 = float(distance(b, p1, p3))
    d23 = float(distance(b, p2, p3))
    assert abs(d12 - d21) <= 1e-12
    assert d13 <= d12 + d23 + 1e-12


def test_normalize_circle():
    nc = normalize_to_unit_diameter(circle(3.0))
    assert nc.scale == pytest.approx(1.0 / 6.0, rel=1e-10)
    # idempotence up to tolerance
    nc2 = normalize_to_unit_diameter(nc)
    assert nc2.scale == pytest.approx(nc.scale, rel=1e-9)


def test_normalize_boundary_unit_diameter():
    nb = normalize_to_unit_diameter(paper_boundary())
    phi = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    pts = nb.xy(phi)
    dmax = 0.0
    for s in range(0, 1024, 128):
        d = np.linalg.norm(pts[s:s + 128, None, :] - pts[None, :, :], axis=-1)
        dmax = max(dmax, float(d.max()))
    assert 0.999 <= dmax <= 1.0 + 1e-12


def test_weight_positive_on_grid():
    b = paper_boundary()
    phi = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    assert np.min(b.speed(phi)) > 0


def test_degenerate_curve_rejected():
    with pytest.raises(ValueError):
        CurveSpec(kind="circle", radius=-1.0)
    with pytest.raises(ValueError):
        CurveSpec(kind="fourier", cos_coeffs=(0.1, 0.0, 0.0, 0.0, 0.0, 20.0),
                  sin_coeffs=(0.0,) * 5)


def test_chord_bounds_bracket():
    b = normalize_to_unit_diameter(paper_boundary())
    cb = ChordBounds(b)
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 1, (200, 2))
    chord = np.linalg.norm(b.xy_t(t[:, 0]) - b.xy_t(t[:, 1]), axis=-1)
    dt = np.abs(t[:, 0] - t[:, 1])
    dt = np.minimum(dt, 1 - dt)
    assert np.all(chord >= cb.c_lo * dt - 1e-12)
    assert np.all(chord <= cb.c_hi * dt + 1e-12)


def test_config_roundtrip():
    b = paper_boundary(scale=0.5)
    again = curves.from_config(curves.to_config(b))
    assert again == b
    assert curves.from_config("paper-boundary").kind == "fourier"
    with pytest.raises(ValueError):
        curves.from_config("no-such-preset")
