import numpy as np
import pytest

from wavegrf import mlmc
from wavegrf.mlmc import (CsvSampleSource, GaussianCoefficientSource,
                          error_report, estimate, schedule, write_sample_csv)


def test_schedule_factor_two_growth():
    """n = 1, alpha = 1/2 gives exactly factor 2 per level from the finest;
    anchored at 100 this is the reference table schedule."""
    s = schedule(J=11, j0=2, n=1, alpha=0.5, alpha0=2.0, M_finest=100)
    assert s.counts[11] == 100
    assert s.counts[10] == 200
    assert s.counts[2] == 100 * 2**9 == 51200
    assert s.regime == "2a=n"
    assert s.block_count(3, 11) == 100
    assert s.block_count(4, 5) == s.counts[5]


def test_schedule_single_level_and_regimes():
    s = schedule(J=2, j0=2, M_finest=100)
    assert s.counts == {2: 100}
    assert schedule(J=5, j0=2, alpha=1.0, alpha0=2.0).regime == "2a>n"
    assert schedule(J=5, j0=2, alpha=0.25, alpha0=2.0).regime == "2a<n"
    with pytest.raises(ValueError):
        schedule(J=5, j0=2, alpha=3.0, alpha0=2.0)
    with pytest.raises(ValueError):
        schedule(J=5, j0=2, M_finest=0)


def test_work_counter():
    s = schedule(J=5, j0=2, M_finest=100)
    expect = sum(m * 2**j for j, m in s.counts.items())
    assert s.work() == expect
    # borderline regime: work grows like J 2^J between levels
    w = [schedule(J=J, j0=2, M_finest=100).work() for J in (6, 7, 8)]
    for J, (a, b) in zip((6, 7), zip(w, w[1:])):
        predicted = (J + 1 - 1) * 2 ** (J + 1) / ((J - 1) * 2**J)
        assert b / a == pytest.approx(predicted, rel=0.25)


class ConstantSource:
    """Degenerate source: every draw is the same fixed vector."""

    def __init__(self, v, idx):
        self.v = np.asarray(v)
        self.idx = idx

    def draw(self, j_res, count, stream_id):
        p = self.idx.truncate(j_res).p
        return np.tile(self.v[:p], (count, 1))


def test_zero_variance_source_gives_tapered_outer_product(model):
    m = model("matern12", 2, 6, 64)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(64)
    sched = schedule(m.idx.J, m.idx.j0, M_finest=3)
    est = estimate(m.pattern, sched, ConstantSource(v, m.idx), seed=0)
    want = np.where(m.pattern.mask, np.outer(v, v), 0.0)
    np.testing.assert_allclose(est.matrix.to_dense(), want, atol=1e-12)


def test_estimate_deterministic_and_logged(model):
    m = model("matern12", 2, 6, 64)
    sched = schedule(m.idx.J, m.idx.j0, M_finest=20)
    Ceps = m.tapered.to_dense()
    e1 = estimate(m.pattern, sched, GaussianCoefficientSource(Ceps, m.idx, 5), seed=5)
    e2 = estimate(m.pattern, sched, GaussianCoefficientSource(Ceps, m.idx, 5), seed=5)
    assert np.array_equal(e1.matrix.to_dense(), e2.matrix.to_dense())
    # each block logs exactly M~_max(j, j') samples
    for (j, jp), mcount in e1.block_counts.items():
        assert mcount == sched.counts[max(j, jp)]
    assert e1.work == sched.work()
    # support contained in the pattern
    D = e1.matrix.to_dense()
    assert np.all(D[~m.pattern.mask] == 0.0)


def test_large_sample_estimate_approaches_truth(model):
    """With a huge flat sample budget the estimate matches the tapered
    covariance entrywise within 4 standard errors (truth from the dense
    oracle covariance of the source)."""
    m = model("matern12", 2, 6, 16)
    M = 200_000
    sched = mlmc.SampleSchedule(j0=m.idx.j0, J=m.idx.J,
                                counts={2: M, 3: M}, n=1, alpha=0.5, alpha0=2.0)
    C = m.tapered.to_dense()
    src = GaussianCoefficientSource(C, m.idx, seed=31)
    est = estimate(m.pattern, sched, src, seed=31).matrix.to_dense()
    # per-entry standard error of a Gaussian covariance estimate
    d = np.diag(C)
    se = np.sqrt((np.outer(d, d) + C**2) / M)
    mask = m.pattern.mask
    assert np.all(np.abs(est - np.where(mask, C, 0.0))[mask] <= 4.0 * se[mask])


def test_error_report_zero_and_norms(model):
    m = model("matern12", 2, 6, 64)
    C = m.wavelet_dense
    sched = schedule(m.idx.J, m.idx.j0, M_finest=50)
    src = ConstantSource(np.zeros(64), m.idx)
    est = estimate(m.pattern, sched, src, seed=0)
    rep = error_report(est, np.zeros_like(C), m.idx)
    assert rep["op_norm_error"] == 0.0
    rep2 = error_report(est, C, m.idx, t=0.0, tp=0.0)
    assert rep2["op_norm_error"] == pytest.approx(np.linalg.norm(C, 2))
    assert rep2["weighted_error"] >= rep2["op_norm_error"] - 1e-12
    with pytest.raises(ValueError):
        error_report(est, C[:32, :32], m.idx)


def test_doubling_samples_helps_sqrt2(model):
    """Doubling every per-level count reduces the mean error by about
    sqrt(2) (mean of 10 runs, 20 percent band)."""
    m = model("matern12", 2, 6, 64)
    C = m.wavelet_dense
    Ceps = m.tapered.to_dense()
    means = []
    for M in (100, 200):
        errs = []
        for r in range(10):
            sched = schedule(m.idx.J, m.idx.j0, M_finest=M)
            src = GaussianCoefficientSource(Ceps, m.idx, seed=900 + r)
            est = estimate(m.pattern, sched, src, seed=900 + r)
            errs.append(error_report(est, C, m.idx)["op_norm_error"])
        means.append(np.mean(errs))
    assert means[0] / means[1] == pytest.approx(np.sqrt(2.0), rel=0.2)


def test_csv_source_roundtrip_and_exhaustion(tmp_path, model):
    m = model("matern12", 2, 6, 16)
    rng = np.random.default_rng(3)
    files = {}
    for j in m.idx.levels:
        p_j = m.idx.truncate(j).p
        data = rng.standard_normal((8, p_j))
        path = tmp_path / f"samples_level{j}.csv"
        write_sample_csv(path, j, data)
        files[j] = path
    src = CsvSampleSource(files)
    out = src.draw(3, 5, 0)
    assert out.shape == (5, 16)
    out2 = src.draw(3, 3, 1)
    assert out2.shape == (3, 16)
    with pytest.raises(RuntimeError, match="exhausted"):
        src.draw(3, 1, 2)
    with pytest.raises(KeyError):
        src.draw(9, 1, 0)
