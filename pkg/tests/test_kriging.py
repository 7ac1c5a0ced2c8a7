import numpy as np
import pytest

from wavegrf import kriging, sampling
from wavegrf.kriging import (FactoredGram, ObservationSet,
                             build_observation_matrix,
                             equispaced_observations, gram_condition,
                             gram_matrix, posterior_mean, posterior_mean_dense,
                             predict_at)
from wavegrf.linalg import dense_bounds, dense_eigvals


def test_observation_validation():
    with pytest.raises(ValueError, match="positive"):
        ObservationSet(centers=np.array([0.5]), widths=np.array([0.1]), sigma2=0.0)
    with pytest.raises(ValueError, match="overlap"):
        ObservationSet(centers=np.array([0.1, 0.15]),
                       widths=np.array([0.2, 0.2]), sigma2=1.0)
    with pytest.raises(ValueError, match="overlap"):
        # wrap-around overlap
        ObservationSet(centers=np.array([0.99, 0.02]),
                       widths=np.array([0.08, 0.08]), sigma2=1.0)
    obs = equispaced_observations(8, 0.05, 1e-2)
    assert obs.K == 8


def test_norms_are_inverse_sqrt_mass(model):
    m = model("matern12", 2, 6, 128)
    obs = equispaced_observations(4, 0.05, 1e-2)
    norms = obs.norms(m.curve)
    for i, (c, w) in enumerate(zip(obs.centers, obs.widths)):
        t = np.linspace(c - w / 2, c + w / 2, 4001)
        mass = np.trapezoid(m.curve.weight_t(t % 1.0), t)
        assert norms[i] == pytest.approx(1.0 / np.sqrt(mass), rel=1e-3)


def test_observation_matrix_structure(model):
    m = model("matern12", 2, 6, 512)
    obs = equispaced_observations(32, 4.0 / 512, 1e-2)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    # single-scale rows are short bands: O(1) entries per functional
    assert om.G_single.nnz <= 32 * (4 + 2 * m.system.dt + 3)
    assert om.G.shape == (32, 512)
    # full-support constant functional pairs only with the coarsest block
    # (vanishing moments annihilate it on every detail row)
    whole = ObservationSet(centers=np.array([0.5]), widths=np.array([1.0]),
                           sigma2=1.0)
    om1 = build_observation_matrix(m.system, whole, m.idx.J, m.curve)
    row = om1.G[0]
    coarse = m.idx.level_slice(m.idx.j0)
    assert np.abs(row[coarse]).max() > 0.1
    assert np.abs(row[coarse.stop:]).max() <= 1e-10 * np.abs(row[coarse]).max()


def test_width_resolution_guard(model):
    m = model("matern12", 2, 6, 128)
    obs = equispaced_observations(4, 2.0 ** -10, 1e-2)
    with pytest.raises(ValueError, match="width"):
        build_observation_matrix(m.system, obs, m.idx.J, m.curve)


def test_factored_apply_equals_dense(model):
    m = model("matern12", 2, 6, 256)
    obs = equispaced_observations(16, 4.0 / 256, 1e-2)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    gram = FactoredGram(m.tapered, om, m.system, obs.sigma2)
    rng = np.random.default_rng(1)
    v = rng.standard_normal(16)
    dense = om.G @ m.tapered.to_dense() @ om.G.T @ v + obs.sigma2 * v
    np.testing.assert_allclose(gram(v), dense, rtol=1e-12, atol=1e-14)


def test_posterior_mean_zero_linear_scalar(model):
    m = model("matern12", 2, 6, 128)
    obs = equispaced_observations(8, 4.0 / 128, 1e-2)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    mu0, _ = posterior_mean(m.tapered, om, m.system, np.zeros(8), obs.sigma2)
    assert np.all(mu0 == 0.0)
    rng = np.random.default_rng(2)
    y1 = rng.standard_normal(8)
    y2 = rng.standard_normal(8)
    ma, _ = posterior_mean(m.tapered, om, m.system, y1, obs.sigma2, cg_tol=1e-13)
    mb, _ = posterior_mean(m.tapered, om, m.system, y2, obs.sigma2, cg_tol=1e-13)
    mab, _ = posterior_mean(m.tapered, om, m.system, y1 + y2, obs.sigma2,
                            cg_tol=1e-13)
    np.testing.assert_allclose(mab, ma + mb, atol=1e-8)
    # scalar closed form: mu = c g (c g^2 + s^2)^(-1) y
    c, g, s2, y = 2.5, 0.7, 0.3, 1.9
    mu = posterior_mean_dense(np.array([[c]]), np.array([[g]]), np.array([y]), s2)
    assert mu[0] == pytest.approx(c * g * y / (c * g * g + s2), rel=1e-14)


def test_posterior_matches_dense_oracle(model):
    m = model("matern12", 2, 6, 512)
    obs = equispaced_observations(32, 4.0 / 512, 1e-2)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    y = np.random.default_rng(3).standard_normal(32)
    mu, res = posterior_mean(m.tapered, om, m.system, y, obs.sigma2, cg_tol=1e-12)
    oracle = posterior_mean_dense(m.tapered.to_dense(), om.G, y, obs.sigma2)
    assert np.linalg.norm(mu - oracle) <= 1e-8 * np.linalg.norm(oracle)
    assert res.converged


def test_gram_spectrum_bounds(model):
    m = model("matern12", 2, 6, 256)
    obs = equispaced_observations(16, 4.0 / 256, 1e-2)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    ev = dense_eigvals(gram_matrix(m.tapered, om, m.system, obs.sigma2))
    assert ev[0] >= obs.sigma2 - 1e-12
    # very large noise: condition tends to one
    big = gram_condition(m.tapered, om, m.system, 1e8)
    assert big == pytest.approx(1.0, abs=1e-6)


def test_gram_condition_plateaus_in_p(model):
    """cond stays bounded by C max ||g||^2 / sigma^2 + 1 with a stable C
    under p-refinement at fixed K."""
    sigma2 = 1e-2
    conds, bounds_ = [], []
    for p in (128, 256, 512):
        m = model("matern12", 2, 6, p)
        obs = equispaced_observations(16, 1.0 / 64, sigma2)
        om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
        conds.append(gram_condition(m.tapered, om, m.system, sigma2))
        bounds_.append(np.max(obs.norms(m.curve)) ** 2 / sigma2 + 1.0)
    conds = np.array(conds)
    assert conds.max() / conds.min() <= 1.5
    assert np.all(conds <= 5.0 * np.array(bounds_))


def test_predictions(model):
    m = model("matern12", 2, 6, 512)
    obs = equispaced_observations(32, 4.0 / 512, 1e-6)
    om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
    # zero coefficients predict zero
    assert np.all(predict_at(m.system, m.curve, np.zeros(512),
                             np.array([0.1, 0.6])) == 0.0)
    # small-noise consistency: prediction at the box center reproduces the
    # noiseless local-average datum within 2 percent of the data scale
    q = sampling.build_contour(dense_bounds(m.preconditioned), 40)
    z = sampling.GrfSampler(m.tapered, m.idx, m.order.ra, q).draw(seed=9)
    y = om.G @ z.coefficients
    mu, _ = posterior_mean(m.tapered, om, m.system, y, 1e-6, cg_tol=1e-9)
    pred = predict_at(m.system, m.curve, mu, obs.centers)
    assert np.max(np.abs(pred - y)) <= 0.02 * max(1.0, np.abs(y).max())


def test_cg_iterations_stable_in_p(model):
    iters = []
    for p in (128, 256, 512):
        m = model("matern12", 2, 6, p)
        obs = equispaced_observations(16, 1.0 / 64, 1e-2)
        om = build_observation_matrix(m.system, obs, m.idx.J, m.curve)
        y = np.random.default_rng(5).standard_normal(16)
        _, res = posterior_mean(m.tapered, om, m.system, y, 1e-2, cg_tol=1e-10)
        iters.append(res.iterations)
    assert max(iters) - min(iters) <= 2
