import math

import numpy as np
import pytest

from sparsesel.core import InvalidArgumentError, InvalidCovarianceError
from sparsesel.simgen import (
    CovarianceSpec,
    SimConfig,
    augment_noise,
    corner_case,
    covariance_sqrt,
    default_n,
    factor_loadings,
    gen_beta,
    gen_covariance,
    noise_feature_cov,
    sample_dataset,
    stream,
)
from sparsesel.core import Dataset


def sim(p=5, s=2, sigma=1.0, cov=None, **kw):
    return SimConfig(p=p, s=s, sigma=sigma, cov=cov or CovarianceSpec("identity", p), **kw)


class TestCovariance:
    @pytest.mark.parametrize("p", [1, 4, 9])
    def test_exp_decay_zero(self, p):
        np.testing.assert_array_equal(gen_covariance(CovarianceSpec("exp_decay", p, q=0.0)), np.eye(p))

    def test_exp_decay_half(self):
        expected = [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]]
        np.testing.assert_allclose(gen_covariance(CovarianceSpec("exp_decay", 3, q=0.5)), expected)

    def test_constant(self):
        np.testing.assert_allclose(gen_covariance(CovarianceSpec("constant", 2, q=0.3)), [[1, 0.3], [0.3, 1]])

    def test_factor(self):
        spec = CovarianceSpec.preset("spiky-strong", 30, seed=3)
        v = factor_loadings(spec)
        np.testing.assert_allclose(v.T @ v, np.eye(2), atol=1e-10)
        assert np.linalg.matrix_rank(gen_covariance(spec) - np.eye(30), tol=1e-8) == 2
        assert spec.spikes == (60.0, 30.0)
        weak = CovarianceSpec.preset("spiky-weak", 16)
        assert weak.spikes == (8.0, 4.0)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            CovarianceSpec("exp_decay", 3, q=1.0)
        with pytest.raises(InvalidArgumentError):
            CovarianceSpec("factor", 3, k=2, spikes=(1.0,))
        with pytest.raises(InvalidArgumentError):
            CovarianceSpec("banded", 3)

    def test_indefinite_root(self):
        with pytest.raises(InvalidCovarianceError):
            covariance_sqrt(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestBeta:
    def test_floor_and_support(self):
        cfg = sim(p=50, s=7)
        beta = gen_beta(cfg, stream(1, 0, 0))
        assert np.all(beta[:7] >= 0.1)
        assert np.flatnonzero(beta).tolist() == list(range(7))

    def test_chi_square_mean(self):
        cfg = sim(p=100_000, s=100_000)
        beta = gen_beta(cfg, stream(2, 0, 0))
        assert np.mean(beta / 0.1 - 1) == pytest.approx(1.0, abs=0.02)

    def test_constant(self):
        beta = gen_beta(sim(p=6, s=3, beta_const=1.0), stream(0))
        np.testing.assert_array_equal(beta, [1, 1, 1, 0, 0, 0])


class TestSample:
    def test_noiseless(self):
        cfg = sim(p=4, s=2, sigma=0.0, n_override=20)
        beta = gen_beta(cfg, stream(0, 0))
        d = sample_dataset(cfg, beta, stream(0, 1))
        np.testing.assert_array_equal(d.y, d.x @ beta)

    def test_moments(self):
        cfg = sim(p=3, s=1, n_override=10_000)
        d = sample_dataset(cfg, np.array([1.0, 0, 0]), stream(5, 1))
        assert np.max(np.abs(np.cov(d.x.T) - np.eye(3))) < 0.05
        assert np.max(np.abs(d.x.mean(axis=0))) < 0.05

    def test_streams_independent_of_draw_count(self):
        a = stream(9, 3, 1).standard_normal(5)
        stream(9, 3, 0).standard_normal(1000)
        assert np.array_equal(a, stream(9, 3, 1).standard_normal(5))
        assert not np.array_equal(a, stream(9, 4, 1).standard_normal(5))


class TestNoise:
    def test_shape_and_cov(self):
        np.testing.assert_allclose(noise_feature_cov(2), [[1, 0.5], [0.5, 1]])
        base = Dataset(np.ones((10_000, 3)) + np.arange(3), np.zeros(10_000))
        out = augment_noise(base, 2, stream(1, 0, 2))
        assert out.p == 5
        np.testing.assert_array_equal(out.x[:, :3], base.x)
        assert np.corrcoef(out.x[:, 3], out.x[:, 4])[0, 1] == pytest.approx(0.5, abs=0.03)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            augment_noise(Dataset(np.ones((3, 1)), np.ones(3)), 0, stream(0))


class TestConfig:
    def test_default_n(self):
        assert default_n(5, 100) == 47
        assert default_n(10, 200) == 106
        assert default_n(50, 1000) == 691
        assert sim(p=100, s=5).n == 47

    def test_roundtrip(self):
        cfg = SimConfig(
            p=20, s=3, sigma=0.3, cov=CovarianceSpec.preset("spiky-weak", 20, seed=4), seed=11, beta_const=2.0
        )
        d = cfg.to_dict()
        d.pop("n")
        assert SimConfig.from_dict(d) == cfg

    def test_preset_from_dict(self):
        cfg = SimConfig.from_dict({"p": 10, "s": 2, "sigma": 1, "cov": {"preset": "spiky-strong"}})
        assert cfg.cov.variant == "factor" and cfg.cov.spikes == (20.0, 10.0)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            sim(p=3, s=4)
        with pytest.raises(InvalidArgumentError):
            sim(sigma=-1.0)
        with pytest.raises(InvalidArgumentError):
            SimConfig(p=4, s=2, sigma=1, cov=CovarianceSpec("identity", 5))


def test_corner_case_structure():
    d, beta = corner_case(0.5)
    assert (d.n, d.p) == (3, 4)
    np.testing.assert_allclose(d.y, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(np.linalg.norm(d.x, axis=0), 1.0)
    np.testing.assert_allclose(d.x[:, [2, 3]] @ [math.sqrt(2), -1.0], d.y, atol=1e-15)
