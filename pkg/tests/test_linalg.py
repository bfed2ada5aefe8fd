import itertools

import numpy as np
import pytest

from conftest import dense_projection
from sparsesel.core import Dataset, OverParameterizedError, SingularBlockError
from sparsesel.linalg import (
    conditional_cov,
    conditional_cov_projection,
    lstsq_qr,
    ols_fit,
    projection_residual,
    restricted_eigs,
    rss,
)
from sparsesel.simgen import corner_case


def test_ols_identity():
    fit = ols_fit(Dataset(np.eye(2), [2.0, 3.0]), [0, 1])
    np.testing.assert_allclose(fit.coefficients, [2, 3])
    assert fit.rss == pytest.approx(0, abs=1e-24)


def test_ols_empty(rng):
    d = Dataset(rng.standard_normal((5, 3)), rng.standard_normal(5))
    fit = ols_fit(d, [])
    assert fit.coefficients.shape == (0,)
    assert fit.rss == pytest.approx(float(d.y @ d.y))
    assert rss(d, []) == pytest.approx(float(d.y @ d.y))


@pytest.mark.parametrize("n,p,s", [(3, 3, (0, 2)), (5, 3, (0, 1, 2)), (30, 8, (1, 4, 6))])
def test_rss_matches_dense_projection(rng, n, p, s):
    d = Dataset(rng.standard_normal((n, p)), rng.standard_normal(n))
    proj = dense_projection(d.x[:, list(s)])
    expected = d.y @ (np.eye(n) - proj) @ d.y
    assert rss(d, s) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_rss_in_span(rng):
    x = rng.standard_normal((10, 4))
    d = Dataset(x, x[:, [1, 3]] @ [2.0, -1.0])
    assert rss(d, [1, 3]) <= 1e-10 * float(d.y @ d.y)


def test_overparameterized(rng):
    d = Dataset(rng.standard_normal((3, 5)), rng.standard_normal(3))
    with pytest.raises(OverParameterizedError):
        ols_fit(d, [0, 1, 2, 3])


def test_rank_deficient_min_norm(rng):
    x = rng.standard_normal((10, 2))
    x = np.column_stack([x, x[:, 0] + x[:, 1]])
    y = rng.standard_normal(10)
    np.testing.assert_allclose(lstsq_qr(x, y), np.linalg.pinv(x) @ y, atol=1e-10)


class TestProjectionResidual:
    def test_empty(self, rng):
        d = Dataset(rng.standard_normal((6, 3)), np.zeros(6))
        v = rng.standard_normal(6)
        np.testing.assert_array_equal(projection_residual(d, [], v), v)

    def test_in_span(self, rng):
        d = Dataset(rng.standard_normal((6, 3)), np.zeros(6))
        out = projection_residual(d, [0, 2], d.x[:, 0])
        assert np.linalg.norm(out) < 1e-12

    def test_dense_oracle(self, rng):
        d = Dataset(rng.standard_normal((12, 5)), np.zeros(12))
        v = rng.standard_normal(12)
        expected = (np.eye(12) - dense_projection(d.x[:, [1, 2, 4]])) @ v
        np.testing.assert_allclose(projection_residual(d, [1, 2, 4], v), expected, atol=1e-12)


class TestConditionalCov:
    def test_orthonormal_in_sample(self):
        n = 12
        q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((n, 6)))
        d = Dataset(q * np.sqrt(n), np.zeros(n))
        np.testing.assert_allclose(conditional_cov(d, [0, 1, 2], [2, 4, 5]), np.eye(2), atol=1e-12)

    def test_superset_is_empty(self, rng):
        d = Dataset(rng.standard_normal((10, 5)), np.zeros(10))
        assert conditional_cov(d, [0, 1], [0, 1, 3]).shape == (0, 0)

    def test_corner_case_singular(self):
        d, _ = corner_case(0.5)
        assert np.linalg.eigvalsh(conditional_cov(d, [0, 1], [2, 3]))[0] <= 1e-10

    def test_forms_agree(self, rng):
        d = Dataset(rng.standard_normal((25, 7)), np.zeros(25))
        a = conditional_cov(d, [0, 1, 2], [1, 4, 6])
        b = conditional_cov_projection(d, [0, 1, 2], [1, 4, 6])
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_singular_block_raises(self, rng):
        x = rng.standard_normal((10, 3))
        x = np.column_stack([x, x[:, 1]])
        d = Dataset(x, np.zeros(10))
        with pytest.raises(SingularBlockError):
            conditional_cov(d, [0], [1, 3])
        assert conditional_cov_projection(d, [0], [1, 3]).shape == (1, 1)


class TestRestrictedEigs:
    def test_identity(self):
        n = 8
        q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((n, 5)))
        d = Dataset(q * np.sqrt(n), np.zeros(n))
        for k in (1, 3, 5):
            r = restricted_eigs(d, k, 1000)
            assert r.exact
            assert r.upper == pytest.approx(1) and r.lower == pytest.approx(1)

    def test_two_by_two(self):
        # rows chosen so that X^T X / n = [[1, .5], [.5, 1]]
        x = np.linalg.cholesky(np.array([[1.0, 0.5], [0.5, 1.0]])).T * np.sqrt(2)
        d = Dataset(x, np.zeros(2))
        r = restricted_eigs(d, 2, 10)
        assert (r.upper, r.lower) == (pytest.approx(1.5), pytest.approx(0.5))
        assert r.exact

    def test_enumeration_oracle(self, rng):
        d = Dataset(rng.standard_normal((30, 10)), np.zeros(30))
        sig = d.x.T @ d.x / d.n
        vals = [np.linalg.eigvalsh(sig[np.ix_(c, c)]) for c in itertools.combinations(range(10), 3)]
        r = restricted_eigs(d, 3, 120)
        assert r.exact and r.subsets_examined == 120
        assert r.upper == pytest.approx(max(v[-1] for v in vals), rel=1e-12)
        assert r.lower == pytest.approx(min(v[0] for v in vals), rel=1e-12)

    def test_sampled_flag(self, rng):
        d = Dataset(rng.standard_normal((30, 10)), np.zeros(30))
        full = restricted_eigs(d, 3, 120)
        est = restricted_eigs(d, 3, 50, rng=np.random.default_rng(1))
        assert not est.exact
        assert est.upper <= full.upper + 1e-12
        assert est.lower >= full.lower - 1e-12
