import itertools
import math

import numpy as np
import pytest

from conftest import orthonormal_design, random_data
from sparsesel.bss import best_subset, best_subset_on_support, near_best_margin
from sparsesel.core import BudgetExceededError, Dataset, InvalidArgumentError
from sparsesel.diagnostics import tau_star
from sparsesel.linalg import rss
from sparsesel.simgen import corner_case


def normal_equations_rss(x, y, cols):
    xs = x[:, list(cols)]
    coef = np.linalg.solve(xs.T @ xs, xs.T @ y)
    r = y - xs @ coef
    return float(r @ r)


def test_noiseless_single():
    x = orthonormal_design(10, 5)
    res = best_subset(Dataset(x, 2 * x[:, 0]), 1)
    assert res.best.support == (0,)
    assert res.best.rss == pytest.approx(0, abs=1e-20)
    assert res.tie_count == 1


def test_corner_case_tie():
    d, _ = corner_case(0.5)
    res = best_subset(d, 2)
    assert res.tie_count == 2
    assert set(res.ties) == {(0, 1), (2, 3)}
    assert res.best.support == (0, 1)


def test_normal_equations_oracle(rng):
    d = random_data(rng, 20, 8)
    res = best_subset(d, 3)
    scores = {c: normal_equations_rss(d.x, d.y, c) for c in itertools.combinations(range(8), 3)}
    best = min(scores, key=scores.get)
    assert res.best.support == best
    assert res.best.rss == pytest.approx(scores[best], rel=1e-9)
    assert res.subsets_examined == 56


def test_nonincreasing_in_size(rng):
    d = random_data(rng, 25, 7)
    values = [best_subset(d, k).best.rss for k in range(1, 8)]
    assert all(b <= a + 1e-9 * float(d.y @ d.y) for a, b in zip(values, values[1:]))


def test_beats_random_subsets(rng):
    d = random_data(rng, 30, 10)
    res = best_subset(d, 4)
    for _ in range(100):
        s = rng.choice(10, 4, replace=False)
        assert res.best.rss <= rss(d, s) + 1e-9 * float(d.y @ d.y)


def test_noiseless_recovery(rng):
    x = rng.standard_normal((20, 9))
    d = Dataset(x, x[:, [1, 4, 7]] @ [1.0, -2.0, 0.5])
    res = best_subset(d, 3)
    assert res.best.support == (1, 4, 7)
    assert res.best.rss <= 1e-10 * float(d.y @ d.y)


def test_budget_guard(rng):
    d = random_data(rng, 20, 12)
    with pytest.raises(BudgetExceededError):
        best_subset(d, 4, budget=math.comb(12, 4) - 1)


def test_invalid_size(rng):
    d = random_data(rng, 5, 8)
    with pytest.raises(InvalidArgumentError):
        best_subset(d, 6)


def test_small_chunks_agree(rng):
    d = random_data(rng, 30, 9)
    assert best_subset(d, 3, chunk=7).best.support == best_subset(d, 3).best.support


class TestOnSupport:
    def test_full_candidate(self, rng):
        d = random_data(rng, 25, 8)
        a = best_subset(d, 3)
        b = best_subset_on_support(d, 3, range(8))
        assert a.best.support == b.best.support
        assert a.best.rss == b.best.rss

    def test_single_subset(self, rng):
        d = random_data(rng, 25, 8)
        res = best_subset_on_support(d, 3, [1, 5, 6])
        assert res.best.support == (1, 5, 6)
        assert res.subsets_examined == 1

    def test_restricted_strong_signal(self, rng):
        x = rng.standard_normal((60, 15))
        truth = (2, 5, 11)
        d = Dataset(x, x[:, list(truth)] @ [3.0, -3.0, 3.0] + 0.1 * rng.standard_normal(60))
        cand = (0, 2, 3, 5, 8, 9, 11, 14)
        res = best_subset_on_support(d, 3, cand)
        sub = Dataset(x[:, list(cand)], d.y)
        oracle = best_subset(sub, 3).best.support
        assert res.best.support == truth == tuple(cand[j] for j in oracle)


class TestNearBest:
    def test_truth_always(self, rng):
        d = random_data(rng, 20, 6)
        assert near_best_margin(d, (0, 1), (0, 1), 0.3, 0.0)

    def test_strictly_worse(self, rng):
        d = random_data(rng, 20, 6)
        worse = (3, 4) if rss(d, (3, 4)) > rss(d, (0, 1)) else (0, 1)
        truth = (0, 1) if worse == (3, 4) else (3, 4)
        assert not near_best_margin(d, worse, truth, 0.0, 123.0)

    def test_matches_arithmetic(self, rng):
        x = rng.standard_normal((30, 8))
        beta = np.zeros(8)
        beta[:2] = 1.0
        d = Dataset(x, x @ beta + 0.5 * rng.standard_normal(30))
        tau = tau_star(d, beta, 2).tau_star
        for s in itertools.combinations(range(8), 2):
            for eta in (0.0, 0.25, 0.9):
                expected = rss(d, s) <= rss(d, (0, 1)) + d.n * eta * tau
                assert near_best_margin(d, s, (0, 1), eta, tau) == expected
