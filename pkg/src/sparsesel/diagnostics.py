"""Recoverability diagnostics built on the Schur complement of missed true columns.

Every quantity minimizes or maximizes over a combinatorial family of
supports. Families are enumerated exhaustively when their size fits the
caller's budget; otherwise a Monte Carlo sample of the family is scored and
the report carries ``exact=False``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import (
    BudgetExceededError,
    Dataset,
    InvalidArgumentError,
    SingularBlockError,
    SupportSet,
    as_support,
)
from .linalg import conditional_cov, conditional_cov_projection, restricted_eigs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeparationReport:
    tau_star: float
    achieving_set: SupportSet
    exact: bool
    subsets_examined: int


@dataclass(frozen=True)
class EigenReport:
    value: float
    achieving_set: SupportSet
    exact: bool
    subsets_examined: int


@dataclass(frozen=True)
class KappaReport:
    kappa: float
    L: float
    alpha: float
    exact: bool


def schur(data: Dataset, s_true, s) -> np.ndarray:
    """Schur complement, falling back to the projection form on singular blocks."""
    try:
        return conditional_cov(data, s_true, s)
    except SingularBlockError:
        return conditional_cov_projection(data, s_true, s)


def _truth(beta_true, p: int) -> tuple[np.ndarray, SupportSet]:
    beta = np.asarray(beta_true, dtype=float).reshape(-1)
    if beta.shape[0] != p:
        raise InvalidArgumentError(f"beta_true has length {beta.shape[0]}, expected p={p}")
    support = tuple(int(j) for j in np.flatnonzero(beta))
    if not support:
        raise InvalidArgumentError("beta_true has empty support")
    return beta, support


def _family(p: int, size: int, budget: int, rng, allow_sampling: bool) -> tuple[Iterator, bool, int]:
    total = math.comb(p, size)
    if total <= budget:
        return itertools.combinations(range(p), size), True, total
    if not allow_sampling:
        raise BudgetExceededError(total, budget)
    rng = rng if rng is not None else np.random.default_rng(0)
    draws = (tuple(sorted(int(j) for j in rng.choice(p, size=size, replace=False))) for _ in range(budget))
    return draws, False, int(budget)


def separation_ratio(data: Dataset, beta: np.ndarray, s_true: SupportSet, s: SupportSet) -> float:
    """``b0^T D(S) b0 / |S minus S*|`` with ``b0`` the missed true coefficients."""
    true_set = set(s_true)
    s0 = [j for j in s_true if j not in set(s)]
    spurious = sum(1 for j in s if j not in true_set)
    d = schur(data, s_true, s)
    num = float(beta[s0] @ d @ beta[s0]) if s0 else 0.0
    if spurious == 0:
        return math.inf
    return num / spurious


def tau_star(
    data: Dataset,
    beta_true,
    s_hat: int,
    delta: float = 0.0,
    budget: int = 100_000,
    rng: Optional[np.random.Generator] = None,
    allow_sampling: bool = True,
) -> SeparationReport:
    """Minimum separation margin over size-``s_hat`` sets missing true columns.

    The family is every ``S`` with ``|S| = s_hat`` that does not contain the
    true support and misses at least ``delta * s`` true columns (inclusive).
    With ``s_hat = s`` and ``delta = 0`` this is every false set of size s.
    Sampled results are upper estimates of the true minimum.
    """
    beta, s_true = _truth(beta_true, data.p)
    s = len(s_true)
    if not 0.0 <= delta <= 1.0:
        raise InvalidArgumentError(f"delta={delta} outside [0, 1]")
    if s_hat < 1 or s_hat > data.p:
        raise InvalidArgumentError(f"s_hat={s_hat} outside [1, p={data.p}]")
    need = delta * s
    family, exact, count = _family(data.p, s_hat, budget, rng, allow_sampling)
    best, best_set = math.inf, ()
    for subset in family:
        missed = s - len(set(subset) & set(s_true))
        if missed == 0 or missed < need - 1e-12:
            continue
        val = separation_ratio(data, beta, s_true, subset)
        if val < best:
            best, best_set = val, subset
    return SeparationReport(tau_star=best, achieving_set=best_set, exact=exact, subsets_examined=count)


def lambda_m(
    data: Dataset,
    s_true,
    budget: int = 100_000,
    rng: Optional[np.random.Generator] = None,
    allow_sampling: bool = True,
) -> EigenReport:
    """Smallest eigenvalue of the Schur complement over false sets of size s."""
    s_true = as_support(s_true, data.p)
    if not s_true:
        raise InvalidArgumentError("true support is empty")
    family, exact, count = _family(data.p, len(s_true), budget, rng, allow_sampling)
    best, best_set = math.inf, ()
    for subset in family:
        if subset == s_true:
            continue
        val = float(np.linalg.eigvalsh(schur(data, s_true, subset))[0])
        if val < best:
            best, best_set = val, subset
    return EigenReport(value=best, achieving_set=best_set, exact=exact, subsets_examined=count)


def beta_min_threshold(
    lambda_m_value: float, n: int, p: int, sigma: float, xi: float = 2.0, eta: float = 0.5
) -> float:
    """Signal strength ``4 xi sigma / (1 - eta) * sqrt(log p / (n lambda_m))``.

    Stated up to the unspecified universal constant hidden in ``xi``.
    Returns ``inf`` when ``lambda_m_value <= 0``: no finite signal separates
    the true model from a perfectly mimicking false one.
    """
    if not 0 <= eta < 1:
        raise InvalidArgumentError(f"eta={eta} outside [0, 1)")
    if xi <= 0 or p < 3 or n < 1 or sigma < 0:
        raise InvalidArgumentError("need xi > 0, p >= 3, n >= 1, sigma >= 0")
    if not lambda_m_value > 0:
        log.warning("lambda_m=%g is not positive; beta-min threshold is infinite", lambda_m_value)
        return math.inf
    return 4.0 * xi * sigma / (1.0 - eta) * math.sqrt(math.log(p) / (n * lambda_m_value))


def tau_sup(data: Dataset, beta_true, j0: int, s_true=None) -> SeparationReport:
    """Largest margin over single swaps that drop ``j0`` for one spurious column.

    ``s_true`` defaults to the support of ``beta_true``; passing it explicitly
    lets a listed true column carry a zero coefficient, which gives 0.
    """
    beta = np.asarray(beta_true, dtype=float).reshape(-1)
    if beta.shape[0] != data.p:
        raise InvalidArgumentError(f"beta_true has length {beta.shape[0]}, expected p={data.p}")
    s_true = _truth(beta, data.p)[1] if s_true is None else as_support(s_true, data.p)
    if j0 not in s_true:
        raise InvalidArgumentError(f"j0={j0} is not in the true support {s_true}")
    rest = [j for j in s_true if j != j0]
    best, best_set = -math.inf, ()
    count = 0
    for k in range(data.p):
        if k in s_true:
            continue
        subset = as_support(rest + [k])
        d = schur(data, s_true, subset)
        val = float(d[0, 0]) * beta[j0] ** 2
        count += 1
        if val > best:
            best, best_set = val, subset
    return SeparationReport(tau_star=best, achieving_set=best_set, exact=True, subsets_examined=count)


def irrepresentable(data: Dataset, s_true, signs=None) -> float:
    """``|| Sig[S*^c, S*] Sig[S*, S*]^{-1} sign ||_inf``; below 1 means the condition holds."""
    s_true = as_support(s_true, data.p)
    if signs is None:
        signs = np.ones(len(s_true))
    signs = np.sign(np.asarray(signs, dtype=float))
    if signs.shape[0] != len(s_true):
        raise InvalidArgumentError("signs must align with the true support")
    rest = [j for j in range(data.p) if j not in set(s_true)]
    if not rest:
        return 0.0
    sigma = data.sample_cov()
    block = sigma[np.ix_(s_true, s_true)]
    if np.linalg.cond(block) > 1e12:
        raise SingularBlockError(f"sample covariance on the true support {s_true} is singular")
    cross = sigma[np.ix_(rest, s_true)]
    return float(np.max(np.abs(cross @ np.linalg.solve(block, signs))))


def kappa(
    data: Dataset, pi: int, l: int, s: int, budget: int = 100_000, rng=None
) -> KappaReport:
    """Restricted condition number ``L / alpha``.

    ``L`` is the largest eigenvalue over blocks of size ``2 pi + l`` and
    ``alpha`` the smallest over size ``2 pi + s``, both clamped to p. An
    ``alpha`` at numerical zero yields ``kappa = inf``.
    """
    k_upper = min(2 * pi + l, data.p)
    k_lower = min(2 * pi + s, data.p)
    up = restricted_eigs(data, k_upper, budget, rng=rng)
    lo = up if k_lower == k_upper else restricted_eigs(data, k_lower, budget, rng=rng)
    L, alpha = up.upper, lo.lower
    if alpha <= 1e-12 * L:
        log.warning("restricted minimum eigenvalue %g is degenerate", alpha)
        k = math.inf
    else:
        k = L / alpha
    return KappaReport(kappa=k, L=L, alpha=alpha, exact=up.exact and lo.exact)
