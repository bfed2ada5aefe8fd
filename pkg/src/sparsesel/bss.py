"""Exhaustive best subset selection with an explicit enumeration budget.

Subsets are scored in vectorized chunks from the Gram matrix of the
candidate columns. The scores only serve as a screen: every subset whose
screened RSS is close to the minimum is refitted through the QR path in
:mod:`sparsesel.linalg`, and the winner, its RSS and the tie count all come
from those refits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BudgetExceededError,
    Dataset,
    FitResult,
    InvalidArgumentError,
    SupportSet,
    as_support,
)
from .linalg import ols_fit, rss

DEFAULT_BUDGET = 2_000_000
TIE_RTOL = 1e-9
# screen slack; Gram-based scores lose roughly cond(X_S)^2 * eps of accuracy
SCREEN_RTOL = 1e-6


@dataclass(frozen=True)
class BssResult:
    best: FitResult
    tie_count: int
    subsets_examined: int
    ties: tuple[SupportSet, ...] = ()


def _screen_rss(gram, xty, yy, subsets):
    g = gram[subsets[:, :, None], subsets[:, None, :]]
    b = xty[subsets]
    try:
        sol = np.linalg.solve(g, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        sol = np.einsum("nij,nj->ni", np.linalg.pinv(g, rcond=1e-10, hermitian=True), b)
    return yy - np.einsum("ni,ni->n", b, sol)


def _search(data: Dataset, s_hat: int, candidate: SupportSet, budget: int, chunk: int) -> BssResult:
    m = len(candidate)
    if s_hat < 1 or s_hat > min(data.n, data.p) or s_hat > m:
        raise InvalidArgumentError(
            f"s_hat={s_hat} outside [1, min(n={data.n}, p={data.p}, |candidate|={m})]"
        )
    total = math.comb(m, s_hat)
    if total > budget:
        raise BudgetExceededError(total, budget)

    cand = np.asarray(candidate, dtype=np.intp)
    xc = data.x[:, cand]
    gram = xc.T @ xc
    xty = xc.T @ data.y
    yy = float(data.y @ data.y)
    scale = max(yy, np.finfo(float).tiny)

    scores = np.empty(total)
    combos = itertools.combinations(range(m), s_hat)
    pos = 0
    while pos < total:
        block = list(itertools.islice(combos, chunk))
        subs = np.array(block, dtype=np.intp).reshape(len(block), s_hat)
        scores[pos:pos + len(block)] = _screen_rss(gram, xty, yy, subs)
        pos += len(block)

    slack = SCREEN_RTOL * scale
    fits: dict = {}

    def refit(ranks):
        # combinations() is lexicographic, so rank r maps back by re-enumeration
        wanted = set(int(r) for r in ranks) - set(fits)
        if not wanted:
            return False
        for r, local in enumerate(itertools.combinations(range(m), s_hat)):
            if r in wanted:
                fits[r] = ols_fit(data, tuple(int(cand[j]) for j in local))
                wanted.discard(r)
                if not wanted:
                    break
        return True

    # an ill-conditioned subset can screen spuriously low; widen the window
    # around the exact minimum until no further subset qualifies
    refit(np.flatnonzero(scores <= scores.min() + slack))
    while refit(np.flatnonzero(scores <= min(f.rss for f in fits.values()) + slack)):
        pass
    fits = list(fits.values())
    best_rss = min(f.rss for f in fits)
    tied = sorted((f for f in fits if f.rss <= best_rss + TIE_RTOL * scale), key=lambda f: f.support)
    return BssResult(
        best=tied[0],
        tie_count=len(tied),
        subsets_examined=total,
        ties=tuple(f.support for f in tied),
    )


def best_subset(data: Dataset, s_hat: int, budget: int = DEFAULT_BUDGET, chunk: int = 50000) -> BssResult:
    """Minimize RSS over every support of size ``s_hat``.

    Ties within ``1e-9 * ||y||^2`` of the minimum are counted in
    ``tie_count`` and resolved in favour of the lexicographically smallest
    support.
    """
    return _search(data, int(s_hat), tuple(range(data.p)), budget, chunk)


def best_subset_on_support(
    data: Dataset, s_hat: int, candidate, budget: int = DEFAULT_BUDGET, chunk: int = 50000
) -> BssResult:
    """Best subset search restricted to subsets of ``candidate``."""
    candidate = as_support(candidate, data.p)
    return _search(data, int(s_hat), candidate, budget, chunk)


def near_best_margin(data: Dataset, s, s_truth, eta: float, tau: float) -> bool:
    """True iff ``R_S <= R_{S_truth} + n * eta * tau``."""
    return rss(data, s) <= rss(data, s_truth) + data.n * eta * tau
