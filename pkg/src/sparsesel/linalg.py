"""Least-squares kernels and sample-covariance geometry.

All least-squares solves go through a column-pivoted QR factorization. When
the selected columns are rank deficient the minimum-norm solution is
returned, with numerical rank decided by ``RANK_RTOL`` times the largest
diagonal entry of R.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import (
    Dataset,
    FitResult,
    InvalidArgumentError,
    OverParameterizedError,
    SingularBlockError,
    SupportSet,
    as_support,
)

RANK_RTOL = 1e-10
SCHUR_MAX_COND = 1e12


def lstsq_qr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a @ x ~= b`` via pivoted QR.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, k = a.shape
    if k == 0:
        return np.zeros((0,) + b.shape[1:])
    q, r, perm = sla.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_RTOL * diag[0])) if diag[0] > 0 else 0
    qtb = q[:, :rank].T @ b
    z = np.zeros((k,) + b.shape[1:])
    if rank == k:
        z = sla.solve_triangular(r, qtb)
    elif rank > 0:
        # complete orthogonal decomposition: R1 = T^T Z^T with R1^T = Z T
        r1 = r[:rank, :]
        zq, t = sla.qr(r1.T, mode="economic")
        w = sla.solve_triangular(t, qtb, trans="T")
        z = zq @ w
    x = np.empty_like(z)
    x[perm] = z
    return x


def _check_size(data: Dataset, s: SupportSet) -> None:
    if len(s) > data.n:
        raise OverParameterizedError(
            f"support of size {len(s)} exceeds the sample size n={data.n}"
        )


def ols_fit(data: Dataset, s) -> FitResult:
    """Ordinary least squares of ``y`` on the columns in ``s``."""
    s = as_support(s, data.p)
    _check_size(data, s)
    if not s:
        return FitResult(support=s, coefficients=np.zeros(0), rss=float(data.y @ data.y))
    xs = data.x[:, list(s)]
    coef = lstsq_qr(xs, data.y)
    resid = data.y - xs @ coef
    return FitResult(support=s, coefficients=coef, rss=float(resid @ resid))


def rss(data: Dataset, s) -> float:
    """Residual sum of squares ``y^T (I - P_S) y``."""
    return ols_fit(data, s).rss


def projection_residual(data: Dataset, s, v) -> np.ndarray:
    """``(I - P_S) v``: the part of ``v`` orthogonal to the columns in ``s``."""
    s = as_support(s, data.p)
    _check_size(data, s)
    v = np.asarray(v, dtype=float)
    if v.shape[0] != data.n:
        raise InvalidArgumentError(f"vector length {v.shape[0]} != n={data.n}")
    if not s:
        return v.copy()
    xs = data.x[:, list(s)]
    return v - xs @ lstsq_qr(xs, v)


def conditional_cov(data: Dataset, s_true, s) -> np.ndarray:
    """Schur complement of the missed true columns given the selected set.

    With ``S0 = s_true minus s`` this is
    ``Sig[S0,S0] - Sig[S0,S] Sig[S,S]^{-1} Sig[S,S0]`` for the sample
    covariance ``Sig = X^T X / n``.
    """
    s_true = as_support(s_true, data.p)
    s = as_support(s, data.p)
    s0 = [j for j in s_true if j not in set(s)]
    if not s0:
        return np.zeros((0, 0))
    x0 = data.x[:, s0]
    a = x0.T @ x0 / data.n
    if not s:
        return (a + a.T) / 2
    xs = data.x[:, list(s)]
    b = xs.T @ xs / data.n
    c = xs.T @ x0 / data.n
    if np.linalg.cond(b) > SCHUR_MAX_COND:
        raise SingularBlockError(f"sample covariance block on {s} is singular")
    d = a - c.T @ np.linalg.solve(b, c)
    return (d + d.T) / 2


def conditional_cov_projection(data: Dataset, s_true, s) -> np.ndarray:
    """Same quantity as :func:`conditional_cov` via ``X0^T (I - P_S) X0 / n``.

    Stays well defined when the block on ``s`` is singular.
    """
    s_true = as_support(s_true, data.p)
    s = as_support(s, data.p)
    s0 = [j for j in s_true if j not in set(s)]
    if not s0:
        return np.zeros((0, 0))
    x0 = data.x[:, s0]
    r = projection_residual(data, s, x0) if s else x0
    d = x0.T @ r / data.n
    return (d + d.T) / 2


@dataclass(frozen=True)
class RestrictedEigs:
    upper: float
    lower: float
    exact: bool
    upper_set: SupportSet
    lower_set: SupportSet
    subsets_examined: int


def _block_eigs(sigma: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    blocks = sigma[subsets[:, :, None], subsets[:, None, :]]
    return np.linalg.eigvalsh(blocks)


def restricted_eigs(
    data: Dataset,
    k: int,
    budget: int,
    rng: np.random.Generator | None = None,
    chunk: int = 20000,
) -> RestrictedEigs:
    """Extreme eigenvalues of principal ``k x k`` blocks of ``X^T X / n``.

    Eigenvalue interlacing makes size exactly ``k`` sufficient for the
    max/min over ``|S| <= k``. Exhaustive when ``C(p, k) <= budget``;
    otherwise ``budget`` random subsets are drawn and the result is an
    estimate (upper is then a lower bound on the truth, lower an upper bound).
    """
    p = data.p
    k = int(k)
    if k < 1 or k > p:
        raise InvalidArgumentError(f"block size k={k} must lie in [1, {p}]")
    sigma = data.sample_cov()
    total = math.comb(p, k)
    exact = total <= budget
    if exact:
        source = itertools.combinations(range(p), k)
        count = total
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        source = (tuple(sorted(rng.choice(p, size=k, replace=False))) for _ in range(budget))
        count = int(budget)

    best_hi, best_lo = -np.inf, np.inf
    set_hi: SupportSet = ()
    set_lo: SupportSet = ()
    done = 0
    while done < count:
        block = list(itertools.islice(source, chunk))
        if not block:
            break
        subs = np.array(block, dtype=np.intp).reshape(len(block), k)
        ev = _block_eigs(sigma, subs)
        hi = ev[:, -1]
        lo = ev[:, 0]
        i_hi = int(np.argmax(hi))
        i_lo = int(np.argmin(lo))
        if hi[i_hi] > best_hi:
            best_hi, set_hi = float(hi[i_hi]), tuple(int(j) for j in subs[i_hi])
        if lo[i_lo] < best_lo:
            best_lo, set_lo = float(lo[i_lo]), tuple(int(j) for j in subs[i_lo])
        done += len(block)
    return RestrictedEigs(best_hi, best_lo, exact, set_hi, set_lo, done)
