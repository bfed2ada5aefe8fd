"""Baseline selectors: marginal screening (SIS), LASSO and SCAD.

The penalized fits minimize ``(2n)^{-1} ||y - X b||^2 + sum_j pen(|b_j|)``
by cyclic coordinate descent on the Gram matrix, warm-started along a
decreasing lambda grid. Each coordinate update is the exact minimizer of
the one-dimensional problem, including the nonconvex middle piece of SCAD.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numba
import numpy as np

from .core import Dataset, InvalidArgumentError, SupportSet, abs_order, fdr, topk_abs, tpr

LASSO = 0
SCAD = 1
CD_TOL = 1e-7
CD_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class PenaltySpec:
    kind: str = "lasso"
    a: float = 3.7

    def __post_init__(self):
        if self.kind not in ("lasso", "scad"):
            raise InvalidArgumentError(f"unknown penalty {self.kind!r}")
        if self.kind == "scad" and not self.a > 2:
            raise InvalidArgumentError(f"SCAD shape a must exceed 2, got {self.a}")

    @property
    def code(self) -> int:
        return LASSO if self.kind == "lasso" else SCAD


@dataclass
class SelectionPath:
    lambdas: np.ndarray
    coefs: np.ndarray
    converged: np.ndarray

    def __len__(self):
        return len(self.lambdas)

    def support(self, i: int) -> SupportSet:
        return tuple(int(j) for j in np.flatnonzero(self.coefs[i]))

    @property
    def entries(self) -> List[Tuple[float, SupportSet, np.ndarray]]:
        return [(float(lam), self.support(i), self.coefs[i]) for i, lam in enumerate(self.lambdas)]


@numba.njit(cache=True)
def scad_penalty(u, lam, a):
    if u <= lam:
        return lam * u
    if u <= a * lam:
        return (2.0 * a * lam * u - u * u - lam * lam) / (2.0 * (a - 1.0))
    return lam * lam * (a + 1.0) / 2.0


@numba.njit(cache=True)
def _scad_h(u, t, v, lam, a):
    return 0.5 * v * u * u - t * u + scad_penalty(u, lam, a)


@numba.njit(cache=True)
def univariate_min(z, v, lam, kind, a):
    """Exact minimizer of ``v/2 b^2 - z b + pen(|b|)`` for ``v > 0``."""
    t = abs(z)
    sgn = 1.0 if z >= 0 else -1.0
    if kind == LASSO:
        u = t - lam
        return sgn * u / v if u > 0 else 0.0
    best_u = 0.0
    best_h = 0.0
    # piece 1: [0, lam]
    u1 = min(max((t - lam) / v, 0.0), lam)
    h = _scad_h(u1, t, v, lam, a)
    if h < best_h:
        best_u, best_h = u1, h
    # piece 2: [lam, a lam]
    curv = v - 1.0 / (a - 1.0)
    if curv > 0:
        u2 = min(max((t - a * lam / (a - 1.0)) / curv, lam), a * lam)
        h = _scad_h(u2, t, v, lam, a)
        if h < best_h:
            best_u, best_h = u2, h
    else:
        for u2 in (lam, a * lam):
            h = _scad_h(u2, t, v, lam, a)
            if h < best_h:
                best_u, best_h = u2, h
    # piece 3: [a lam, inf)
    u3 = max(t / v, a * lam)
    h = _scad_h(u3, t, v, lam, a)
    if h < best_h:
        best_u, best_h = u3, h
    return sgn * best_u


@numba.njit(cache=True)
def _objective(gram, c, yy_n, beta, lam, kind, a):
    quad = 0.0
    lin = 0.0
    pen = 0.0
    p = beta.shape[0]
    for j in range(p):
        bj = beta[j]
        if bj == 0.0:
            continue
        lin += c[j] * bj
        for k in range(p):
            quad += bj * gram[j, k] * beta[k]
        if kind == LASSO:
            pen += lam * abs(bj)
        else:
            pen += scad_penalty(abs(bj), lam, a)
    return 0.5 * yy_n - lin + 0.5 * quad + pen


@numba.njit(cache=True)
def _sweep(gram, grad, beta, lam, kind, a, coords):
    max_delta = 0.0
    for j in coords:
        v = gram[j, j]
        if v <= 0.0:
            continue
        z = grad[j] + v * beta[j]
        b = univariate_min(z, v, lam, kind, a)
        d = b - beta[j]
        if d != 0.0:
            beta[j] = b
            for k in range(beta.shape[0]):
                grad[k] -= gram[k, j] * d
            if abs(d) > max_delta:
                max_delta = abs(d)
    return max_delta


@numba.njit(cache=True)
def cd_solve(gram, c, yy_n, beta, lam, kind, a, tol, max_sweeps, history):
    """Coordinate descent in place on ``beta``.

    Full sweeps alternate with sweeps restricted to the current nonzero
    coordinates; convergence is only declared after a full sweep.
    Returns ``(sweeps, converged)``. When ``history`` has length >= max_sweeps
    the objective after each sweep is written into it.
    """
    p = beta.shape[0]
    grad = c - gram @ beta
    record = history.shape[0] >= max_sweeps
    everything = np.arange(p)
    sweep = 0
    while sweep < max_sweeps:
        max_delta = _sweep(gram, grad, beta, lam, kind, a, everything)
        if record:
            history[sweep] = _objective(gram, c, yy_n, beta, lam, kind, a)
        sweep += 1
        if max_delta <= tol:
            return sweep, True
        active = np.flatnonzero(beta)
        while sweep < max_sweeps:
            inner = _sweep(gram, grad, beta, lam, kind, a, active)
            if record:
                history[sweep] = _objective(gram, c, yy_n, beta, lam, kind, a)
            sweep += 1
            if inner <= tol:
                break
    return max_sweeps, False


@numba.njit(cache=True)
def _cd_path(gram, c, yy_n, lambdas, kind, a, tol, max_sweeps):
    p = gram.shape[0]
    nl = lambdas.shape[0]
    coefs = np.zeros((nl, p))
    converged = np.zeros(nl, dtype=np.bool_)
    beta = np.zeros(p)
    empty = np.zeros(0)
    for i in range(nl):
        _, ok = cd_solve(gram, c, yy_n, beta, lambdas[i], kind, a, tol, max_sweeps, empty)
        coefs[i] = beta
        converged[i] = ok
    return coefs, converged


def _moments(data: Dataset):
    x = np.ascontiguousarray(data.x)
    n = data.n
    return x.T @ x / n, x.T @ data.y / n, float(data.y @ data.y) / n


def penalized_objective(data: Dataset, beta, lam: float, spec: PenaltySpec) -> float:
    r = data.y - data.x @ np.asarray(beta, dtype=float)
    b = np.abs(np.asarray(beta, dtype=float))
    if spec.kind == "lasso":
        pen = lam * b.sum()
    else:
        pen = sum(scad_penalty(u, lam, spec.a) for u in b)
    return float(r @ r) / (2 * data.n) + pen


def lambda_max(data: Dataset) -> float:
    """Smallest lambda at which the all-zero fit is a coordinatewise minimum."""
    return float(np.max(np.abs(data.x.T @ data.y)) / data.n)


def lambda_grid(data: Dataset, n_lambda: int = 100, ratio: float = 1e-3) -> np.ndarray:
    lmax = lambda_max(data)
    if lmax <= 0:
        raise InvalidArgumentError("response is orthogonal to every column; lambda grid is empty")
    return np.geomspace(lmax, ratio * lmax, n_lambda)


def _check_grid(lambdas) -> np.ndarray:
    lambdas = np.asarray(lambdas, dtype=float).reshape(-1)
    if lambdas.size == 0 or np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
        raise InvalidArgumentError("lambda grid must be positive and strictly decreasing")
    return lambdas


def penalized_path(
    data: Dataset,
    spec: PenaltySpec,
    lambdas=None,
    tol: float = CD_TOL,
    max_sweeps: int = CD_MAX_SWEEPS,
) -> SelectionPath:
    """Warm-started coordinate-descent path over a decreasing lambda grid.

    Entries that hit ``max_sweeps`` are kept and flagged in ``converged``.
    """
    lambdas = lambda_grid(data) if lambdas is None else _check_grid(lambdas)
    gram, c, yy_n = _moments(data)
    coefs, converged = _cd_path(gram, c, yy_n, lambdas, spec.code, float(spec.a), tol, max_sweeps)
    return SelectionPath(lambdas=lambdas, coefs=coefs, converged=converged)


def fold_ids(n: int, folds: int, rng: np.random.Generator) -> np.ndarray:
    if folds < 2 or folds > n:
        raise InvalidArgumentError(f"need 2 <= folds <= n, got folds={folds}, n={n}")
    ids = np.empty(n, dtype=np.intp)
    ids[rng.permutation(n)] = np.arange(n) % folds
    return ids


def cross_validate(
    data: Dataset,
    spec: PenaltySpec,
    lambdas=None,
    folds: int = 10,
    rng: np.random.Generator | int | None = 0,
):
    """K-fold CV over the lambda grid.

    Returns ``(lambda_star, cv_curve)`` where ``cv_curve`` lists the mean
    held-out squared error per lambda. Ties go to the larger lambda.
    """
    lambdas = lambda_grid(data) if lambdas is None else _check_grid(lambdas)
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    ids = fold_ids(data.n, folds, rng)
    sse = np.zeros(len(lambdas))
    for f in range(folds):
        test = ids == f
        train = data.subset_rows(np.flatnonzero(~test))
        path = penalized_path(train, spec, lambdas)
        pred = data.x[test] @ path.coefs.T
        sse += np.sum((data.y[test][:, None] - pred) ** 2, axis=0)
    curve = sse / data.n
    # lambdas decrease, so argmin's first hit is the largest minimizing lambda
    best = int(np.argmin(curve))
    return float(lambdas[best]), [float(v) for v in curve]


def sis(data: Dataset, k: int) -> SupportSet:
    """Top-``k`` columns by absolute marginal correlation with ``y``."""
    if k < 1 or k > data.p:
        raise InvalidArgumentError(f"k={k} outside [1, p={data.p}]")
    return topk_abs(data.x.T @ data.y, k)


def sis_order(data: Dataset) -> np.ndarray:
    """Full marginal-correlation ranking; its prefixes are the SIS path."""
    return abs_order(data.x.T @ data.y)


def tpr_fdr_curve(path, truth: Sequence[int]) -> List[Tuple[float, float]]:
    """``(fdr, tpr)`` per path entry, in path order.

    Accepts a :class:`SelectionPath` or any iterable of supports.
    """
    supports = [path.support(i) for i in range(len(path))] if isinstance(path, SelectionPath) else list(path)
    return [(fdr(s, truth), tpr(s, truth)) for s in supports]
