"""Iterative hard thresholding with OLS refits, and the IHT -> BSS two-stage estimator.

Each iteration recruits the ``l`` coordinates with the largest gradient
magnitude, refits OLS on the union with the current support, keeps the
``pi`` largest refitted coefficients and refits once more on those. The
loss is the unnormalized residual sum of squares, so its gradient is
``2 X^T (X beta - y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .bss import DEFAULT_BUDGET, BssResult, best_subset_on_support
from .core import (
    Dataset,
    InvalidArgumentError,
    OverParameterizedError,
    SupportSet,
    abs_order,
    as_support,
    topk_abs,
)
from .linalg import lstsq_qr


@dataclass(frozen=True)
class IhtConfig:
    """Projection size ``pi``, expansion size ``l`` and output sparsity ``s_hat``.

    ``tol`` bounds the Euclidean change between successive iterates; when
    left as None it resolves to ``1e-8 * ||y|| / sqrt(n)``.
    """

    pi: int
    l: int
    s_hat: int
    tol: Optional[float] = None
    max_iter: int = 500

    def __post_init__(self):
        for name in ("pi", "l", "s_hat", "max_iter"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgumentError(f"{name} must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise InvalidArgumentError("tol must be positive")

    def validate(self, data: Dataset) -> None:
        if self.pi + self.l > data.n:
            raise OverParameterizedError(
                f"pi + l = {self.pi + self.l} exceeds n={data.n}; refits would be singular"
            )
        if self.s_hat > data.p:
            raise InvalidArgumentError(f"s_hat={self.s_hat} exceeds p={data.p}")

    def resolved_tol(self, data: Dataset) -> float:
        if self.tol is not None:
            return float(self.tol)
        return 1e-8 * float(np.linalg.norm(data.y)) / math.sqrt(data.n)


@dataclass(frozen=True)
class IhtRecord:
    expanded: SupportSet
    projected: SupportSet
    loss: float
    change: float


@dataclass
class IhtTrace:
    records: List[IhtRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def n_iter(self) -> int:
        return len(self.records)


@dataclass
class IhtResult:
    beta: np.ndarray
    support: SupportSet
    trace: IhtTrace

    @property
    def converged(self) -> bool:
        return self.trace.converged

    def __iter__(self):
        return iter((self.beta, self.support, self.trace))


def loss(data: Dataset, beta) -> float:
    r = data.x @ np.asarray(beta, dtype=float) - data.y
    return float(r @ r)


def gradient(data: Dataset, beta) -> np.ndarray:
    return 2.0 * data.x.T @ (data.x @ np.asarray(beta, dtype=float) - data.y)


def _refit(data: Dataset, support: SupportSet) -> np.ndarray:
    beta = np.zeros(data.p)
    if support:
        cols = list(support)
        beta[cols] = lstsq_qr(data.x[:, cols], data.y)
    return beta


def support_of(beta) -> SupportSet:
    return tuple(int(j) for j in np.flatnonzero(np.asarray(beta)))


def iht_step(data: Dataset, beta_t, config: IhtConfig):
    """One IHT iteration. Returns ``(beta_next, record)``."""
    beta_t = np.asarray(beta_t, dtype=float)
    current = support_of(beta_t)
    if len(current) > config.pi:
        raise InvalidArgumentError(f"|supp(beta_t)|={len(current)} exceeds pi={config.pi}")
    grad = gradient(data, beta_t)
    recruited = topk_abs(grad, min(config.l, data.p))
    expanded = as_support(set(current) | set(recruited))
    if len(expanded) > data.n:
        raise OverParameterizedError(f"expanded support of size {len(expanded)} exceeds n={data.n}")
    beta_dag = _refit(data, expanded)
    projected = topk_abs(beta_dag[list(expanded)], min(config.pi, len(expanded)))
    projected = tuple(expanded[i] for i in projected)
    beta_next = _refit(data, projected)
    record = IhtRecord(
        expanded=expanded,
        projected=projected,
        loss=loss(data, beta_next),
        change=float(np.linalg.norm(beta_next - beta_t)),
    )
    return beta_next, record


def final_support(beta, grad, s_hat: int, pi: int) -> SupportSet:
    """Size adjustment after the loop.

    Keeps the ``min(s_hat, pi)`` largest coefficients and fills the rest
    with the largest-gradient coordinates not already chosen, so the result
    always has exactly ``min(s_hat, p)`` elements.
    """
    p = len(beta)
    s_hat = min(int(s_hat), p)
    chosen = list(abs_order(beta)[: min(s_hat, pi)])
    if s_hat > len(chosen):
        taken = set(int(j) for j in chosen)
        extra = [int(j) for j in abs_order(grad) if int(j) not in taken]
        chosen.extend(extra[: s_hat - len(chosen)])
    return tuple(sorted(int(j) for j in chosen))


def support_path(beta, grad, pi: int, s_hats) -> dict:
    """``final_support`` for many sparsity levels from one converged iterate."""
    beta_order = [int(j) for j in abs_order(beta)]
    grad_order = [int(j) for j in abs_order(grad)]
    out = {}
    for s_hat in s_hats:
        s_hat = min(int(s_hat), len(beta))
        head = beta_order[: min(s_hat, pi)]
        if s_hat > len(head):
            taken = set(head)
            fill = [j for j in grad_order if j not in taken][: s_hat - len(head)]
            head = head + fill
        out[s_hat] = tuple(sorted(head))
    return out


def iht_iterate(data: Dataset, config: IhtConfig):
    """Run the IHT loop from zero. Returns ``(beta, trace)``."""
    config.validate(data)
    tol = config.resolved_tol(data)
    beta = np.zeros(data.p)
    trace = IhtTrace()
    for _ in range(config.max_iter):
        beta, record = iht_step(data, beta, config)
        trace.records.append(record)
        if record.change <= tol:
            trace.converged = True
            break
    return beta, trace


def iht_run(data: Dataset, config: IhtConfig) -> IhtResult:
    """IHT from ``beta_0 = 0`` until the iterate change drops to ``tol``.

    Non-convergence within ``max_iter`` is reported through
    ``trace.converged`` rather than raised.
    """
    beta, trace = iht_iterate(data, config)
    sel = final_support(beta, gradient(data, beta), config.s_hat, config.pi)
    return IhtResult(beta=beta, support=sel, trace=trace)


def two_stage(data: Dataset, config: IhtConfig, s: int, budget: int = DEFAULT_BUDGET) -> BssResult:
    """Best ``s``-subset search restricted to the support of the IHT iterate."""
    beta, _ = iht_iterate(data, config)
    candidate = support_of(beta)
    if s > len(candidate):
        raise InvalidArgumentError(f"s={s} exceeds the IHT support size {len(candidate)}")
    return best_subset_on_support(data, s, candidate, budget=budget)


def parameter_advice(kappa: float, s: int, l: int, pi: int) -> dict:
    """Compare (pi, l) against the sufficient rule ``l >= s`` and ``pi >= 4 kappa^2 l``.

    Advisory only; kappa is usually an estimate.
    """
    required_pi = 4.0 * kappa**2 * l
    return {
        "l_ok": l >= s,
        "pi_ok": pi >= required_pi,
        "required_pi": required_pi,
        "kappa": kappa,
    }
