"""Shared data model, selection metrics and top-k machinery.

Column indices are 0-based throughout the package. A support set is a
sorted tuple of distinct ints; tuples compare lexicographically, which the
subset-search code relies on for tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

SupportSet = Tuple[int, ...]


class SelectionError(ValueError):
    """Base class for argument and data errors raised by this package."""


class InvalidArgumentError(SelectionError):
    pass


class DegenerateColumnError(SelectionError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"column {index} is degenerate (zero spread)")


class OverParameterizedError(SelectionError):
    pass


class SingularBlockError(SelectionError):
    pass


class BudgetExceededError(SelectionError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"enumeration needs {count} subsets, budget is {budget}")


class InvalidCovarianceError(SelectionError):
    pass


class IngestionError(SelectionError):
    pass


def as_support(indices: Iterable[int], p: int | None = None) -> SupportSet:
    """Normalize an iterable of column indices into a SupportSet.

    Duplicates are rejected rather than silently merged.
    """
    idx = [int(i) for i in indices]
    out = tuple(sorted(idx))
    if len(set(out)) != len(out):
        raise InvalidArgumentError(f"duplicate indices in support: {idx}")
    if out and out[0] < 0:
        raise InvalidArgumentError(f"negative index in support: {out[0]}")
    if p is not None and out and out[-1] >= p:
        raise InvalidArgumentError(f"index {out[-1]} out of range for p={p}")
    return out


@dataclass(frozen=True)
class Dataset:
    """Design matrix ``x`` (n x p) and response ``y`` (length n)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.ndim != 2:
            raise InvalidArgumentError(f"x must be 2-d, got shape {x.shape}")
        n, p = x.shape
        if n < 1 or p < 1:
            raise InvalidArgumentError(f"empty design of shape {x.shape}")
        if y.shape[0] != n:
            raise InvalidArgumentError(f"x has {n} rows but y has length {y.shape[0]}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidArgumentError("dataset contains non-finite entries")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def sample_cov(self) -> np.ndarray:
        """Uncentered sample covariance ``X^T X / n``."""
        return self.x.T @ self.x / self.n

    def subset_rows(self, rows: Sequence[int] | np.ndarray) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.x[rows], self.y[rows])


@dataclass(frozen=True)
class FitResult:
    support: SupportSet
    coefficients: np.ndarray
    rss: float

    def dense(self, p: int) -> np.ndarray:
        """Coefficients scattered into a length-p vector."""
        beta = np.zeros(p)
        if self.support:
            beta[list(self.support)] = self.coefficients
        return beta


@dataclass(frozen=True)
class SelectionMetrics:
    tpr: float
    fdr: float


def tpr(selected: Iterable[int], truth: Iterable[int]) -> float:
    """Fraction of the true support that was selected."""
    truth = set(truth)
    if not truth:
        raise InvalidArgumentError("true support is empty; TPR is undefined")
    return len(set(selected) & truth) / len(truth)


def fdr(selected: Iterable[int], truth: Iterable[int]) -> float:
    """Fraction of the selected set that is spurious (0 for an empty selection)."""
    selected = set(selected)
    return len(selected - set(truth)) / max(len(selected), 1)


def selection_metrics(selected: Iterable[int], truth: Iterable[int]) -> SelectionMetrics:
    selected = list(selected)
    truth = list(truth)
    return SelectionMetrics(tpr=tpr(selected, truth), fdr=fdr(selected, truth))


def abs_order(v: np.ndarray) -> np.ndarray:
    """Indices sorted by decreasing ``|v|``; ties go to the smaller index."""
    v = np.asarray(v, dtype=float)
    return np.argsort(-np.abs(v), kind="stable")


def topk_abs(v, r: int) -> SupportSet:
    """Indices of the ``r`` largest entries of ``v`` in absolute value."""
    v = np.asarray(v, dtype=float).reshape(-1)
    r = int(r)
    if r < 0 or r > v.shape[0]:
        raise InvalidArgumentError(f"cannot take top {r} of a length-{v.shape[0]} vector")
    return tuple(sorted(int(i) for i in abs_order(v)[:r]))


STANDARDIZE_MODES = ("zscore", "unitnorm")


def column_scaling(x: np.ndarray, mode: str = "zscore") -> tuple[np.ndarray, np.ndarray]:
    """Return the (center, scale) pair that ``standardize_columns`` applies."""
    x = np.asarray(x, dtype=float)
    if mode not in STANDARDIZE_MODES:
        raise InvalidArgumentError(f"unknown standardization mode {mode!r}")
    center = x.mean(axis=0)
    xc = x - center
    if mode == "zscore":
        if x.shape[0] < 2:
            raise InvalidArgumentError("z-scoring needs at least two rows")
        scale = xc.std(axis=0, ddof=1)
    else:
        scale = np.sqrt(np.sum(xc**2, axis=0))
    # relative threshold: a column of identical floats can leave rounding dust
    ref = np.maximum(np.abs(center), 1.0)
    bad = np.flatnonzero(~(scale > 1e-12 * ref * np.sqrt(x.shape[0])))
    if bad.size:
        raise DegenerateColumnError(int(bad[0]))
    return center, scale


def standardize_columns(x, mode: str = "zscore") -> np.ndarray:
    """Center every column and scale it.

    ``zscore`` divides by the sample standard deviation (ddof=1); ``unitnorm``
    divides the centered column by its Euclidean norm.
    """
    center, scale = column_scaling(x, mode)
    return (np.asarray(x, dtype=float) - center) / scale
