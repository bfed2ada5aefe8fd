import numpy as np
import pytest

from sparsesel.core import Dataset


def random_data(rng, n, p, noise=1.0):
    x = rng.standard_normal((n, p))
    y = x[:, : min(3, p)].sum(axis=1) + noise * rng.standard_normal(n)
    return Dataset(x, y)


def orthonormal_design(n, p, seed=0):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, p)))
    return q


def dense_projection(a):
    """Explicit ``A (A^T A)^{-1} A^T`` via normal equations."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], a.shape[0]))
    return a @ np.linalg.inv(a.T @ a) @ a.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES.append((number, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
