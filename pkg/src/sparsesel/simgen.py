"""Synthetic regression data and correlated noise-feature augmentation.

Randomness flows through ``numpy.random.SeedSequence`` children so that
every replicate and every purpose (coefficients, design, noise features,
CV folds) draws from its own PCG64 stream. Changing one purpose's draw
count never shifts another's.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import Dataset, InvalidArgumentError, InvalidCovarianceError

# purpose tags for stream splitting
STREAM_BETA = 0
STREAM_DESIGN = 1
STREAM_NOISE_FEATURES = 2
STREAM_FOLDS = 3
STREAM_SPLIT = 4
STREAM_FACTOR = 5
STREAM_MISC = 6

SPIKE_PRESETS = {
    "spiky-strong": lambda p: (2.0 * p, float(p)),
    "spiky-weak": lambda p: (2.0 * math.sqrt(p), math.sqrt(p)),
}


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key...)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


@dataclass(frozen=True)
class CovarianceSpec:
    """Population covariance family.

    ``variant`` is one of ``identity``, ``exp_decay`` (``q^|i-j|``),
    ``constant`` (unit diagonal, ``q`` off it) or ``factor``
    (``V diag(spikes) V^T + I`` with ``V`` column-orthonormal).
    """

    variant: str
    p: int
    q: float = 0.0
    k: int = 2
    spikes: Tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.p < 1:
            raise InvalidArgumentError("p must be >= 1")
        if self.variant in ("exp_decay", "constant"):
            if not 0 <= self.q < 1:
                raise InvalidArgumentError(f"q={self.q} must lie in [0, 1)")
        elif self.variant == "factor":
            spikes = tuple(float(v) for v in self.spikes)
            object.__setattr__(self, "spikes", spikes)
            if self.k < 1 or len(spikes) != self.k or any(v <= 0 for v in spikes):
                raise InvalidArgumentError("factor model needs k >= 1 positive spikes")
            if self.k > self.p:
                raise InvalidArgumentError("factor rank k exceeds p")
        elif self.variant != "identity":
            raise InvalidArgumentError(f"unknown covariance variant {self.variant!r}")

    @classmethod
    def preset(cls, name: str, p: int, seed: int = 0) -> "CovarianceSpec":
        """Two-factor model with the named spike pair."""
        if name not in SPIKE_PRESETS:
            raise InvalidArgumentError(f"unknown preset {name!r}; choose from {sorted(SPIKE_PRESETS)}")
        return cls("factor", p, k=2, spikes=SPIKE_PRESETS[name](p), seed=seed)

    @classmethod
    def from_dict(cls, d: dict, p: int) -> "CovarianceSpec":
        d = dict(d)
        if "preset" in d:
            return cls.preset(d["preset"], p, seed=int(d.get("seed", 0)))
        d.setdefault("p", p)
        if "spikes" in d:
            d["spikes"] = tuple(d["spikes"])
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spikes"] = list(self.spikes)
        return d


def factor_loadings(spec: CovarianceSpec) -> np.ndarray:
    """Column-orthonormal ``p x k`` loadings from a Gaussian matrix."""
    g = stream(spec.seed, STREAM_FACTOR).standard_normal((spec.p, spec.k))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def gen_covariance(spec: CovarianceSpec) -> np.ndarray:
    p = spec.p
    if spec.variant == "identity":
        return np.eye(p)
    if spec.variant == "exp_decay":
        idx = np.arange(p)
        return spec.q ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    if spec.variant == "constant":
        return np.full((p, p), spec.q) + (1 - spec.q) * np.eye(p)
    v = factor_loadings(spec)
    return (v * np.asarray(spec.spikes)) @ v.T + np.eye(p)


@dataclass(frozen=True)
class SimConfig:
    p: int
    s: int
    sigma: float
    cov: CovarianceSpec
    beta_min: float = 0.1
    n_override: Optional[int] = None
    seed: int = 0
    beta_const: Optional[float] = None

    def __post_init__(self):
        if not 1 <= self.s <= self.p:
            raise InvalidArgumentError(f"need 1 <= s <= p, got s={self.s}, p={self.p}")
        if self.sigma < 0 or not self.beta_min > 0:
            raise InvalidArgumentError("need sigma >= 0 and beta_min > 0")
        if self.cov.p != self.p:
            raise InvalidArgumentError("covariance dimension differs from p")
        if self.beta_const is not None and self.beta_const == 0:
            raise InvalidArgumentError("beta_const must be nonzero")

    @property
    def n(self) -> int:
        if self.n_override is not None:
            return int(self.n_override)
        return default_n(self.s, self.p)

    @property
    def truth(self) -> Tuple[int, ...]:
        return tuple(range(self.s))

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        p = int(d["p"])
        cov = d.pop("cov", {"variant": "identity"})
        return cls(
            p=p,
            s=int(d["s"]),
            sigma=float(d["sigma"]),
            cov=CovarianceSpec.from_dict(cov, p),
            beta_min=float(d.get("beta_min", 0.1)),
            n_override=None if d.get("n_override") is None else int(d["n_override"]),
            seed=int(d.get("seed", 0)),
            beta_const=None if d.get("beta_const") is None else float(d["beta_const"]),
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "sigma": self.sigma,
            "beta_min": self.beta_min,
            "n_override": self.n_override,
            "n": self.n,
            "seed": self.seed,
            "beta_const": self.beta_const,
            "cov": self.cov.to_dict(),
        }


def default_n(s: int, p: int) -> int:
    """Sample size ``ceil(2 s log p)``."""
    return int(math.ceil(2 * s * math.log(p)))


def gen_beta(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """``beta_j = beta_min (1 + Z_j^2)`` on the first s coordinates, zero elsewhere.

    A set ``beta_const`` replaces the random draw with that constant.
    """
    beta = np.zeros(config.p)
    if config.beta_const is not None:
        beta[: config.s] = config.beta_const
        return beta
    z = rng.standard_normal(config.s)
    beta[: config.s] = config.beta_min * (1.0 + z**2)
    return beta


def covariance_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric square root; rejects matrices indefinite beyond -1e-8."""
    sigma = np.asarray(sigma, dtype=float)
    w, v = np.linalg.eigh((sigma + sigma.T) / 2)
    if w[0] < -1e-8 * max(1.0, abs(w[-1])):
        raise InvalidCovarianceError(f"covariance has eigenvalue {w[0]:.3g} < 0")
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.T


def sample_dataset(
    config: SimConfig,
    beta,
    rng: np.random.Generator,
    root: Optional[np.ndarray] = None,
) -> Dataset:
    """Gaussian rows ``N(0, Sigma)`` and ``y = X beta + N(0, sigma^2)``.

    ``root`` may carry a precomputed symmetric square root of Sigma.
    """
    if root is None:
        root = covariance_sqrt(gen_covariance(config.cov))
    n = config.n
    x = rng.standard_normal((n, config.p)) @ root
    eps = rng.standard_normal(n)
    y = x @ np.asarray(beta, dtype=float) + config.sigma * eps
    return Dataset(x, y)


def noise_feature_cov(p_n: int) -> np.ndarray:
    return 0.5 * np.eye(p_n) + 0.5 * np.ones((p_n, p_n))


def augment_noise(data: Dataset, p_n: int, rng: np.random.Generator) -> Dataset:
    """Append ``p_n`` equicorrelated (rho = 0.5) Gaussian noise columns."""
    if p_n < 1:
        raise InvalidArgumentError("p_n must be >= 1")
    root = covariance_sqrt(noise_feature_cov(p_n))
    extra = rng.standard_normal((data.n, p_n)) @ root
    return Dataset(np.hstack([data.x, extra]), data.y)


def corner_case(eta: float = 0.5) -> Tuple[Dataset, np.ndarray]:
    """Three-sample, four-column design where two disjoint pairs fit ``y`` exactly.

    Columns 0 and 1 are ``(e1 +- eta e3) / sqrt(1 + eta^2)``, column 2 is
    ``(e1 + e2) / sqrt(2)`` and column 3 is ``e2``. The response is
    ``sqrt(1 + eta^2) / 2 * (x0 + x1) = e1``, which column pair {2, 3}
    reproduces equally well. Returns ``(data, beta_true)``.
    """
    if not 0 <= eta < 1:
        raise InvalidArgumentError("eta must lie in [0, 1)")
    e = np.eye(3)
    c = 1.0 / math.sqrt(1.0 + eta**2)
    x = np.column_stack([
        c * (e[0] + eta * e[2]),
        c * (e[0] - eta * e[2]),
        (e[0] + e[1]) / math.sqrt(2.0),
        e[1],
    ])
    beta = np.array([1.0, 1.0, 0.0, 0.0]) * math.sqrt(1.0 + eta**2) / 2.0
    return Dataset(x, x @ beta), beta
