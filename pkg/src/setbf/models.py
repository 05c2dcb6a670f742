"""Sampling models, data batches and seeded simulation.

Each model reduces a batch to a :class:`~setbf.densities.LogKernel`
increment plus a parameter-free constant, so that

    log f(x | t) = constant + increment(t)

holds exactly.  Posterior updates of kernel densities only ever add
increments, which is what makes sequential and merged updating agree.

Simulation uses the Philox4x64-10 counter-based generator.  Each raw 64-bit
output ``r`` is turned into a uniform ``u = ((r >> 11) + 0.5) / 2**53`` in
the open unit interval; Bernoulli draws are ``u < theta``, binomial counts
sum ``n_trials`` such draws, and normal draws use the inverse normal CDF.
Nothing depends on numpy's distribution samplers, whose streams are not
covered by a stability guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln, ndtri, xlog1py, xlogy

from .densities import LogKernel
from .errors import InvalidObservation, ModelMismatch, OutOfSpace
from .space import REAL_LINE, UNIT_SPACE, ParameterSpace

__all__ = [
    "Bernoulli",
    "BinomialCount",
    "NormalKnownSigma",
    "SamplingModel",
    "DataBatch",
    "log_likelihood",
    "merge",
    "simulate",
    "philox_uniforms",
    "derive_seed",
]


def _as_array(observations) -> np.ndarray:
    return np.asarray(observations, dtype=float).reshape(-1)


@dataclass(frozen=True)
class Bernoulli:
    """Single 0/1 trials; the parameter is the success probability."""

    @property
    def space(self) -> ParameterSpace:
        return UNIT_SPACE

    def validate(self, obs: np.ndarray) -> None:
        bad = obs[(obs != 0) & (obs != 1)]
        if bad.size:
            raise InvalidObservation(f"Bernoulli observations must be 0 or 1, got {float(bad[0]):g}")

    def counts(self, obs: np.ndarray) -> tuple[float, float]:
        s = float(obs.sum())
        return s, float(obs.size) - s

    def log_pmf(self, obs: np.ndarray, theta: float) -> np.ndarray:
        return xlogy(obs, theta) + xlog1py(1.0 - obs, -theta)

    def sufficient(self, obs: np.ndarray) -> tuple[LogKernel, float]:
        s, f = self.counts(obs)
        return LogKernel(a=s, b=f), 0.0

    def mean(self, theta: float) -> float:
        return theta


@dataclass(frozen=True)
class BinomialCount:
    """Success counts out of a fixed number of trials per observation."""

    n_trials: int

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValueError("n_trials must be a positive integer")
        object.__setattr__(self, "n_trials", int(self.n_trials))

    @property
    def space(self) -> ParameterSpace:
        return UNIT_SPACE

    def validate(self, obs: np.ndarray) -> None:
        bad = obs[(obs != np.round(obs)) | (obs < 0) | (obs > self.n_trials)]
        if bad.size:
            raise InvalidObservation(
                f"binomial counts must be integers in [0, {self.n_trials}], got {float(bad[0]):g}"
            )

    def counts(self, obs: np.ndarray) -> tuple[float, float]:
        s = float(obs.sum())
        return s, float(obs.size * self.n_trials) - s

    def _log_choose(self, obs: np.ndarray) -> np.ndarray:
        n = self.n_trials
        return gammaln(n + 1.0) - gammaln(obs + 1.0) - gammaln(n - obs + 1.0)

    def log_pmf(self, obs: np.ndarray, theta: float) -> np.ndarray:
        return self._log_choose(obs) + xlogy(obs, theta) + xlog1py(self.n_trials - obs, -theta)

    def sufficient(self, obs: np.ndarray) -> tuple[LogKernel, float]:
        s, f = self.counts(obs)
        return LogKernel(a=s, b=f), float(self._log_choose(obs).sum())

    def mean(self, theta: float) -> float:
        return self.n_trials * theta


@dataclass(frozen=True)
class NormalKnownSigma:
    """Normal observations with known ``sigma``; the parameter is the mean."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def space(self) -> ParameterSpace:
        return REAL_LINE

    def validate(self, obs: np.ndarray) -> None:
        if not np.all(np.isfinite(obs)):
            raise InvalidObservation("normal observations must be finite")

    def log_pmf(self, obs: np.ndarray, theta: float) -> np.ndarray:
        var = self.sigma**2
        return -0.5 * math.log(2.0 * math.pi * var) - (obs - theta) ** 2 / (2.0 * var)

    def sufficient(self, obs: np.ndarray) -> tuple[LogKernel, float]:
        n = obs.size
        if n == 0:
            return LogKernel(), 0.0
        var = self.sigma**2
        xbar = float(obs.mean())
        ss = float(((obs - xbar) ** 2).sum())
        const = -0.5 * n * math.log(2.0 * math.pi * var) - ss / (2.0 * var)
        return LogKernel(prec=n / var, mean=xbar), const

    def mean(self, theta: float) -> float:
        return theta


SamplingModel = Union[Bernoulli, BinomialCount, NormalKnownSigma]


@dataclass(frozen=True)
class DataBatch:
    """I.i.d. observations under one sampling model; may be empty."""

    model: SamplingModel
    observations: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        obs = _as_array(self.observations)
        self.model.validate(obs)
        object.__setattr__(self, "observations", tuple(float(v) for v in obs))

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.observations, dtype=float)

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def is_empty(self) -> bool:
        return not self.observations

    def sufficient(self) -> tuple[LogKernel, float]:
        """Kernel increment and constant with ``log f(x|t) = const + increment(t)``."""
        return self.model.sufficient(self.values)

    def counts(self) -> tuple[float, float]:
        if isinstance(self.model, NormalKnownSigma):
            raise TypeError("success/failure counts need a Bernoulli or binomial model")
        return self.model.counts(self.values)


def log_likelihood(model: SamplingModel, data: DataBatch, theta: float) -> float:
    """Sum of per-observation log densities (or mass functions) at ``theta``.

    The empty batch has log likelihood 0.
    """
    if data.model != model:
        raise ModelMismatch(f"batch was recorded under {data.model}, not {model}")
    if not model.space.contains(theta):
        raise OutOfSpace(f"theta={theta} lies outside the model's parameter space")
    if data.is_empty:
        return 0.0
    with np.errstate(divide="ignore"):
        return float(np.sum(model.log_pmf(data.values, theta)))


def merge(a: DataBatch, b: DataBatch, label: str | None = None) -> DataBatch:
    """Concatenate two batches recorded under the same sampling model."""
    if a.model != b.model:
        raise ModelMismatch(f"cannot merge batches from {a.model} and {b.model}")
    if label is None:
        label = "+".join(x for x in (a.label, b.label) if x)
    return DataBatch(a.model, a.observations + b.observations, label)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix a base seed with integer keys into an independent 64-bit seed.

    Uses numpy's ``SeedSequence`` hashing, whose algorithm is fixed and
    documented, so ``derive_seed(s, r, n)`` is the same on every platform.
    """
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def philox_uniforms(seed: int, size: int) -> np.ndarray:
    """``size`` uniforms in (0, 1) from Philox4x64-10 keyed by ``seed``."""
    bitgen = np.random.Philox(key=int(seed) & (2**64 - 1), counter=0)
    raw = np.asarray(bitgen.random_raw(size), dtype=np.uint64).reshape(-1)
    return ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def simulate(
    model: SamplingModel,
    theta_star: float,
    n: int,
    seed: int,
    label: str | None = None,
) -> DataBatch:
    """Draw ``n`` observations under ``theta_star``; deterministic given ``seed``."""
    if n < 0:
        raise ValueError("sample size must be non-negative")
    if not model.space.contains(theta_star):
        raise OutOfSpace(f"theta*={theta_star} lies outside the model's parameter space")
    label = label if label is not None else f"sim(theta={theta_star:g}, n={n}, seed={seed})"
    if isinstance(model, Bernoulli):
        obs = (philox_uniforms(seed, n) < theta_star).astype(float)
    elif isinstance(model, BinomialCount):
        u = philox_uniforms(seed, n * model.n_trials).reshape(n, model.n_trials)
        obs = (u < theta_star).sum(axis=1).astype(float)
    elif isinstance(model, NormalKnownSigma):
        obs = theta_star + model.sigma * ndtri(philox_uniforms(seed, n))
    else:
        raise TypeError(f"unknown sampling model {model!r}")
    return DataBatch(model, tuple(obs), label)
