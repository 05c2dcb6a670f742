"""Monte Carlo trajectories of the Bayes factor as the sample size grows.

For each replication ``r`` and schedule point ``n`` a fresh batch of size
``n`` is simulated under ``theta_star`` with seed ``derive_seed(seed, r, n)``
and scored against the *initial* state.  Batches at different ``n`` are
therefore independent rather than nested, and every cell of the result can
be recomputed on its own.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import AnalysisState, bayes_factor
from .errors import ConfigError, WrongRegime
from .models import SamplingModel, derive_seed, simulate
from .space import HypothesisSet, RegimeLabel, classify_regime

__all__ = [
    "TrajectorySpec",
    "TrajectoryResult",
    "CEstimate",
    "SUMMARY_QUANTILES",
    "run_trajectories",
    "estimate_c",
]

SUMMARY_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class TrajectorySpec:
    theta_star: float
    state: AnalysisState
    n_schedule: tuple[int, ...]
    replications: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        sched = tuple(int(n) for n in self.n_schedule)
        object.__setattr__(self, "n_schedule", sched)
        if not sched:
            raise ConfigError("n_schedule must not be empty")
        if sched[0] < 1 or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError(f"n_schedule must be strictly increasing positive sizes, got {list(sched)}")
        if int(self.replications) < 1:
            raise ConfigError("replications must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")
        if not self.model.space.contains(self.theta_star):
            raise ConfigError(f"theta_star={self.theta_star} lies outside the parameter space")

    @property
    def h0(self) -> HypothesisSet:
        return self.state.h0

    @property
    def h1(self) -> HypothesisSet:
        return self.state.h1

    @property
    def model(self) -> SamplingModel:
        return self.state.model

    @property
    def regime(self) -> RegimeLabel:
        return classify_regime(self.theta_star, self.h0, self.h1, self.model.space)


@dataclass(frozen=True)
class CEstimate:
    """Limit constant of the Bayes factor in the overlap regime.

    ``log_c`` is the mean log Bayes factor at the largest sample size and
    ``se`` its jackknife standard error (on the log scale); ``c`` is
    ``exp(log_c)``.
    """

    c: float
    se: float
    log_c: float
    n: int

    def __iter__(self):
        return iter((self.c, self.se))


@dataclass(frozen=True)
class TrajectoryResult:
    spec: TrajectorySpec = field(repr=False)
    regime: RegimeLabel
    log_bf: np.ndarray = field(repr=False)  # shape (replications, len(n_schedule))
    c_estimate: CEstimate | None = None

    @property
    def n_schedule(self) -> tuple[int, ...]:
        return self.spec.n_schedule

    def column(self, n: int) -> np.ndarray:
        return self.log_bf[:, self.n_schedule.index(n)]

    def medians(self) -> np.ndarray:
        return np.median(self.log_bf, axis=0)

    def summary(self) -> list[dict]:
        rows = []
        for j, n in enumerate(self.n_schedule):
            col = self.log_bf[:, j]
            qs = np.quantile(col, SUMMARY_QUANTILES)
            row = {"n": n, "mean": float(np.mean(col))}
            for q, v in zip(SUMMARY_QUANTILES, qs):
                row["median" if q == 0.5 else f"q{int(round(q * 100)):02d}"] = float(v)
            row["frac_positive"] = float(np.mean(col > 0))
            rows.append(row)
        return rows

    def write_long_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["replication", "n", "log_bf"])
            for r in range(self.log_bf.shape[0]):
                for j, n in enumerate(self.n_schedule):
                    w.writerow([r, n, repr(float(self.log_bf[r, j]))])

    def write_summary_csv(self, path: str | Path) -> None:
        rows = self.summary()
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


def _replication(spec: TrajectorySpec, r: int) -> list[float]:
    out = []
    for n in spec.n_schedule:
        data = simulate(spec.model, spec.theta_star, n, derive_seed(spec.seed, r, n), label=f"r{r}n{n}")
        out.append(bayes_factor(spec.state, data).log_bf)
    return out


def _replication_star(args):
    return _replication(*args)


def run_trajectories(spec: TrajectorySpec) -> TrajectoryResult:
    """Simulate ``spec.replications`` independent trajectories.

    Raises:
        WrongRegime: ``theta_star`` is a boundary value (an endpoint of
            either hypothesis, or outside both), for which the limit
            behavior makes no claim.
    """
    regime = spec.regime
    if regime is RegimeLabel.BOUNDARY:
        raise WrongRegime(
            f"theta*={spec.theta_star} is a boundary value of {spec.h0!r} / {spec.h1!r}; "
            "boundary cases are excluded from asymptotic analysis"
        )
    reps = range(int(spec.replications))
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            # map preserves submission order, so the merge is keyed by r.
            rows = list(pool.map(_replication_star, [(spec, r) for r in reps]))
    else:
        rows = [_replication(spec, r) for r in reps]
    log_bf = np.array(rows, dtype=float).reshape(len(reps), len(spec.n_schedule))
    log_bf.setflags(write=False)
    result = TrajectoryResult(spec, regime, log_bf)
    if regime is RegimeLabel.OVERLAP and len(spec.n_schedule) >= 2 and spec.replications >= 10:
        result = TrajectoryResult(spec, regime, log_bf, estimate_c(result))
    return result


def estimate_c(result: TrajectoryResult) -> CEstimate:
    """Estimate ``c(theta*)`` from the trajectories at the largest ``n``.

    Raises:
        WrongRegime: the result is not in the overlap regime.
        ConfigError: fewer than two schedule points or ten replications.
    """
    if result.regime is not RegimeLabel.OVERLAP:
        raise WrongRegime(f"c(theta*) is defined for overlapping hypotheses only, regime is {result.regime.value}")
    if len(result.n_schedule) < 2 or result.log_bf.shape[0] < 10:
        raise ConfigError("estimating c needs at least 2 schedule points and 10 replications")
    x = result.log_bf[:, -1]
    m = x.size
    log_c = float(np.mean(x))
    loo = (np.sum(x) - x) / (m - 1)
    se = float(math.sqrt((m - 1) / m * np.sum((loo - np.mean(loo)) ** 2)))
    return CEstimate(c=math.exp(log_c), se=se, log_c=log_c, n=result.n_schedule[-1])
