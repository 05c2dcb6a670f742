"""JSON analysis configs: model, prior, data and output options.

A config looks like::

    {
      "model": {"model": "binomial", "n_trials": 20},
      "prior": {
        "overall": {"family": "beta", "alpha": 1, "beta": 1},
        "h0": [[0, 0.5, "hi"]],
        "h1": [[0.5, 1]]
      },
      "data": [14],
      "output": {"precision": 6, "jeffreys": false}
    }

``prior`` takes one of two forms.  The *overall* form (``overall``, ``h0``,
``h1``) decomposes one density over two disjoint sets.  The *mixture* form
(``p_h0``, ``h0_density``, ``h1_density`` and optionally ``h0``/``h1``)
states each part directly; a within density is restricted to its hypothesis
when the two differ.

Hypothesis sets are lists of ``[lo, hi]`` pairs.  An optional third element
``"lo"``, ``"hi"`` or ``"both"`` marks open ends; ``{"interval": [lo, hi],
"open": ...}`` is equivalent.  ``"inf"`` and ``"-inf"`` are accepted as
endpoints.  Data are an inline list or a path to a CSV file with one
observation per line (``#`` starts a comment), resolved relative to the
config file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .densities import Beta, Density, MixturePrior, Normal, PointMass, decompose, restrict
from .engine import AnalysisState
from .errors import ConfigError, HypothesisOverlap, SetBFError
from .models import Bernoulli, BinomialCount, DataBatch, NormalKnownSigma, SamplingModel
from .space import HypothesisSet, Interval, normalize, set_intersection

__all__ = [
    "AnalysisConfig",
    "OutputOptions",
    "LimitOptions",
    "load_config",
    "parse_config",
    "parse_model",
    "parse_hypothesis",
    "parse_density",
    "build_state",
    "read_observations",
]

_TOP_KEYS = {"model", "prior", "data", "x", "y", "output", "limit"}


def _fail(where: str, msg: str) -> ConfigError:
    return ConfigError(f"{where}: {msg}")


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool):
        raise _fail(where, f"expected a number, got {v!r}")
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "-inf"):
        return -math.inf if v.strip().startswith("-") else math.inf
    if isinstance(v, (int, float)):
        return float(v)
    raise _fail(where, f"expected a number, got {v!r}")


def _positive_int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise _fail(where, f"expected a positive integer, got {v!r}")
    return v


def parse_model(block: Any, where: str = "model") -> SamplingModel:
    if not isinstance(block, dict):
        raise _fail(where, "expected an object such as {\"model\": \"binomial\", \"n_trials\": 20}")
    kind = block.get("model")
    if kind == "bernoulli":
        return Bernoulli()
    if kind == "binomial":
        if "n_trials" not in block:
            raise _fail(f"{where}.n_trials", "required for the binomial model")
        return BinomialCount(_positive_int(block["n_trials"], f"{where}.n_trials"))
    if kind == "normal":
        if "sigma" not in block:
            raise _fail(f"{where}.sigma", "required for the normal model")
        sigma = _num(block["sigma"], f"{where}.sigma")
        if not (sigma > 0 and math.isfinite(sigma)):
            raise _fail(f"{where}.sigma", "must be positive and finite")
        return NormalKnownSigma(sigma)
    raise _fail(f"{where}.model", f"unknown model {kind!r}; expected bernoulli, binomial or normal")


_OPEN_FLAGS = {None: (True, True), "lo": (False, True), "hi": (True, False), "both": (False, False)}


def _parse_interval(item: Any, where: str) -> Interval:
    flag = None
    if isinstance(item, dict):
        if "interval" not in item:
            raise _fail(where, "interval objects need an \"interval\": [lo, hi] entry")
        flag = item.get("open")
        item = item["interval"]
    if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
        raise _fail(where, f"expected [lo, hi] or [lo, hi, open-flag], got {item!r}")
    if len(item) == 3:
        flag = item[2]
    if flag not in _OPEN_FLAGS:
        raise _fail(where, f"open flag must be \"lo\", \"hi\" or \"both\", got {flag!r}")
    lo_closed, hi_closed = _OPEN_FLAGS[flag]
    try:
        return Interval(_num(item[0], where), _num(item[1], where), lo_closed, hi_closed)
    except ConfigError:
        raise
    except ValueError as exc:
        raise _fail(where, str(exc)) from exc


def parse_hypothesis(spec: Any, where: str, label: str, model: SamplingModel | None = None) -> HypothesisSet:
    if isinstance(spec, dict) and "intervals" in spec:
        label = spec.get("label", label)
        spec = spec["intervals"]
    if not isinstance(spec, list) or not spec:
        raise _fail(where, "expected a non-empty list of [lo, hi] intervals")
    ivs = [_parse_interval(item, f"{where}[{i}]") for i, item in enumerate(spec)]
    try:
        return normalize(ivs, label, model.space if model is not None else None)
    except SetBFError as exc:
        raise _fail(where, str(exc)) from exc


def parse_density(spec: Any, where: str, model: SamplingModel | None = None) -> Density:
    if not isinstance(spec, dict):
        raise _fail(where, "expected a density object with a \"family\" entry")
    family = spec.get("family")
    try:
        if family == "beta":
            d: Density = Beta(_num(spec.get("alpha"), f"{where}.alpha"), _num(spec.get("beta"), f"{where}.beta"))
        elif family == "normal":
            d = Normal(_num(spec.get("mean"), f"{where}.mean"), _num(spec.get("sd"), f"{where}.sd"))
        elif family in ("point", "pointmass"):
            d = PointMass(_num(spec.get("at"), f"{where}.at"))
        else:
            raise _fail(f"{where}.family", f"unknown family {family!r}; expected beta, normal or point")
    except ConfigError:
        raise
    except ValueError as exc:
        raise _fail(where, str(exc)) from exc
    if "truncate_to" in spec:
        target = parse_hypothesis(spec["truncate_to"], f"{where}.truncate_to", "", model)
        try:
            d, _ = restrict(d, target)
        except SetBFError as exc:
            raise _fail(f"{where}.truncate_to", str(exc)) from exc
    if model is not None and not all(model.space.contains_interval(iv) for iv in d.support.intervals):
        raise _fail(
            f"{where}.family",
            f"{family} density support {d.support!r} leaves the parameter space of {model}; use truncate_to",
        )
    return d


def read_observations(path: str | Path) -> list[float]:
    """One value per line; blank lines and ``#`` comments are skipped."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"data file {str(p)!r} does not exist")
    out = []
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip().rstrip(",")
        if not line:
            continue
        try:
            out.append(float(line))
        except ValueError:
            raise ConfigError(f"{p}:{lineno}: cannot read {line!r} as a number") from None
    return out


def _parse_data(spec: Any, where: str, model: SamplingModel, base: Path) -> DataBatch:
    if isinstance(spec, dict):
        if "csv" not in spec:
            raise _fail(where, "data objects need a \"csv\" path")
        spec = spec["csv"]
    if isinstance(spec, str):
        p = Path(spec)
        values = read_observations(p if p.is_absolute() else base / p)
        label = p.stem
    elif isinstance(spec, list):
        values = [_num(v, f"{where}[{i}]") for i, v in enumerate(spec)]
        label = where
    else:
        raise _fail(where, "expected a list of observations or a CSV path")
    try:
        return DataBatch(model, tuple(values), label)
    except SetBFError as exc:
        raise _fail(where, f"{exc} (model is {model})") from exc


@dataclass(frozen=True)
class OutputOptions:
    precision: int = 6
    jeffreys: bool = False


@dataclass(frozen=True)
class LimitOptions:
    theta_star: float
    n_schedule: tuple[int, ...]
    replications: int
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class AnalysisConfig:
    model: SamplingModel
    prior: dict | None = None
    data: DataBatch | None = None
    x: DataBatch | None = None
    y: DataBatch | None = None
    output: OutputOptions = OutputOptions()
    limit: LimitOptions | None = None
    source: Path | None = None
    warnings: list[str] = field(default_factory=list, compare=False)

    def state(self, allow_overlap: bool = False) -> AnalysisState:
        if self.prior is None:
            raise ConfigError("prior: missing; give a prior block or an existing state file")
        return build_state(self.prior, self.model, allow_overlap, self.warnings)

    def batch(self, which: str = "data") -> DataBatch:
        b = getattr(self, which)
        return b if b is not None else DataBatch(self.model, (), which)


def _check_keys(block: dict, allowed: set[str], where: str) -> None:
    extra = sorted(set(block) - allowed)
    if extra:
        raise _fail(where, f"unknown field(s) {', '.join(map(repr, extra))}")


def build_state(
    prior: dict,
    model: SamplingModel,
    allow_overlap: bool = False,
    warnings: list[str] | None = None,
) -> AnalysisState:
    """Turn a ``prior`` block into an :class:`AnalysisState`."""
    if not isinstance(prior, dict):
        raise _fail("prior", "expected an object")
    overall = "overall" in prior
    mixture = any(k in prior for k in ("p_h0", "h0_density", "h1_density"))
    if overall == mixture:
        raise _fail("prior", "give exactly one of the overall form (overall, h0, h1) "
                    "or the mixture form (p_h0, h0_density, h1_density)")
    if overall:
        _check_keys(prior, {"overall", "h0", "h1"}, "prior")
        for key in ("h0", "h1"):
            if key not in prior:
                raise _fail(f"prior.{key}", "required with an overall prior")
        pi = parse_density(prior["overall"], "prior.overall", model)
        h0 = parse_hypothesis(prior["h0"], "prior.h0", "H0", model)
        h1 = parse_hypothesis(prior["h1"], "prior.h1", "H1", model)
        common = set_intersection(h0, h1)
        if not common.is_empty and common.measure > 0:
            if not allow_overlap:
                raise HypothesisOverlap(
                    f"prior: h0 and h1 overlap on {common!r}; an overall prior needs disjoint hypotheses "
                    "(pass --allow-overlap to restrict the prior to each set separately)"
                )
            return _overlapping_state(pi, h0, h1, model, common, warnings)
        try:
            return AnalysisState(decompose(pi, h0, h1), model)
        except SetBFError as exc:
            raise type(exc)(f"prior: {exc}") from exc

    _check_keys(prior, {"p_h0", "h0_density", "h1_density", "h0", "h1"}, "prior")
    for key in ("p_h0", "h0_density", "h1_density"):
        if key not in prior:
            raise _fail(f"prior.{key}", "required with a mixture prior")
    p_h0 = _num(prior["p_h0"], "prior.p_h0")
    if not 0.0 <= p_h0 <= 1.0:
        raise _fail("prior.p_h0", f"must lie in [0, 1], got {p_h0}")
    parts = []
    for key in ("h0", "h1"):
        d = parse_density(prior[f"{key}_density"], f"prior.{key}_density", model)
        if key in prior:
            hs = parse_hypothesis(prior[key], f"prior.{key}", key.upper(), model)
            try:
                d, _ = restrict(d, hs)
            except SetBFError as exc:
                raise type(exc)(f"prior.{key}: {exc}") from exc
        else:
            hs = d.support.relabel(key.upper())
        parts.append((d, hs))
    (d0, hs0), (d1, hs1) = parts
    try:
        mix = MixturePrior(p_h0, 1.0 - p_h0, d0, d1, hs0, hs1)
        return AnalysisState(mix, model)
    except SetBFError:
        raise
    except ValueError as exc:
        raise _fail("prior", str(exc)) from exc


def _overlapping_state(pi, h0, h1, model, common, warnings):
    try:
        d0, m0 = restrict(pi, h0)
        d1, m1 = restrict(pi, h1)
    except SetBFError as exc:
        raise type(exc)(f"prior: {exc}") from exc
    if warnings is not None:
        warnings.append(
            f"h0 and h1 overlap on {common!r}; restricting the overall prior to each set separately "
            "(hypothesis probabilities proportional to prior mass)"
        )
    p0 = m0 / (m0 + m1)
    return AnalysisState(MixturePrior(p0, 1.0 - p0, d0, d1, h0, h1), model)


def _parse_output(block: Any) -> OutputOptions:
    if not isinstance(block, dict):
        raise _fail("output", "expected an object")
    _check_keys(block, {"precision", "jeffreys", "format"}, "output")
    precision = block.get("precision", 6)
    if isinstance(precision, bool) or not isinstance(precision, int) or not 1 <= precision <= 17:
        raise _fail("output.precision", "expected an integer between 1 and 17")
    jeffreys = block.get("jeffreys", False)
    if not isinstance(jeffreys, bool):
        raise _fail("output.jeffreys", "expected true or false")
    return OutputOptions(precision, jeffreys)


def _parse_limit(block: Any) -> LimitOptions:
    if not isinstance(block, dict):
        raise _fail("limit", "expected an object")
    _check_keys(block, {"theta_star", "n_schedule", "replications", "seed", "workers"}, "limit")
    for key in ("theta_star", "n_schedule", "replications"):
        if key not in block:
            raise _fail(f"limit.{key}", "required")
    sched = block["n_schedule"]
    if not isinstance(sched, list) or not sched:
        raise _fail("limit.n_schedule", "expected a non-empty list of sample sizes")
    sched = tuple(_positive_int(n, f"limit.n_schedule[{i}]") for i, n in enumerate(sched))
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise _fail("limit.n_schedule", "must be strictly increasing")
    seed = block.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise _fail("limit.seed", "expected an unsigned 64-bit integer")
    return LimitOptions(
        theta_star=_num(block["theta_star"], "limit.theta_star"),
        n_schedule=sched,
        replications=_positive_int(block["replications"], "limit.replications"),
        seed=seed,
        workers=_positive_int(block.get("workers", 1), "limit.workers"),
    )


def parse_config(doc: Any, base: Path | None = None, source: Path | None = None) -> AnalysisConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at the top level")
    _check_keys(doc, _TOP_KEYS, "config")
    if "model" not in doc:
        raise _fail("model", "required")
    base = base if base is not None else Path.cwd()
    model = parse_model(doc["model"])
    batches = {k: _parse_data(doc[k], k, model, base) for k in ("data", "x", "y") if k in doc}
    prior = doc.get("prior")
    if prior is not None and not isinstance(prior, dict):
        raise _fail("prior", "expected an object")
    return AnalysisConfig(
        model=model,
        prior=prior,
        output=_parse_output(doc.get("output", {})),
        limit=_parse_limit(doc["limit"]) if "limit" in doc else None,
        source=source,
        **batches,
    )


def load_config(path: str | Path) -> AnalysisConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {str(p)!r} does not exist")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: not valid JSON ({exc})") from exc
    return parse_config(doc, base=p.parent, source=p)
