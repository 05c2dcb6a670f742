"""Versioned JSON persistence of analysis states.

Floats are written with ``repr`` precision, so conjugate states round-trip
exactly and grid values to the last bit.  Infinite values are written as
the strings ``"inf"`` and ``"-inf"`` to keep the documents standard JSON.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .densities import Beta, Density, Grid, LogKernel, MixturePrior, Normal, PointMass
from .engine import AnalysisState
from .errors import StateFormatError
from .models import Bernoulli, BinomialCount, NormalKnownSigma, SamplingModel
from .space import HypothesisSet, Interval

FORMAT_VERSION = 1

__all__ = [
    "FORMAT_VERSION",
    "state_to_dict",
    "state_from_dict",
    "dump_state",
    "load_state",
    "model_to_dict",
    "model_from_dict",
    "density_to_dict",
    "density_from_dict",
]


def _enc(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _dec(x) -> float:
    if isinstance(x, str):
        if x in ("inf", "+inf", "Infinity"):
            return math.inf
        if x in ("-inf", "-Infinity"):
            return -math.inf
        raise StateFormatError(f"unexpected numeric string {x!r}")
    return float(x)


def set_to_dict(s: HypothesisSet) -> dict:
    return {
        "label": s.label,
        "intervals": [
            {"lo": _enc(iv.lo), "hi": _enc(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}
            for iv in s.intervals
        ],
    }


def set_from_dict(d: dict) -> HypothesisSet:
    ivs = tuple(
        Interval(_dec(iv["lo"]), _dec(iv["hi"]), bool(iv["lo_closed"]), bool(iv["hi_closed"]))
        for iv in d["intervals"]
    )
    return HypothesisSet(ivs, d.get("label", ""))


def model_to_dict(model: SamplingModel) -> dict:
    if isinstance(model, Bernoulli):
        return {"model": "bernoulli"}
    if isinstance(model, BinomialCount):
        return {"model": "binomial", "n_trials": model.n_trials}
    if isinstance(model, NormalKnownSigma):
        return {"model": "normal", "sigma": model.sigma}
    raise TypeError(f"unknown model {model!r}")


def model_from_dict(d: dict) -> SamplingModel:
    kind = d.get("model")
    if kind == "bernoulli":
        return Bernoulli()
    if kind == "binomial":
        return BinomialCount(int(d["n_trials"]))
    if kind == "normal":
        return NormalKnownSigma(float(d["sigma"]))
    raise StateFormatError(f"unknown model kind {kind!r}")


def density_to_dict(d: Density) -> dict:
    if isinstance(d, Beta):
        return {"kind": "beta", "alpha": d.alpha, "beta": d.beta}
    if isinstance(d, Normal):
        return {"kind": "normal", "mean": d.mean, "sd": d.sd}
    if isinstance(d, PointMass):
        return {"kind": "point", "at": d.at}
    if isinstance(d, Grid):
        k = d.kernel
        return {
            "kind": "grid",
            "support": set_to_dict(d.support),
            "n_nodes": d.n_nodes,
            "segments": [[a, b] for a, b in d.segments],
            "log_values": [[_enc(v) for v in vals.tolist()] for vals in d.log_values],
            "kernel": None if k is None else {"a": k.a, "b": k.b, "prec": k.prec, "mean": k.mean},
            "kernel_log_norm": d.kernel_log_norm,
        }
    raise TypeError(f"unknown density {d!r}")


def density_from_dict(d: dict) -> Density:
    kind = d.get("kind")
    if kind == "beta":
        return Beta(float(d["alpha"]), float(d["beta"]))
    if kind == "normal":
        return Normal(float(d["mean"]), float(d["sd"]))
    if kind == "point":
        return PointMass(float(d["at"]))
    if kind == "grid":
        k = d.get("kernel")
        kernel = None if k is None else LogKernel(float(k["a"]), float(k["b"]), float(k["prec"]), float(k["mean"]))
        try:
            return Grid(
                set_from_dict(d["support"]),
                tuple((float(a), float(b)) for a, b in d["segments"]),
                tuple(np.array([_dec(v) for v in vals], dtype=float) for vals in d["log_values"]),
                kernel=kernel,
                kernel_log_norm=d.get("kernel_log_norm"),
                n_nodes=int(d.get("n_nodes", 257)),
            )
        except ValueError as exc:
            raise StateFormatError(f"malformed grid density: {exc}") from exc
    raise StateFormatError(f"unknown density kind {kind!r}")


def state_to_dict(state: AnalysisState) -> dict:
    mix = state.mix
    return {
        "format_version": FORMAT_VERSION,
        "model": model_to_dict(state.model),
        "hypotheses": {"h0": set_to_dict(mix.h0), "h1": set_to_dict(mix.h1)},
        "p_h0": mix.p_h0,
        "p_h1": mix.p_h1,
        "within_h0": density_to_dict(mix.within_h0),
        "within_h1": density_to_dict(mix.within_h1),
        "history": list(state.history),
    }


def state_from_dict(doc: dict) -> AnalysisState:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise StateFormatError(
            f"state file has format_version {version!r}; this build reads version {FORMAT_VERSION} only"
        )
    try:
        mix = MixturePrior(
            float(doc["p_h0"]),
            float(doc["p_h1"]),
            density_from_dict(doc["within_h0"]),
            density_from_dict(doc["within_h1"]),
            set_from_dict(doc["hypotheses"]["h0"]),
            set_from_dict(doc["hypotheses"]["h1"]),
        )
        return AnalysisState(mix, model_from_dict(doc["model"]), tuple(doc.get("history", ())))
    except KeyError as exc:
        raise StateFormatError(f"state file lacks field {exc.args[0]!r}") from exc
    except ValueError as exc:
        if isinstance(exc, StateFormatError):
            raise
        raise StateFormatError(str(exc)) from exc


def dump_state(state: AnalysisState, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2) + "\n")


def load_state(path: str | Path) -> AnalysisState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_dict(doc)
