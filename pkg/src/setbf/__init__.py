"""Bayes factors for hypotheses that are sets of parameter values."""

from .asymptotics import CEstimate, TrajectoryResult, TrajectorySpec, estimate_c, run_trajectories
from .densities import (
    Beta,
    Grid,
    LogKernel,
    MixturePrior,
    Normal,
    PointMass,
    compose,
    decompose,
    probability,
    restrict,
)
from .engine import (
    AnalysisState,
    ConsistencyReport,
    EvidenceReport,
    InconsistencyDiagnostics,
    ParadoxReport,
    bayes_factor,
    check_consistency,
    inconsistent_path,
    log_marginal_likelihood,
    paradox_demo,
    sequential_bayes_factor,
    set_based_bayes_factor,
    update_density,
    update_state,
)
from .errors import (
    CompositionError,
    ConfigError,
    HypothesisOverlap,
    IntervalOutOfSpace,
    InvalidObservation,
    MassOutsideHypotheses,
    ModelMismatch,
    NumericalError,
    OutOfSpace,
    QuadratureNonConvergence,
    SetBFError,
    StateFormatError,
    WrongRegime,
    ZeroMassRestriction,
)
from .models import Bernoulli, BinomialCount, DataBatch, NormalKnownSigma, derive_seed, merge, simulate
from .quadrature import integrate
from .space import (
    REAL_LINE,
    UNIT_SPACE,
    HypothesisSet,
    Interval,
    ParameterSpace,
    RegimeLabel,
    classify_regime,
    falsifier_class,
    normalize,
    set_difference,
    set_intersection,
    set_union,
)
from .state_io import dump_state, load_state, state_from_dict, state_to_dict

__all__ = [
    "AnalysisState",
    "Bernoulli",
    "Beta",
    "BinomialCount",
    "CEstimate",
    "CompositionError",
    "ConfigError",
    "ConsistencyReport",
    "DataBatch",
    "EvidenceReport",
    "Grid",
    "HypothesisOverlap",
    "HypothesisSet",
    "InconsistencyDiagnostics",
    "Interval",
    "IntervalOutOfSpace",
    "InvalidObservation",
    "LogKernel",
    "MassOutsideHypotheses",
    "MixturePrior",
    "ModelMismatch",
    "Normal",
    "NormalKnownSigma",
    "NumericalError",
    "OutOfSpace",
    "ParadoxReport",
    "ParameterSpace",
    "PointMass",
    "QuadratureNonConvergence",
    "REAL_LINE",
    "RegimeLabel",
    "SetBFError",
    "StateFormatError",
    "TrajectoryResult",
    "TrajectorySpec",
    "UNIT_SPACE",
    "WrongRegime",
    "ZeroMassRestriction",
    "bayes_factor",
    "check_consistency",
    "classify_regime",
    "compose",
    "decompose",
    "derive_seed",
    "dump_state",
    "estimate_c",
    "falsifier_class",
    "inconsistent_path",
    "integrate",
    "load_state",
    "log_marginal_likelihood",
    "merge",
    "normalize",
    "paradox_demo",
    "probability",
    "restrict",
    "run_trajectories",
    "sequential_bayes_factor",
    "set_based_bayes_factor",
    "set_difference",
    "set_intersection",
    "set_union",
    "simulate",
    "state_from_dict",
    "state_to_dict",
    "update_density",
    "update_state",
]

__version__ = "0.1.0"
