import math

import pytest
from hypothesis import HealthCheck, settings

from setbf import AnalysisState, Beta, BinomialCount, MixturePrior, normalize
from setbf.space import Interval

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def unit():
    return normalize([(0.0, 1.0)])


@pytest.fixture
def halves():
    """``[0, 0.5)`` and ``[0.5, 1]``."""
    return (
        normalize([Interval(0.0, 0.5, True, False)], "H0"),
        normalize([(0.5, 1.0)], "H1"),
    )


@pytest.fixture
def paper_state(unit):
    """Uniform versus Beta(15, 7) on a shared unit support, even odds, 20 trials."""
    mix = MixturePrior(0.5, 0.5, Beta(1, 1), Beta(15, 7), unit.relabel("H0"), unit.relabel("H1"))
    return AnalysisState(mix, BinomialCount(20))


def rel_err(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def log_rel_err(la: float, lb: float) -> float:
    """Relative error of ``exp(la)`` against ``exp(lb)``."""
    return abs(math.expm1(la - lb))
