"""One-dimensional parameter spaces and set-valued hypotheses.

A hypothesis is a finite union of disjoint intervals of the parameter
space.  Endpoint topology (open/closed) is tracked exactly so that point
hypotheses and shared borders can be represented, while all measures treat
single points as having measure zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IntervalOutOfSpace, OutOfSpace

__all__ = [
    "Interval",
    "ParameterSpace",
    "HypothesisSet",
    "RegimeLabel",
    "UNIT_SPACE",
    "REAL_LINE",
    "normalize",
    "set_union",
    "set_difference",
    "set_intersection",
    "is_subset_ae",
    "classify_regime",
    "falsifier_class",
]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        # Infinite endpoints are never attained.
        if math.isinf(lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi):
            object.__setattr__(self, "hi_closed", False)
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("a degenerate interval must be a closed point [v, v]")

    @classmethod
    def point(cls, v: float) -> "Interval":
        return cls(v, v, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        if lo < hi or (lo == hi and lo_closed and hi_closed):
            return Interval(lo, hi, lo_closed, hi_closed)
        return None

    def __repr__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class ParameterSpace:
    """The parameter space as a single (possibly unbounded) interval."""

    lower: float
    upper: float
    open_lower: bool = False
    open_upper: bool = False

    def __post_init__(self):
        if not float(self.lower) < float(self.upper):
            raise ValueError("parameter space needs lower < upper")

    def as_interval(self) -> Interval:
        return Interval(self.lower, self.upper, not self.open_lower, not self.open_upper)

    def as_set(self, label: str = "space") -> "HypothesisSet":
        return HypothesisSet((self.as_interval(),), label)

    def contains(self, x: float) -> bool:
        return self.as_interval().contains(x)

    def contains_interval(self, iv: Interval) -> bool:
        return iv.intersect(self.as_interval()) == iv


UNIT_SPACE = ParameterSpace(0.0, 1.0)
REAL_LINE = ParameterSpace(-math.inf, math.inf, True, True)


@dataclass(frozen=True)
class HypothesisSet:
    """Canonical (sorted, merged, pairwise disjoint) finite union of intervals.

    Build instances through :func:`normalize`; the constructor only checks
    the canonical-form invariants.  The empty set is representable so that
    set operations are closed, but analysis states refuse to store it.
    """

    intervals: tuple[Interval, ...]
    label: str = ""

    def __post_init__(self):
        ivs = tuple(self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in zip(ivs, ivs[1:]):
            if not _strictly_before(a, b):
                raise ValueError(f"intervals {a!r} and {b!r} are not in canonical form")

    def __eq__(self, other):
        # Labels are names, not part of set identity.
        if not isinstance(other, HypothesisSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_point(self) -> bool:
        return len(self.intervals) == 1 and self.intervals[0].is_point

    @property
    def measure(self) -> float:
        return math.fsum(iv.length for iv in self.intervals)

    @property
    def lower(self) -> float:
        return self.intervals[0].lo

    @property
    def upper(self) -> float:
        return self.intervals[-1].hi

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    def endpoints(self) -> list[float]:
        pts = []
        for iv in self.intervals:
            pts.extend((iv.lo, iv.hi))
        return [p for p in pts if math.isfinite(p)]

    def relabel(self, label: str) -> "HypothesisSet":
        return HypothesisSet(self.intervals, label)

    def __repr__(self) -> str:
        body = " ∪ ".join(repr(iv) for iv in self.intervals) or "∅"
        return f"{self.label}:{body}" if self.label else body


def _strictly_before(a: Interval, b: Interval) -> bool:
    """True when ``a`` lies entirely left of ``b`` with a genuine gap or an unshared border."""
    if a.hi < b.lo:
        return True
    if a.hi == b.lo:
        # Touching is canonical only when the border point itself is missing.
        return not (a.hi_closed or b.lo_closed)
    return False


def _merge(intervals: Iterable[Interval]) -> list[Interval]:
    ivs = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
    out: list[Interval] = []
    for iv in ivs:
        if out and not _strictly_before(out[-1], iv):
            cur = out[-1]
            if iv.hi > cur.hi:
                hi, hi_closed = iv.hi, iv.hi_closed
            elif iv.hi < cur.hi:
                hi, hi_closed = cur.hi, cur.hi_closed
            else:
                hi, hi_closed = cur.hi, cur.hi_closed or iv.hi_closed
            lo_closed = cur.lo_closed or (iv.lo == cur.lo and iv.lo_closed)
            out[-1] = Interval(cur.lo, hi, lo_closed, hi_closed)
        else:
            out.append(iv)
    return out


def normalize(
    intervals: Sequence[Interval | Sequence[float]],
    label: str = "",
    space: ParameterSpace | None = None,
) -> HypothesisSet:
    """Merge, sort and validate a list of intervals into a :class:`HypothesisSet`.

    Plain ``(lo, hi)`` pairs are read as closed intervals.

    >>> normalize([(0, 0.3), (0.2, 0.5)])
    [0, 0.5]
    >>> normalize([(0.6, 1), (0, 0.2)])
    [0, 0.2] ∪ [0.6, 1]
    """
    ivs = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
    if space is not None:
        for iv in ivs:
            if not space.contains_interval(iv):
                raise IntervalOutOfSpace(f"interval {iv!r} exceeds parameter space {space.as_interval()!r}")
    return HypothesisSet(tuple(_merge(ivs)), label)


def set_union(a: HypothesisSet, b: HypothesisSet, label: str = "") -> HypothesisSet:
    return HypothesisSet(tuple(_merge(a.intervals + b.intervals)), label)


def set_intersection(a: HypothesisSet, b: HypothesisSet, label: str = "") -> HypothesisSet:
    pieces = []
    for x in a.intervals:
        for y in b.intervals:
            z = x.intersect(y)
            if z is not None:
                pieces.append(z)
    return HypothesisSet(tuple(_merge(pieces)), label)


def _complement(b: HypothesisSet) -> HypothesisSet:
    gaps = []
    lo, lo_closed = -math.inf, False
    for iv in b.intervals:
        if lo < iv.lo or (lo == iv.lo and lo_closed and not iv.lo_closed):
            gaps.append(Interval(lo, iv.lo, lo_closed, not iv.lo_closed))
        lo, lo_closed = iv.hi, not iv.hi_closed
    if lo < math.inf:
        gaps.append(Interval(lo, math.inf, lo_closed, False))
    return HypothesisSet(tuple(gaps))


def set_difference(a: HypothesisSet, b: HypothesisSet, label: str = "") -> HypothesisSet:
    """Canonical ``a \\ b``; the result may be empty."""
    return set_intersection(a, _complement(b), label)


def is_subset_ae(a: HypothesisSet, b: HypothesisSet) -> bool:
    """Whether ``a ⊆ b`` up to a set of measure zero.

    A point set must really be contained; otherwise stray border points are
    ignored.
    """
    rest = set_difference(a, b)
    if rest.is_empty:
        return True
    return rest.measure == 0 and a.measure > 0


class RegimeLabel(str, enum.Enum):
    NULL_ONLY = "NullOnly"
    ALT_ONLY = "AltOnly"
    OVERLAP = "Overlap"
    BOUNDARY = "Boundary"


def classify_regime(
    theta_star: float,
    h0: HypothesisSet,
    h1: HypothesisSet,
    space: ParameterSpace | None = None,
) -> RegimeLabel:
    """Which limit the Bayes factor takes when ``theta_star`` is the truth.

    Values on any interval endpoint of either hypothesis, or outside both,
    are labelled ``BOUNDARY`` and carry no asymptotic claim.
    """
    if space is not None and not space.contains(theta_star):
        raise OutOfSpace(f"theta*={theta_star} lies outside the parameter space")
    if theta_star in h0.endpoints() or theta_star in h1.endpoints():
        return RegimeLabel.BOUNDARY
    in0, in1 = h0.contains(theta_star), h1.contains(theta_star)
    if in0 and in1:
        return RegimeLabel.OVERLAP
    if in0:
        return RegimeLabel.NULL_ONLY
    if in1:
        return RegimeLabel.ALT_ONLY
    return RegimeLabel.BOUNDARY


def falsifier_class(of: HypothesisSet, against: HypothesisSet) -> HypothesisSet:
    """Parameter values whose truth drives the evidence decisively against ``of``.

    Only the supports matter: this is ``against \\ of``.
    """
    return set_difference(against, of, label=f"falsifiers({of.label})" if of.label else "")
