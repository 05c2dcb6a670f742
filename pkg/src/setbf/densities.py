"""Parameter densities, restriction to hypothesis sets, and mixtures.

Four kinds of density are supported:

``Beta``, ``Normal``
    closed-form conjugate families on their natural support.
``PointMass``
    a degenerate atom, used for nil hypotheses.
``Grid``
    a density on a finite union of intervals, stored as normalized
    log-density values at tanh-sinh nodes of one or more segments per
    interval.

Every density this package can produce from a conjugate prior and i.i.d.
data has an unnormalized log density of the form

    a*log(t) + b*log(1 - t) - prec*(t - mean)**2 / 2,

a :class:`LogKernel`.  A grid built from such a kernel keeps it, so its
log density can be evaluated exactly between nodes and its nodes can be
re-placed around the posterior mass after every update.  Grids without a
kernel (from non-collapsible mixtures or external arrays) interpolate the
stored log values with a degree-7 spline in the rule's own coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq
from scipy.special import betainc, betaln, logsumexp, ndtr, xlog1py, xlogy

from .errors import (
    CompositionError,
    HypothesisOverlap,
    MassOutsideHypotheses,
    ZeroMassRestriction,
)
from .quadrature import NODES_PER_SEGMENT, _T_MAX, _unit_rule, integrate, tanh_sinh_rule
from .space import (
    REAL_LINE,
    UNIT_SPACE,
    HypothesisSet,
    Interval,
    is_subset_ae,
    set_difference,
    set_intersection,
    set_union,
)

__all__ = [
    "LogKernel",
    "Beta",
    "Normal",
    "PointMass",
    "Grid",
    "Density",
    "MixturePrior",
    "MASS_FLOOR",
    "restrict",
    "probability",
    "compose",
    "decompose",
    "integrate",
    "log_pdf",
    "mixture_log_pdf",
    "to_grid",
    "densities_equal",
    "kernel_segments",
]

MASS_FLOOR = 1e-12
DECOMPOSE_TOL = 1e-6
# Nodes are placed where the kernel is within this many nats of its maximum.
_CLIP_NATS = 100.0
_SPLINE_DEGREE = 7


@dataclass(frozen=True)
class LogKernel:
    """Unnormalized log density ``a log t + b log(1-t) - prec (t-mean)^2 / 2``."""

    a: float = 0.0
    b: float = 0.0
    prec: float = 0.0
    mean: float = 0.0

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.a:
                out = out + xlogy(self.a, theta)
            if self.b:
                out = out + xlog1py(self.b, -theta)
        if self.prec:
            out = out - 0.5 * self.prec * (theta - self.mean) ** 2
        return out

    def slope(self, theta: float) -> float:
        with np.errstate(divide="ignore", invalid="ignore"):
            d = -self.prec * (theta - self.mean)
            if self.a:
                d += self.a / theta if theta != 0 else math.copysign(math.inf, self.a)
            if self.b:
                d -= self.b / (1.0 - theta) if theta != 1 else math.copysign(math.inf, self.b)
        return float(d)

    def curvature(self, theta: float) -> float:
        c = -self.prec
        if self.a and theta != 0:
            c -= self.a / theta**2
        if self.b and theta != 1:
            c -= self.b / (1.0 - theta) ** 2
        return c

    @property
    def needs_unit_domain(self) -> bool:
        return self.a != 0 or self.b != 0

    @property
    def is_concave(self) -> bool:
        return self.a >= 0 and self.b >= 0 and self.prec >= 0

    @property
    def is_flat(self) -> bool:
        return self.a == 0 and self.b == 0 and self.prec == 0

    def __add__(self, other: "LogKernel") -> "LogKernel":
        prec = self.prec + other.prec
        mean = (self.prec * self.mean + other.prec * other.mean) / prec if prec > 0 else 0.0
        return LogKernel(self.a + other.a, self.b + other.b, prec, mean)


def _find_bracket(g, start: float, step: float, direction: float, limit: float, target: float) -> float:
    """Walk from ``start`` until ``g`` drops below ``target`` or ``limit`` is reached."""
    x = start
    for _ in range(200):
        nxt = x + direction * step
        if (direction < 0 and nxt <= limit) or (direction > 0 and nxt >= limit):
            return limit
        if g(nxt) < target:
            return nxt
        x = nxt
        step *= 2.0
    return limit


def _kernel_mode(k: LogKernel, lo: float, hi: float) -> float:
    if k.a == 0 and k.b == 0:
        return min(max(k.mean, lo), hi)
    d_lo, d_hi = k.slope(lo), k.slope(hi)
    if d_lo <= 0:
        return lo
    if d_hi >= 0:
        return hi
    eps_lo = lo if math.isfinite(d_lo) else lo + 1e-300
    eps_hi = hi if math.isfinite(d_hi) else hi - 1e-16 * max(1.0, abs(hi))
    if k.slope(eps_hi) >= 0:
        return eps_hi
    if k.slope(eps_lo) <= 0:
        return eps_lo
    return brentq(k.slope, eps_lo, eps_hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def _clip_point(k: LogKernel, mode: float, far: float, peak: float) -> float:
    """Point between ``mode`` and ``far`` beyond which the kernel is negligible."""
    target = peak - _CLIP_NATS
    g = lambda x: float(k(x))  # noqa: E731
    if math.isfinite(far):
        if g(far) >= target:
            return far
        bracket_far = far
    else:
        curv = -k.curvature(mode)
        step = 1.0 / math.sqrt(curv) if curv > 0 else 1.0
        bracket_far = _find_bracket(g, mode, step, math.copysign(1.0, far - mode), far, target)
        if not math.isfinite(bracket_far):
            raise ZeroMassRestriction("cannot bound an improper kernel on an unbounded interval")
    return brentq(lambda x: g(x) - target, min(mode, bracket_far), max(mode, bracket_far), xtol=1e-14)


def kernel_segments(k: LogKernel, support: HypothesisSet) -> list[tuple[float, float]]:
    """Finite segments covering the kernel's non-negligible mass on ``support``.

    Concave kernels are split at their mode so the tanh-sinh nodes cluster
    on the peak, and clipped where they fall ``_CLIP_NATS`` below it.
    """
    segs: list[tuple[float, float]] = []
    for iv in support.intervals:
        if iv.is_point:
            continue
        lo, hi = iv.lo, iv.hi
        if k.is_concave and not k.is_flat:
            m = _kernel_mode(k, lo, hi)
            peak = float(k(m))
            if not math.isfinite(peak):
                # Mode pinned to an endpoint where the kernel vanishes; fall back to the whole interval.
                if not (math.isfinite(lo) and math.isfinite(hi)):
                    raise ZeroMassRestriction("kernel has no finite peak on an unbounded interval")
                segs.append((lo, hi))
                continue
            left = _clip_point(k, m, lo, peak) if m > lo else m
            right = _clip_point(k, m, hi, peak) if m < hi else m
            for a, b in ((left, m), (m, right)):
                if b > a:
                    segs.append((a, b))
        else:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ZeroMassRestriction("a flat or non-concave kernel needs bounded supports")
            segs.append((lo, hi))
    return segs


class Density:
    """Common interface; concrete kinds are :class:`Beta`, :class:`Normal`,
    :class:`PointMass` and :class:`Grid`."""

    support: HypothesisSet
    kernel: LogKernel | None = None

    @property
    def log_norm(self) -> float:
        """log of the kernel's integral over the support (kernel densities only)."""
        raise NotImplementedError

    def log_pdf(self, theta):
        raise NotImplementedError

    def pdf(self, theta):
        return np.exp(self.log_pdf(theta))

    def effective_range(self) -> tuple[float, float]:
        raise NotImplementedError


def _mask_in(hset: HypothesisSet, theta: np.ndarray) -> np.ndarray:
    mask = np.zeros(theta.shape, dtype=bool)
    for iv in hset.intervals:
        lo_ok = theta >= iv.lo if iv.lo_closed else theta > iv.lo
        hi_ok = theta <= iv.hi if iv.hi_closed else theta < iv.hi
        mask |= lo_ok & hi_ok
    return mask


def _scalar_or_array(out: np.ndarray, theta):
    return float(out) if np.ndim(theta) == 0 else out


@dataclass(frozen=True)
class Beta(Density):
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("beta shape parameters must be positive")

    @property
    def support(self) -> HypothesisSet:
        return UNIT_SPACE.as_set("")

    @property
    def kernel(self) -> LogKernel:
        return LogKernel(self.alpha - 1.0, self.beta - 1.0)

    @property
    def log_norm(self) -> float:
        return float(betaln(self.alpha, self.beta))

    def log_pdf(self, theta):
        t = np.asarray(theta, dtype=float)
        inside = (t >= 0) & (t <= 1)
        out = np.full(t.shape, -math.inf)
        out[inside] = self.kernel(t[inside]) - self.log_norm
        return _scalar_or_array(out, theta)

    def cdf(self, x: float) -> float:
        return float(betainc(self.alpha, self.beta, min(max(x, 0.0), 1.0)))

    def sf(self, x: float) -> float:
        return float(betainc(self.beta, self.alpha, 1.0 - min(max(x, 0.0), 1.0)))

    def effective_range(self):
        return 0.0, 1.0


@dataclass(frozen=True)
class Normal(Density):
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("normal sd must be positive")

    @property
    def support(self) -> HypothesisSet:
        return REAL_LINE.as_set("")

    @property
    def kernel(self) -> LogKernel:
        return LogKernel(prec=1.0 / self.sd**2, mean=self.mean)

    @property
    def log_norm(self) -> float:
        return 0.5 * math.log(2.0 * math.pi) + math.log(self.sd)

    def log_pdf(self, theta):
        t = np.asarray(theta, dtype=float)
        out = self.kernel(t) - self.log_norm
        return _scalar_or_array(out, theta)

    def cdf(self, x: float) -> float:
        return float(ndtr((x - self.mean) / self.sd))

    def sf(self, x: float) -> float:
        return float(ndtr((self.mean - x) / self.sd))

    def effective_range(self):
        return self.mean - 12 * self.sd, self.mean + 12 * self.sd


@dataclass(frozen=True)
class PointMass(Density):
    """Unit atom at ``at``; :meth:`log_pdf` reports log probability mass."""

    at: float

    @property
    def support(self) -> HypothesisSet:
        return HypothesisSet((Interval.point(self.at),))

    def log_pdf(self, theta):
        t = np.asarray(theta, dtype=float)
        out = np.where(t == self.at, 0.0, -math.inf)
        return _scalar_or_array(out, theta)

    def effective_range(self):
        return self.at, self.at


@dataclass(frozen=True, eq=False)
class Grid(Density):
    """Density tabulated at tanh-sinh nodes of finite segments.

    ``log_values[i]`` holds normalized log-density values at the nodes of
    ``segments[i]``.  Construct through :meth:`from_kernel` or
    :meth:`from_log_values`, which normalize.
    """

    support: HypothesisSet
    segments: tuple[tuple[float, float], ...]
    log_values: tuple[np.ndarray, ...]
    kernel: LogKernel | None = None
    kernel_log_norm: float | None = None
    n_nodes: int = NODES_PER_SEGMENT
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.segments) != len(self.log_values):
            raise ValueError("one log-value array per segment is required")
        for (lo, hi), vals in zip(self.segments, self.log_values):
            vals.setflags(write=False)
            if vals.shape != self.rule(lo, hi)[0].shape:
                raise ValueError("log-value array does not match the node rule of its segment")
        for (a, b), (c, d) in zip(self.segments, self.segments[1:]):
            if not b <= c:
                raise ValueError("segments must be sorted and non-overlapping")

    def rule(self, lo: float, hi: float):
        key = (lo, hi)
        if key not in self._cache:
            self._cache[key] = tanh_sinh_rule(lo, hi, self.n_nodes)
        return self._cache[key]

    @classmethod
    def from_kernel(cls, kernel: LogKernel, support: HypothesisSet, n_nodes: int = NODES_PER_SEGMENT) -> "Grid":
        if kernel.needs_unit_domain and not is_subset_ae(support, UNIT_SPACE.as_set()):
            raise ValueError("a beta-type kernel needs a support inside [0, 1]")
        segs = kernel_segments(kernel, support)
        rules = [tanh_sinh_rule(lo, hi, n_nodes) for lo, hi in segs]
        raw = [kernel(nodes) for nodes, _ in rules]
        log_z = _log_total(rules, raw)
        if not math.isfinite(log_z):
            raise ZeroMassRestriction("kernel has no mass on the requested support")
        g = cls(
            support,
            tuple(segs),
            tuple(v - log_z for v in raw),
            kernel=kernel,
            kernel_log_norm=log_z,
            n_nodes=n_nodes,
        )
        for seg, r in zip(segs, rules):
            g._cache[seg] = r
        return g

    @classmethod
    def from_log_values(
        cls,
        support: HypothesisSet,
        segments,
        log_values,
        n_nodes: int = NODES_PER_SEGMENT,
    ) -> "Grid":
        segments = tuple((float(a), float(b)) for a, b in segments)
        raw = [np.asarray(v, dtype=float) for v in log_values]
        rules = [tanh_sinh_rule(lo, hi, n_nodes) for lo, hi in segments]
        log_z = _log_total(rules, raw)
        if not math.isfinite(log_z):
            raise ZeroMassRestriction("grid values carry no mass")
        g = cls(support, segments, tuple(v - log_z for v in raw), n_nodes=n_nodes)
        for seg, r in zip(segments, rules):
            g._cache[seg] = r
        return g

    @property
    def log_norm(self) -> float:
        if self.kernel_log_norm is None:
            raise AttributeError("grid without a kernel has no kernel normalizer")
        return self.kernel_log_norm

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([self.rule(lo, hi)[0] for lo, hi in self.segments])

    @property
    def log_weights(self) -> np.ndarray:
        """Normalized log-density values at :attr:`nodes`."""
        return np.concatenate(self.log_values)

    def quadrature(self):
        """Yield ``(nodes, log_quadrature_weights, log_density_values)`` per segment."""
        for (lo, hi), vals in zip(self.segments, self.log_values):
            nodes, lw = self.rule(lo, hi)
            yield nodes, lw, vals

    def total_mass(self) -> float:
        return math.exp(_log_total([self.rule(*s) for s in self.segments], list(self.log_values)))

    def _spline(self, i: int):
        key = ("spline", i)
        if key not in self._cache:
            lo, hi = self.segments[i]
            t = _rule_t(lo, hi, self.n_nodes)
            vals = np.maximum(self.log_values[i], -1e4)
            self._cache[key] = (make_interp_spline(t, vals, k=_SPLINE_DEGREE), t[0], t[-1])
        return self._cache[key]

    def log_pdf(self, theta):
        t = np.asarray(theta, dtype=float)
        flat = t.reshape(-1)
        out = np.full(flat.shape, -math.inf)
        inside = _mask_in(self.support, flat)
        if self.kernel is not None:
            out[inside] = self.kernel(flat[inside]) - self.kernel_log_norm
        else:
            for i, (lo, hi) in enumerate(self.segments):
                sel = inside & (flat >= lo) & (flat <= hi) & ~np.isfinite(out)
                if not sel.any():
                    continue
                spline, t0, t1 = self._spline(i)
                out[sel] = spline(np.clip(_theta_to_t(flat[sel], lo, hi), t0, t1))
        out = out.reshape(t.shape)
        return _scalar_or_array(out, theta)

    def effective_range(self):
        return self.segments[0][0], self.segments[-1][1]

    def drop_kernel(self) -> "Grid":
        """Same node values, forgetting the closed-form kernel."""
        return Grid(self.support, self.segments, self.log_values, n_nodes=self.n_nodes)

    def __repr__(self):
        kind = f"kernel={self.kernel}" if self.kernel is not None else "tabulated"
        return f"Grid(support={self.support!r}, segments={len(self.segments)}, {kind})"


def _log_total(rules, values) -> float:
    parts = [lw + v for (_, lw), v in zip(rules, values)]
    if not parts:
        return -math.inf
    return float(logsumexp(np.concatenate(parts)))


def _rule_t(lo: float, hi: float, n: int) -> np.ndarray:
    k = (n - 1) // 2
    t = (_T_MAX / k) * np.arange(-k, k + 1)
    # Same filter as tanh_sinh_rule, recomputed so the coordinates line up.
    offset, from_right, _ = _unit_rule(n)
    width = hi - lo
    nodes = np.where(from_right, hi - width * offset, lo + width * offset)
    return t[(nodes > lo) & (nodes < hi)]


def _theta_to_t(theta: np.ndarray, lo: float, hi: float) -> np.ndarray:
    u = (2.0 * theta - lo - hi) / (hi - lo)
    u = np.clip(u, -1.0 + 1e-16, 1.0 - 1e-16)
    return np.arcsinh(np.arctanh(u) * 2.0 / math.pi)


DensityLike = Union[Beta, Normal, PointMass, Grid]


def log_pdf(d: Density, theta):
    """Natural-log density of ``d`` at ``theta``; ``-inf`` off the support."""
    return d.log_pdf(theta)


def to_grid(d: Density, n_nodes: int = NODES_PER_SEGMENT) -> Grid:
    if isinstance(d, Grid):
        return d
    if d.kernel is None:
        raise CompositionError(f"{type(d).__name__} has no grid representation")
    return Grid.from_kernel(d.kernel, d.support, n_nodes)


def _interval_prob_cdf(d, iv: Interval) -> float:
    # Difference the tail with the smaller magnitudes to limit cancellation.
    if d.cdf(iv.lo) > 0.5:
        return d.sf(iv.lo) - d.sf(iv.hi)
    return d.cdf(iv.hi) - d.cdf(iv.lo)


def probability(d: Density, hset: HypothesisSet) -> float:
    """Probability mass that ``d`` puts on ``hset``.

    Conjugate kinds use their closed-form distribution functions, grids use
    their node quadrature.
    """
    if isinstance(d, PointMass):
        return 1.0 if hset.contains(d.at) else 0.0
    target = set_intersection(d.support, hset)
    if target.is_empty or target.measure == 0:
        return 0.0
    if isinstance(d, (Beta, Normal)):
        return min(1.0, max(0.0, math.fsum(_interval_prob_cdf(d, iv) for iv in target.intervals)))
    if set_difference(d.support, hset).measure == 0:
        return 1.0
    if d.kernel is not None:
        try:
            return min(1.0, math.exp(Grid.from_kernel(d.kernel, target, d.n_nodes).log_norm - d.log_norm))
        except ZeroMassRestriction:
            return 0.0
    try:
        return _restrict_tabulated(d, target)[1]
    except ZeroMassRestriction:
        return 0.0


def _restrict_tabulated(g: Grid, target: HypothesisSet) -> tuple[Grid, float]:
    segs, vals = [], []
    for i, ((lo, hi), v) in enumerate(zip(g.segments, g.log_values)):
        for iv in target.intervals:
            a, b = max(lo, iv.lo), min(hi, iv.hi)
            if b <= a:
                continue
            if a == lo and b == hi:
                segs.append((lo, hi))
                vals.append(np.array(v))
            else:
                nodes, _ = tanh_sinh_rule(a, b, g.n_nodes)
                segs.append((a, b))
                vals.append(np.asarray(g.log_pdf(nodes), dtype=float))
    if not segs:
        raise ZeroMassRestriction("restriction leaves no tabulated mass")
    order = np.argsort([s[0] for s in segs])
    segs = [segs[i] for i in order]
    vals = [vals[i] for i in order]
    rules = [tanh_sinh_rule(a, b, g.n_nodes) for a, b in segs]
    log_mass = _log_total(rules, vals)
    if not math.isfinite(log_mass) or math.exp(log_mass) <= MASS_FLOOR:
        raise ZeroMassRestriction("restriction has no mass")
    new = Grid.from_log_values(target, segs, vals, g.n_nodes)
    return new, min(1.0, math.exp(log_mass))


def restrict(pi: Density, hset: HypothesisSet) -> tuple[Density, float]:
    """Restrict ``pi`` to ``hset`` and renormalize.

    Returns the conditional density and the mass ``pi`` puts on ``hset``.
    Conjugate densities restricted to a strict subset become kernel grids;
    a set covering the support returns ``pi`` itself.

    Raises:
        ZeroMassRestriction: the mass is at most :data:`MASS_FLOOR`.
    """
    if isinstance(pi, PointMass):
        if hset.contains(pi.at):
            return pi, 1.0
        raise ZeroMassRestriction(f"point mass at {pi.at} lies outside {hset!r}")
    target = set_intersection(pi.support, hset, label=hset.label)
    if target.is_empty or target.measure == 0:
        raise ZeroMassRestriction(f"continuous density has zero mass on {hset!r}")
    if set_difference(pi.support, hset).measure == 0:
        return pi, 1.0
    if pi.kernel is not None:
        n_nodes = pi.n_nodes if isinstance(pi, Grid) else NODES_PER_SEGMENT
        g = Grid.from_kernel(pi.kernel, target, n_nodes)
        mass = min(1.0, math.exp(g.log_norm - pi.log_norm))
    else:
        g, mass = _restrict_tabulated(pi, target)
    if mass <= MASS_FLOOR:
        raise ZeroMassRestriction(f"mass {mass:.3g} on {hset!r} is below the floor {MASS_FLOOR}")
    return g, mass


@dataclass(frozen=True)
class MixturePrior:
    """Two-hypothesis prior: hypothesis probabilities plus within densities."""

    p_h0: float
    p_h1: float
    within_h0: Density
    within_h1: Density
    h0: HypothesisSet
    h1: HypothesisSet

    def __post_init__(self):
        if not (0.0 <= self.p_h0 <= 1.0 and 0.0 <= self.p_h1 <= 1.0):
            raise ValueError("hypothesis probabilities must lie in [0, 1]")
        if abs(self.p_h0 + self.p_h1 - 1.0) > 1e-12:
            raise ValueError(f"p_h0 + p_h1 = {self.p_h0 + self.p_h1!r}, expected 1")
        for name, hs, d in (("h0", self.h0, self.within_h0), ("h1", self.h1, self.within_h1)):
            if hs.is_empty:
                raise ValueError(f"hypothesis {name} is empty")
            if not is_subset_ae(d.support, hs):
                raise ValueError(f"support of the {name} density {d.support!r} is not inside {hs!r}")

    @classmethod
    def from_p_h0(cls, p_h0: float, within_h0, within_h1, h0, h1) -> "MixturePrior":
        return cls(p_h0, 1.0 - p_h0, within_h0, within_h1, h0, h1)


def mixture_log_pdf(mix: MixturePrior, theta):
    """Pointwise ``log(p0 pi0 + p1 pi1)`` without building a density."""
    with np.errstate(divide="ignore"):
        l0 = np.log(mix.p_h0) + np.asarray(mix.within_h0.log_pdf(theta))
        l1 = np.log(mix.p_h1) + np.asarray(mix.within_h1.log_pdf(theta))
    return np.logaddexp(l0, l1)


def densities_equal(a: Density, b: Density, tol: float = 1e-8) -> bool:
    """Parameter equality for conjugate kinds, sup-norm on a probe grid otherwise."""
    if type(a) is type(b) and isinstance(a, (Beta, Normal, PointMass)):
        return a == b
    if isinstance(a, PointMass) or isinstance(b, PointMass):
        return False
    if a.support != b.support:
        return False
    lo = min(a.effective_range()[0], b.effective_range()[0])
    hi = max(a.effective_range()[1], b.effective_range()[1])
    probe = lo + (np.arange(1001) + 0.5) / 1001 * (hi - lo)
    probe = probe[_mask_in(a.support, probe)]
    return float(np.max(np.abs(a.pdf(probe) - b.pdf(probe)), initial=0.0)) <= tol


def _natural_form(kernel: LogKernel, support: HypothesisSet) -> Density | None:
    if kernel.prec == 0 and set_difference(UNIT_SPACE.as_set(), support).measure == 0:
        return Beta(kernel.a + 1.0, kernel.b + 1.0)
    if not kernel.needs_unit_domain and kernel.prec > 0 and set_difference(REAL_LINE.as_set(), support).measure == 0:
        return Normal(kernel.mean, 1.0 / math.sqrt(kernel.prec))
    return None


def _same(a: Density, b: Density) -> bool:
    if isinstance(a, Grid) or isinstance(b, Grid):
        if not (isinstance(a, Grid) and isinstance(b, Grid)) or a.support != b.support:
            return False
        if a.kernel is not None or b.kernel is not None:
            return a.kernel == b.kernel
        return a.segments == b.segments and all(np.array_equal(x, y) for x, y in zip(a.log_values, b.log_values))
    return a == b


def _segments_for(d: Density, piece: HypothesisSet) -> list[tuple[float, float]]:
    if isinstance(d, Grid) and d.kernel is None:
        return [s for s in d.segments]
    return kernel_segments(d.kernel, set_intersection(d.support, piece))


def compose(mix: MixturePrior) -> Density:
    """Overall density ``p0 pi0 + p1 pi1``.

    Collapses to a single conjugate (or kernel-grid) density when the
    components are identical, or are restrictions of one kernel weighted in
    proportion to their masses.  Otherwise returns a tabulated grid.

    Raises:
        CompositionError: one component is an atom and the mixture does not
            collapse.
    """
    d0, d1 = mix.within_h0, mix.within_h1
    if mix.p_h1 == 0.0:
        return d0
    if mix.p_h0 == 0.0:
        return d1
    if _same(d0, d1):
        return d0
    if isinstance(d0, PointMass) or isinstance(d1, PointMass):
        raise CompositionError("a mixture containing a point mass has no density")

    union = set_union(d0.support, d1.support)
    overlap = set_intersection(d0.support, d1.support).measure
    if d0.kernel is not None and d0.kernel == d1.kernel and overlap == 0:
        c0 = math.log(mix.p_h0) - d0.log_norm
        c1 = math.log(mix.p_h1) - d1.log_norm
        if abs(c0 - c1) <= 1e-8:
            natural = _natural_form(d0.kernel, union)
            if natural is not None:
                return natural
            return Grid.from_kernel(d0.kernel, union)

    # Tabulated mixture: cut the union at every component border and peak.
    cuts = set()
    for d in (d0, d1):
        for a, b in _segments_for(d, union):
            cuts.update((a, b))
    segs = []
    for iv in union.intervals:
        if iv.is_point:
            continue
        lo, hi = iv.lo, iv.hi
        inner = sorted(c for c in cuts if lo < c < hi)
        ends = [lo] + inner + [hi]
        if not math.isfinite(ends[0]):
            ends = ends[1:]
        if not math.isfinite(ends[-1]):
            ends = ends[:-1]
        segs.extend((a, b) for a, b in zip(ends, ends[1:]) if b > a)
    vals = []
    for lo, hi in segs:
        nodes, _ = tanh_sinh_rule(lo, hi)
        vals.append(np.asarray(mixture_log_pdf(mix, nodes), dtype=float))
    return Grid.from_log_values(union, segs, vals)


def decompose(pi: Density, h0: HypothesisSet, h1: HypothesisSet) -> MixturePrior:
    """Split an overall prior into hypothesis probabilities and within densities.

    Raises:
        HypothesisOverlap: ``h0`` and ``h1`` share a set of positive measure.
        MassOutsideHypotheses: more than ``1e-6`` of the mass lies off ``h0 ∪ h1``.
        ZeroMassRestriction: either hypothesis receives no prior mass.
    """
    if set_intersection(h0, h1).measure > 0:
        raise HypothesisOverlap(f"{h0!r} and {h1!r} overlap; decomposition needs disjoint hypotheses")
    m0, m1 = probability(pi, h0), probability(pi, h1)
    outside = 1.0 - m0 - m1
    if outside > DECOMPOSE_TOL:
        raise MassOutsideHypotheses(f"prior mass {outside:.3g} lies outside both hypotheses")
    d0, mass0 = restrict(pi, h0)
    d1, mass1 = restrict(pi, h1)
    total = mass0 + mass1
    return MixturePrior(mass0 / total, mass1 / total, d0, d1, h0, h1)
