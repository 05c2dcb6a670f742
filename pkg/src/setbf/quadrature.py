"""Numerical integration over hypothesis sets.

Two tools live here:

* :func:`integrate`, adaptive composite Simpson for general smooth
  integrands given as Python callables;
* :func:`tanh_sinh_rule`, the fixed node rule behind grid densities. Its
  nodes cluster double-exponentially at both ends of a segment, which keeps
  beta-type endpoint singularities (shape parameters below one) integrable
  to near machine precision.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .errors import QuadratureNonConvergence
from .space import HypothesisSet

__all__ = ["integrate", "tanh_sinh_rule", "log_integrate_nodes", "NODES_PER_SEGMENT"]

NODES_PER_SEGMENT = 257
_T_MAX = 4.5


def _simpson_panel(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _integrate_interval(f, a, b, rel_tol, abs_tol, max_depth, initial_panels=8):
    edges = np.linspace(a, b, initial_panels + 1)
    fx = [float(f(x)) for x in edges]
    panels = []
    for i in range(initial_panels):
        m, fm, whole = _simpson_panel(f, edges[i], fx[i], edges[i + 1], fx[i + 1])
        panels.append((edges[i], fx[i], m, fm, edges[i + 1], fx[i + 1], whole))
    estimate = math.fsum(p[-1] for p in panels)
    tol = max(rel_tol * abs(estimate), abs_tol)

    total = []
    stack = [(p, tol / initial_panels, 0) for p in panels]
    while stack:
        (a_, fa, m, fm, b_, fb, whole), ptol, depth = stack.pop()
        lm, flm, left = _simpson_panel(f, a_, fa, m, fm)
        rm, frm, right = _simpson_panel(f, m, fm, b_, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * ptol:
            total.append(left + right + delta / 15.0)
            continue
        if depth + 1 >= max_depth:
            raise QuadratureNonConvergence(
                f"adaptive Simpson reached depth {max_depth} on [{a_:g}, {b_:g}]"
            )
        stack.append(((a_, fa, lm, flm, m, fm, left), ptol / 2.0, depth + 1))
        stack.append(((m, fm, rm, frm, b_, fb, right), ptol / 2.0, depth + 1))
    return math.fsum(total)


def integrate(
    f: Callable[[float], float],
    hset: HypothesisSet,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    max_depth: int = 40,
) -> float:
    """Integrate ``f`` over every interval of ``hset``.

    A panel is accepted once the Richardson error estimate falls below
    ``max(rel_tol * |I|, abs_tol)``, apportioned across panels.  Point
    intervals contribute nothing.  Pass ``abs_tol=0`` for purely relative
    accuracy on very small integrals.

    Raises:
        QuadratureNonConvergence: a panel needed more than ``max_depth``
            bisections, or an interval is unbounded.
    """
    parts = []
    for iv in hset.intervals:
        if iv.is_point:
            continue
        if not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
            raise QuadratureNonConvergence("adaptive Simpson needs bounded intervals")
        parts.append(_integrate_interval(f, iv.lo, iv.hi, rel_tol, abs_tol, max_depth))
    return math.fsum(parts)


@lru_cache(maxsize=8)
def _unit_rule(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh rule on a unit-width segment.

    Returns ``(offset, from_right, log_weight)``: the node lies at distance
    ``offset`` from the left end (``from_right`` false) or from the right
    end (``from_right`` true).  Storing distances rather than positions keeps
    nodes next to an endpoint at full relative precision.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("tanh-sinh rule needs an odd node count >= 3")
    k = (n - 1) // 2
    h = _T_MAX / k
    t = h * np.arange(-k, k + 1)
    s = 0.5 * math.pi * np.sinh(np.abs(t))
    # 1 - tanh(s) = 2 / (1 + e^{2s}); on a unit segment the distance is half that.
    offset = 1.0 / (1.0 + np.exp(2.0 * s))
    offset[k] = 0.5
    from_right = t > 0
    # w = h * (pi/2) cosh(t) / cosh(s)^2, halved for the unit-width map.
    log_cosh_s = s + np.log1p(np.exp(-2.0 * s)) - math.log(2.0)
    log_w = math.log(0.5 * h * 0.5 * math.pi) + np.log(np.cosh(t)) - 2.0 * log_cosh_s
    return offset, from_right, log_w


def tanh_sinh_rule(lo: float, hi: float, n: int = NODES_PER_SEGMENT) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and log-weights of the tanh-sinh rule on the finite segment ``[lo, hi]``.

    Nodes that round onto an endpoint are dropped; their weights are far
    below double precision.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"tanh-sinh segment must be finite with lo < hi, got [{lo}, {hi}]")
    offset, from_right, log_w = _unit_rule(n)
    width = hi - lo
    nodes = np.where(from_right, hi - width * offset, lo + width * offset)
    keep = (nodes > lo) & (nodes < hi)
    return nodes[keep], log_w[keep] + math.log(width)


def log_integrate_nodes(log_weights: np.ndarray, log_values: np.ndarray) -> float:
    """``log sum_i w_i exp(v_i)`` without leaving log-space."""
    if log_values.size == 0:
        return -math.inf
    return float(logsumexp(log_weights + log_values))
