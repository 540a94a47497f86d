"""Adaptive quadrature with explicit error budgets.

Thin layer over QUADPACK (scipy.integrate.quad / quad_vec) that

* maps semi-infinite ranges onto [0, 1) with x = a + t / (1 - t),
* checks the returned error estimate against the requested tolerance and
  raises IntegrationError (carrying the estimate) when it is not met,
* hands nested integrals a tighter inner tolerance (outer / 10).

Also provides fixed composite Gauss-Legendre rules used by the vectorised
tensor-product integrals in `analytic`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .errors import IntegrationError

# QUADPACK's own estimate is pessimistic on smooth integrands; a result is
# only rejected when the estimate exceeds the target by this factor.
ACCEPT_SLACK = 10.0


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-6
    atol: float = 1e-10
    limit: int = 200
    inner_factor: float = 10.0

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.limit < 1:
            raise ValueError("subdivision limit must be >= 1")

    def inner(self) -> "QuadratureSpec":
        """Spec for an integral nested inside one evaluated with `self`."""
        return replace(self, rtol=self.rtol / self.inner_factor, atol=self.atol / self.inner_factor)

    def target(self, value: float) -> float:
        return max(self.atol, self.rtol * abs(value))


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error: float


def _to_unit(f: Callable[[float], float], a: float) -> Callable[[float], float]:
    def g(t):
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(a + t / s) / (s * s)

    return g


def integrate_scalar(f: Callable[[float], float], a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_SPEC,
                     points: Sequence[float] | None = None,
                     strict: bool = True) -> QuadResult:
    """Adaptive integral of a scalar function over [a, b] (b may be inf)."""
    if a == b:
        return QuadResult(0.0, 0.0)
    if math.isinf(b):
        g = _to_unit(f, a)
        lo, hi = 0.0, 1.0
        pts = None
        if points:
            pts = [(p - a) / (1.0 + p - a) for p in points if a < p < math.inf]
    else:
        g, lo, hi = f, a, b
        pts = [p for p in points if a < p < b] if points else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(g, lo, hi, epsabs=spec.atol, epsrel=spec.rtol,
                                  limit=spec.limit, points=pts or None)
    if strict and not (err <= ACCEPT_SLACK * spec.target(val)):
        raise IntegrationError("scalar quadrature did not converge", val, err)
    return QuadResult(float(val), float(err))


def integrate_vector(f: Callable[[float], np.ndarray], a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_SPEC,
                     points: Sequence[float] | None = None,
                     strict: bool = True):
    """Adaptive integral of an array-valued function; returns (values, max error)."""
    if math.isinf(b):
        g = _to_unit(f, a)
        lo, hi = 0.0, 1.0
        pts = [(p - a) / (1.0 + p - a) for p in points] if points else None
    else:
        g, lo, hi = f, a, b
        pts = points
    val, err = integrate.quad_vec(g, lo, hi, epsabs=spec.atol, epsrel=spec.rtol,
                                  limit=spec.limit * 10, norm="max", points=pts)
    val = np.asarray(val, dtype=float)
    scale = float(np.max(np.abs(val))) if val.size else 0.0
    if strict and not (err <= ACCEPT_SLACK * spec.target(scale)):
        raise IntegrationError("vector quadrature did not converge", val, err)
    return val, float(err)


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(edges: Sequence[float], order: int, tail: bool = False):
    """Composite Gauss-Legendre nodes/weights on panels between `edges`.

    With ``tail=True`` a final panel [edges[-1], inf) is added through the
    substitution x = L / u, u in (0, 1], which integrates algebraic tails
    x^{-k}, k > 1, smoothly.
    """
    x, w = gauss_legendre(order)
    e = np.asarray(edges, dtype=float)
    lo, hi = e[:-1, None], e[1:, None]
    nodes = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    if tail:
        big = e[-1]
        u = 0.5 * x + 0.5
        nodes = np.concatenate([nodes, big / u])
        weights = np.concatenate([weights, 0.5 * w * big / u ** 2])
    return nodes, weights


def geometric_edges(start: float, first: float, stop: float, ratio: float = 2.0) -> np.ndarray:
    """Edges start, start+first, start+first*(1+ratio), ... up to `stop` (inclusive)."""
    edges = [start]
    step = first
    while edges[-1] + step < stop:
        edges.append(edges[-1] + step)
        step *= ratio
    edges.append(stop)
    return np.asarray(edges)
