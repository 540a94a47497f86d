"""Half-length laws for stick streets.

Every law exposes the density of the half-length H, the length-biased
density h f_H(h) / E[H] (the law of the stick carrying the typical
vehicle), moments, quantiles, samplers and quadrature nodes for
expectations over H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ParameterError

# effective upper bound of the support used by quadrature
TAIL_MASS = 1e-15


class HalfLengthLaw:
    """Common interface; concrete laws are the frozen dataclasses below."""

    kind = "abstract"

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        raise NotImplementedError

    @property
    def biased_mean(self) -> float:
        """Mean of the length-biased law, E[H^2] / E[H]."""
        return self.second_moment / self.mean

    def pdf(self, h):
        raise NotImplementedError

    def biased_pdf(self, h):
        h = np.asarray(h, dtype=float)
        return h * self.pdf(h) / self.mean

    def quantile(self, q):
        raise NotImplementedError

    def sample(self, rng, size):
        raise NotImplementedError

    def sample_biased(self, rng, size):
        raise NotImplementedError

    def scaled(self, c: float) -> "HalfLengthLaw":
        """Law of c * H."""
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        return 0.0, float(self.quantile(1.0 - TAIL_MASS))

    def breakpoints(self) -> np.ndarray:
        """Panel edges for composite quadrature over the support."""
        qs = np.array([0.0, 0.02, 0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95, 0.99,
                       0.999, 0.99999, 1 - 1e-8, 1 - 1e-11, 1 - TAIL_MASS])
        return np.unique(np.asarray(self.quantile(qs), dtype=float))

    def nodes(self, order: int = 8, biased: bool = False):
        """Nodes and weights with sum(w * g(h)) ~= E[g(H)] (or under the biased law)."""
        edges = self.breakpoints()
        x, w = leggauss(order)
        lo, hi = edges[:-1, None], edges[1:, None]
        h = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
        wt = (0.5 * (hi - lo) * w).ravel()
        dens = self.biased_pdf(h) if biased else self.pdf(h)
        wt = wt * dens
        return h, wt / wt.sum()

    def expect(self, fn, biased: bool = False, order: int = 12) -> float:
        h, w = self.nodes(order, biased)
        return float(np.sum(w * np.asarray(fn(h), dtype=float)))


@dataclass(frozen=True)
class DeterministicLaw(HalfLengthLaw):
    h0: float
    kind = "deterministic"

    def __post_init__(self):
        if not (self.h0 > 0 and math.isfinite(self.h0)):
            raise ParameterError(f"deterministic half-length must be positive and finite, got {self.h0}")

    @property
    def mean(self):
        return self.h0

    @property
    def second_moment(self):
        return self.h0 ** 2

    def pdf(self, h):
        raise ParameterError("a deterministic law has no density; use nodes() or expect()")

    def biased_pdf(self, h):
        return self.pdf(h)

    def quantile(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.h0)

    def sample(self, rng, size):
        return np.full(size, self.h0)

    # deterministic lengths are invariant under length biasing
    sample_biased = sample

    def scaled(self, c):
        return DeterministicLaw(c * self.h0)

    def support(self):
        return self.h0, self.h0

    def nodes(self, order=8, biased=False):
        return np.array([self.h0]), np.array([1.0])

    def expect(self, fn, biased=False, order=12):
        return float(np.asarray(fn(np.array([self.h0])), dtype=float)[0])


@dataclass(frozen=True)
class RayleighLaw(HalfLengthLaw):
    """f_H(h) = 2 b h exp(-b h^2)."""

    b: float
    kind = "rayleigh"

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ParameterError(f"Rayleigh parameter b must be positive and finite, got {self.b}")

    @classmethod
    def from_mean(cls, mean: float) -> "RayleighLaw":
        return cls(math.pi / (4.0 * mean ** 2))

    @property
    def mean(self):
        return math.sqrt(math.pi / (4.0 * self.b))

    @property
    def second_moment(self):
        return 1.0 / self.b

    def pdf(self, h):
        h = np.asarray(h, dtype=float)
        return np.where(h >= 0, 2.0 * self.b * h * np.exp(-self.b * h * h), 0.0)

    def cdf(self, h):
        h = np.maximum(np.asarray(h, dtype=float), 0.0)
        return -np.expm1(-self.b * h * h)

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        return np.sqrt(-np.log1p(-q) / self.b)

    def sample(self, rng, size):
        return np.sqrt(rng.standard_exponential(size) / self.b)

    def sample_biased(self, rng, size):
        # b H^2 is Gamma(3/2) under h^2 exp(-b h^2)
        return np.sqrt(rng.standard_gamma(1.5, size) / self.b)

    def scaled(self, c):
        return RayleighLaw(self.b / c ** 2)


@dataclass(frozen=True)
class TabulatedLaw(HalfLengthLaw):
    """Piecewise-linear density on a finite grid (normalised on construction)."""

    grid: tuple
    values: tuple
    kind = "tabulated"
    _h: np.ndarray = field(init=False, repr=False, compare=False)
    _f: np.ndarray = field(init=False, repr=False, compare=False)
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = np.asarray(self.grid, dtype=float)
        f = np.asarray(self.values, dtype=float)
        if h.ndim != 1 or h.shape != f.shape or h.size < 2:
            raise ParameterError("tabulated law needs matching 1-D grid and values with >= 2 points")
        if not np.all(np.isfinite(h)):
            raise ParameterError("tabulated law needs a finite support bound")
        if np.any(np.diff(h) <= 0) or h[0] < 0:
            raise ParameterError("tabulated grid must be non-negative and strictly increasing")
        if np.any(f < 0):
            raise ParameterError("tabulated density must be non-negative")
        seg = 0.5 * (f[1:] + f[:-1]) * np.diff(h)
        total = seg.sum()
        if not total > 0:
            raise ParameterError("tabulated density integrates to zero")
        f = f / total
        object.__setattr__(self, "_h", h)
        object.__setattr__(self, "_f", f)
        object.__setattr__(self, "_cdf", np.concatenate([[0.0], np.cumsum(seg / total)]))
        if not self.mean > 0:
            raise ParameterError("tabulated law must have positive mean")

    def _moment(self, k):
        x, w = leggauss(3)
        lo, hi = self._h[:-1, None], self._h[1:, None]
        hh = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        return float(np.sum(0.5 * (hi - lo) * w * hh ** k * self.pdf(hh)))

    @cached_property
    def mean(self):
        return self._moment(1)

    @cached_property
    def second_moment(self):
        return self._moment(2)

    def pdf(self, h):
        h = np.asarray(h, dtype=float)
        return np.interp(h, self._h, self._f, left=0.0, right=0.0)

    def cdf(self, h):
        h = np.clip(np.asarray(h, dtype=float), self._h[0], self._h[-1])
        i = np.clip(np.searchsorted(self._h, h, side="right") - 1, 0, self._h.size - 2)
        d = h - self._h[i]
        slope = (self._f[i + 1] - self._f[i]) / (self._h[i + 1] - self._h[i])
        return self._cdf[i] + self._f[i] * d + 0.5 * slope * d * d

    def quantile(self, q):
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
        i = np.clip(np.searchsorted(self._cdf, q, side="right") - 1, 0, self._h.size - 2)
        f0 = self._f[i]
        slope = (self._f[i + 1] - f0) / (self._h[i + 1] - self._h[i])
        rem = q - self._cdf[i]
        # solve f0 d + slope d^2 / 2 = rem on the cell
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(f0 * f0 + 2.0 * slope * rem, 0.0))
            d_quad = 2.0 * rem / (f0 + disc)
        d = np.where(np.abs(slope) < 1e-300, np.where(f0 > 0, rem / np.where(f0 > 0, f0, 1.0), 0.0), d_quad)
        d = np.nan_to_num(d)
        return np.clip(self._h[i] + d, self._h[i], self._h[i + 1])

    def sample(self, rng, size):
        return self.quantile(rng.random(size))

    def sample_biased(self, rng, size):
        # rejection from the unbiased law with acceptance h / h_max
        hmax = self._h[-1]
        out = np.empty(0)
        while out.size < size:
            need = size - out.size
            cand = self.sample(rng, 2 * need + 8)
            keep = cand[rng.random(cand.size) * hmax < cand]
            out = np.concatenate([out, keep])
        return out[:size]

    def scaled(self, c):
        return TabulatedLaw(tuple(c * self._h), tuple(self._f / c))

    def support(self):
        return float(self._h[0]), float(self._h[-1])

    def breakpoints(self):
        return self._h.copy()


def law_from_spec(kind: str, **kw) -> HalfLengthLaw:
    """Build a law from a config-style description."""
    kind = kind.lower()
    if kind in ("deterministic", "delta", "fixed"):
        return DeterministicLaw(float(kw["h0"]))
    if kind == "rayleigh":
        if "b" in kw:
            return RayleighLaw(float(kw["b"]))
        return RayleighLaw.from_mean(float(kw["mean"]))
    if kind == "tabulated":
        return TabulatedLaw(tuple(kw["grid"]), tuple(kw["values"]))
    raise ParameterError(f"unknown half-length law {kind!r}")


def law_to_spec(law: HalfLengthLaw) -> dict:
    if isinstance(law, DeterministicLaw):
        return {"kind": "deterministic", "h0": law.h0}
    if isinstance(law, RayleighLaw):
        return {"kind": "rayleigh", "b": law.b}
    if isinstance(law, TabulatedLaw):
        return {"kind": "tabulated", "grid": list(law.grid), "values": list(law.values)}
    raise ParameterError(f"cannot describe law {law!r}")
