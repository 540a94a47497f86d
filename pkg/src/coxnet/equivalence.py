"""Total-variation distance between SIR curves and parameter maps between models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import SirCurve
from .errors import ParameterError
from .laws import DeterministicLaw, HalfLengthLaw, RayleighLaw


@dataclass(frozen=True)
class EquivalenceReport:
    pair: tuple
    order: int | None
    eps: float
    theta_star: float
    eps_low: float | None = None
    eps_high: float | None = None
    ci_aware: bool = False
    thetas: np.ndarray = field(default=None, repr=False)
    low_ratio: float | None = None
    high_ratio: float | None = None

    def equivalent(self, threshold: float) -> bool:
        """An equivalence claim needs the upper end of the eps interval below threshold."""
        top = self.eps_high if self.ci_aware else self.eps
        return top < threshold

    def summary(self) -> str:
        s = f"{self.pair[0]} vs {self.pair[1]}"
        if self.order is not None:
            s += f" (m={self.order})"
        s += f": eps={self.eps:.6f} at theta={self.theta_star:.6g}"
        if self.ci_aware:
            s += f", interval [{self.eps_low:.6f}, {self.eps_high:.6f}]"
        return s

    def to_csv(self) -> str:
        head = "pair_a,pair_b,order,eps,theta_star,eps_low,eps_high"
        row = [self.pair[0], self.pair[1], "" if self.order is None else str(self.order),
               repr(float(self.eps)), repr(float(self.theta_star)),
               "" if self.eps_low is None else repr(float(self.eps_low)),
               "" if self.eps_high is None else repr(float(self.eps_high))]
        return head + "\n" + ",".join(row) + "\n"


def _same_grid(a: SirCurve, b: SirCurve):
    if a.thetas.shape != b.thetas.shape or not np.array_equal(a.thetas, b.thetas):
        raise ParameterError("curves are evaluated on different theta grids")


def _ci(c: SirCurve):
    return c.errors if c.kind == "monte-carlo" else np.zeros_like(c.values)


def tv_distance(a: SirCurve, b: SirCurve, order: int | None = None) -> EquivalenceReport:
    """eps = max over the grid of |p_a - p_b| and the grid point attaining it.

    If either curve is Monte Carlo, [eps_low, eps_high] widens each pointwise
    gap by the summed CI half-widths before taking the maximum.
    """
    _same_grid(a, b)
    diff = np.abs(a.values - b.values)
    k = int(np.argmax(diff))
    ci_aware = a.kind == "monte-carlo" or b.kind == "monte-carlo"
    lo = hi = None
    if ci_aware:
        w = _ci(a) + _ci(b)
        lo = float(np.max(np.maximum(diff - w, 0.0)))
        hi = float(np.max(diff + w))
    return EquivalenceReport((a.label or "A", b.label or "B"), order, float(diff[k]), float(a.thetas[k]),
                             lo, hi, ci_aware, a.thetas)


# ---------------------------------------------------------------- parameter maps

SUPPORTED_PAIRS = {("OG", "PLP"), ("PLP", "OG"), ("PLP", "PSP"), ("PSP", "PLM"), ("PLM", "PSP")}


def map_parameters(source: str, params: dict, target: str, c: float | None = None) -> dict:
    """Parameters of `target` equivalent to `source` with `params`.

    OG <-> PLP: same mu.  PLP -> PSP: the family mu_PSP = mu_PLP / (2c) with
    half-lengths c * H1, E[H1] = 1 (deterministic H1 = 1 unless a law `h1` is
    given).  PSP <-> PLM: same mu and same Rayleigh half-length law; for a PLM
    source without a fitted `b` the law b = 1.04 mu is used.
    """
    pair = (source, target)
    if pair not in SUPPORTED_PAIRS:
        raise ParameterError(f"no equivalence map from {source} to {target}")
    mu = float(params["mu"])
    if source in ("OG", "PLP") and target in ("OG", "PLP"):
        return {"model": target, "mu": mu}
    if pair == ("PLP", "PSP"):
        if c is None or not c > 0:
            raise ParameterError("PLP -> PSP needs a positive scale c")
        h1 = params.get("h1", DeterministicLaw(1.0))
        if abs(h1.mean - 1.0) > 1e-9:
            raise ParameterError("the unit half-length law must have mean 1")
        return {"model": "PSP", "mu": mu / (2.0 * c), "law": h1.scaled(c), "c": c}
    law = params.get("law")
    if law is None:
        law = RayleighLaw(float(params["b"]) if "b" in params else PLM_B_PER_MU * mu)
    if not isinstance(law, RayleighLaw):
        raise ParameterError("PSP <-> PLM equivalence uses a Rayleigh half-length law")
    return {"model": target, "mu": mu, "law": law}


# fitted lilypond Rayleigh parameter per unit intensity (b = 1.04 mu)
PLM_B_PER_MU = 1.04


def asymptotic_equivalence_check(a: SirCurve, b: SirCurve, regime: str):
    """Ratio trace along the grid and the last-point deviation from 1.

    regime 'low': outage ratio (1 - p_a) / (1 - p_b), judged at the smallest theta;
    regime 'high': success ratio p_a / p_b, judged at the largest theta.
    """
    _same_grid(a, b)
    if regime == "low":
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = (1.0 - a.values) / (1.0 - b.values)
        last = ratio[0]
    elif regime == "high":
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = a.values / b.values
        last = ratio[-1]
    else:
        raise ParameterError("regime must be 'low' or 'high'")
    return ratio, float(abs(last - 1.0))
