"""Monte Carlo estimators with confidence intervals.

Realizations are drawn in chunks; chunk k uses its own generator seeded from
SeedSequence(seed).spawn(...)[k], so results do not depend on `jobs`.  Chunk
results are integer tallies (or per-cluster tallies), combined in chunk
order, which makes every estimate bit-reproducible.

Scenarios that share a lilypond field carry a cluster id; their confidence
intervals use the between-cluster (ratio-estimator) variance instead of the
independent Bernoulli formula.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from .cox import ModelParams
from .curves import SirCurve
from .errors import ParameterError

TRUNCATION_LIMIT = 1e-3


@dataclass(frozen=True)
class McConfig:
    n: int = 10_000
    seed: int = 0
    r_int: float = 30.0
    window: float | None = None
    ci_level: float = 0.95
    chunk_size: int = 1000
    jobs: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("realization count must be >= 1")
        if not self.r_int > 0:
            raise ParameterError("interference radius must be positive")
        if not 0 < self.ci_level < 1:
            raise ParameterError("CI level must lie in (0, 1)")
        if self.chunk_size < 1 or self.jobs < 1:
            raise ParameterError("chunk size and job count must be >= 1")
        if self.window is not None and self.window < self.r_int:
            raise ParameterError("window radius must be at least the interference radius")

    @property
    def z(self) -> float:
        return NormalDist().inv_cdf(0.5 + 0.5 * self.ci_level)

    def chunks(self):
        k = math.ceil(self.n / self.chunk_size)
        seqs = np.random.SeedSequence(self.seed).spawn(k)
        sizes = [self.chunk_size] * (k - 1) + [self.n - self.chunk_size * (k - 1)]
        return list(zip(seqs, sizes))


@dataclass(frozen=True)
class EstimateWithCi:
    value: float
    half_width: float
    n: int

    @property
    def lo(self):
        return self.value - self.half_width

    @property
    def hi(self):
        return self.value + self.half_width

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


def interference_radius(lam_p: float, tau: float, D: float, alpha: float, theta_max: float,
                        tol: float = 1e-3) -> float:
    """Radius beyond which the mean truncated interference, scaled by theta_max D^alpha,
    stays below tol (this bounds the induced error in the success probability)."""
    if lam_p * tau == 0:
        return 1.0
    c = theta_max * D ** alpha * lam_p * tau * 2.0 * math.pi / (alpha - 2.0)
    return (c / tol) ** (1.0 / (alpha - 2.0))


def _run(fn, args_list, jobs):
    if jobs == 1 or len(args_list) == 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*args_list)))


def _cluster_tallies(batch, per_real):
    """Sum per-realization rows into per-cluster rows (clusters are contiguous)."""
    if batch.cluster is None:
        return None
    cl = batch.cluster
    b = np.flatnonzero(np.r_[True, cl[1:] != cl[:-1]])
    return np.add.reduceat(per_real, b, axis=0), np.diff(np.r_[b, cl.size])


# ---------------------------------------------------------------- success

def _interference(batch, g, alpha, r_int, mask=None):
    keep = batch.active & (batch.r <= r_int)
    if mask is not None:
        keep &= mask
    return np.bincount(batch.rid[keep], weights=g[keep] * batch.r[keep] ** (-alpha), minlength=batch.n)


def _success_chunk(generator, params: ModelParams, thetas, r_int, seedseq, size):
    rng = np.random.default_rng(seedseq)
    batch = generator.draw(rng, size)
    g = rng.standard_exponential(batch.n)
    gz = rng.standard_exponential(batch.r.size)
    I = _interference(batch, gz, params.alpha, r_int)
    ok = g[:, None] > np.asarray(thetas)[None, :] * params.D ** params.alpha * I[:, None]
    return ok.sum(axis=0), _cluster_tallies(batch, ok.astype(np.int64))


def _nt_chunk(generator, params: ModelParams, thetas, r_int, seedseq, size):
    """Nearest active vehicle transmits; the other active vehicles interfere."""
    rng = np.random.default_rng(seedseq)
    batch = generator.draw(rng, size)
    gz = rng.standard_exponential(batch.r.size)
    act = np.flatnonzero(batch.active)
    order = act[np.lexsort((batch.r[act], batch.rid[act]))]
    first = np.ones(order.size, dtype=bool)
    first[1:] = batch.rid[order[1:]] != batch.rid[order[:-1]]
    tx = order[first]
    is_tx = np.zeros(batch.r.size, dtype=bool)
    is_tx[tx] = True
    I = _interference(batch, gz, params.alpha, r_int, ~is_tx)
    sig = np.zeros(batch.n)
    sig[batch.rid[tx]] = gz[tx] * batch.r[tx] ** (-params.alpha)
    # no active vehicle: no link, counted as an outage
    ok = sig[:, None] > np.asarray(thetas)[None, :] * I[:, None]
    return ok.sum(axis=0), _cluster_tallies(batch, ok.astype(np.int64))


def _combine_success(results, thetas, mc: McConfig, label):
    succ = np.sum([r[0] for r in results], axis=0)
    p = succ / mc.n
    if results[0][1] is None:
        hw = mc.z * np.sqrt(p * (1.0 - p) / mc.n)
    else:
        S = np.concatenate([r[1][0] for r in results])
        nc = np.concatenate([r[1][1] for r in results])
        C = nc.size
        resid = S - p[None, :] * nc[:, None]
        var = np.sum(resid ** 2, axis=0) / mc.n ** 2 * (C / max(C - 1, 1))
        hw = mc.z * np.sqrt(var)
    return SirCurve(np.asarray(thetas, dtype=float), p, hw, kind="monte-carlo", n=mc.n, label=label,
                    meta={"successes": succ.tolist()})


def _check_radius(generator, mc):
    if getattr(generator, "radius", math.inf) < mc.r_int - 1e-12:
        raise ParameterError("generator radius is smaller than the interference radius")


def estimate_success(generator, params: ModelParams, thetas, mc: McConfig, label: str = "") -> SirCurve:
    """P(SIR > theta) with common random numbers across the theta grid."""
    _check_radius(generator, mc)
    th = tuple(float(t) for t in thetas)
    args = [(generator, params, th, mc.r_int, s, n) for s, n in mc.chunks()]
    return _combine_success(_run(_success_chunk, args, mc.jobs), th, mc, label)


def nearest_transmitter_success(generator, params: ModelParams, thetas, mc: McConfig,
                                label: str = "") -> SirCurve:
    _check_radius(generator, mc)
    th = tuple(float(t) for t in thetas)
    args = [(generator, params, th, mc.r_int, s, n) for s, n in mc.chunks()]
    return _combine_success(_run(_nt_chunk, args, mc.jobs), th, mc, label)


# ---------------------------------------------------------------- nearest neighbour

def _nn_chunk(generator, seedseq, size):
    rng = np.random.default_rng(seedseq)
    batch = generator.draw(rng, size)
    d = np.full(batch.n, np.inf)
    np.minimum.at(d, batch.rid, batch.r)
    return d, batch.cluster


@dataclass
class NnEstimate:
    r: np.ndarray
    cdf: np.ndarray
    half_width: np.ndarray
    n: int
    distances: np.ndarray  # sorted, inf where censored at the generator radius

    def ks_distance(self, cdf_fn, grid_points: int = 2001) -> float:
        """Kolmogorov-Smirnov distance to a continuous CDF (interpolated on a fine grid)."""
        d = self.distances[np.isfinite(self.distances)]
        if d.size == 0:
            return float(cdf_fn(np.inf)) if callable(cdf_fn) else 1.0
        top = float(d.max())
        grid = np.linspace(0.0, top, grid_points)
        F = np.array([cdf_fn(x) for x in grid])
        Fd = np.interp(d, grid, F)
        n = self.distances.size
        i = np.arange(1, d.size + 1)
        return float(max(np.max(i / n - Fd), np.max(Fd - (i - 1) / n)))


def estimate_nn_cdf(generator, r_grid, mc: McConfig) -> NnEstimate:
    """Empirical CDF of the distance from the typical vehicle to its nearest neighbour.

    Distances beyond the generator radius are censored (recorded as inf).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid > generator.radius):
        raise ParameterError("r grid extends beyond the generator radius")
    res = _run(_nn_chunk, [(generator, s, n) for s, n in mc.chunks()], mc.jobs)
    d = np.sort(np.concatenate([r[0] for r in res]))
    F = np.searchsorted(d, r_grid, side="right") / d.size
    if res[0][1] is None:
        hw = mc.z * np.sqrt(F * (1.0 - F) / d.size)
    else:
        # cluster-robust: tally per field
        S, nc = [], []
        for dist, cl in res:
            b = np.flatnonzero(np.r_[True, cl[1:] != cl[:-1]])
            S.append(np.add.reduceat((dist[:, None] <= r_grid[None, :]).astype(float), b, axis=0))
            nc.append(np.diff(np.r_[b, cl.size]))
        S, nc = np.concatenate(S), np.concatenate(nc)
        C = nc.size
        var = np.sum((S - F[None, :] * nc[:, None]) ** 2, axis=0) / d.size ** 2 * (C / max(C - 1, 1))
        hw = mc.z * np.sqrt(var)
    return NnEstimate(r_grid, F, hw, d.size, d)


# ---------------------------------------------------------------- neighbour counts

def _count_chunk(generator, r_grid, seedseq, size):
    rng = np.random.default_rng(seedseq)
    batch = generator.draw(rng, size)
    counts = np.stack([np.bincount(batch.rid[batch.r <= r], minlength=batch.n) for r in r_grid], axis=1)
    cl = batch.cluster if batch.cluster is not None else np.arange(batch.n)
    b = np.flatnonzero(np.r_[True, cl[1:] != cl[:-1]])
    s1 = np.add.reduceat(counts, b, axis=0)
    s2 = np.add.reduceat(counts * counts, b, axis=0)
    return s1, s2, np.diff(np.r_[b, batch.n])


@dataclass
class CountStats:
    r: np.ndarray
    mean: np.ndarray
    mean_hw: np.ndarray
    var: np.ndarray
    var_hw: np.ndarray
    n: int


def neighbor_count_stats(generator, r_grid, mc: McConfig) -> CountStats:
    """Mean and variance of the number of vehicles within r of the typical vehicle.

    Tallies are exact integer power sums per cluster; CI half-widths come from
    the per-cluster influence sums (plain i.i.d. formulas when clusters are
    single realizations).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid > generator.radius):
        raise ParameterError("r grid extends beyond the generator radius")
    res = _run(_count_chunk, [(generator, tuple(r_grid), s, n) for s, n in mc.chunks()], mc.jobs)
    s1 = np.concatenate([r[0] for r in res]).astype(float)
    s2 = np.concatenate([r[1] for r in res]).astype(float)
    nc = np.concatenate([r[2] for r in res]).astype(float)
    N = float(nc.sum())
    m = s1.sum(axis=0) / N
    v = s2.sum(axis=0) / N - m * m
    v = v * N / (N - 1)
    C = nc.size
    corr = C / max(C - 1, 1)
    psi_m = s1 - nc[:, None] * m
    psi_v = s2 - 2.0 * m * s1 + nc[:, None] * (m * m - v)
    z = mc.z
    mean_hw = z * np.sqrt(corr * np.sum(psi_m ** 2, axis=0)) / N
    var_hw = z * np.sqrt(corr * np.sum(psi_v ** 2, axis=0)) / N
    return CountStats(r_grid, m, mean_hw, v, var_hw, int(N))


# ---------------------------------------------------------------- lilypond fit

def fit_plm_halflength(samples) -> float:
    """Rayleigh parameter matching the mean half-length: b = pi / (4 mean^2)."""
    h = np.asarray(samples, dtype=float)
    if h.size == 0 or np.any(h <= 0):
        raise ParameterError("need positive half-length samples")
    return math.pi / (4.0 * float(h.mean()) ** 2)


def plm_halflength_samples(mu: float, n_fields: int, window: float, seed: int,
                           t_cap: float | None = None):
    """Untruncated half-lengths of sticks with midpoints inside b(o, window).

    Raises if the truncated fraction reaches TRUNCATION_LIMIT.
    """
    from .geometry import sample_plm

    out, n_tr, n_all = [], 0, 0
    for ss in np.random.SeedSequence(seed).spawn(n_fields):
        sys = sample_plm(mu, window, np.random.default_rng(ss), t_cap)
        inside = np.hypot(sys.midpoints[:, 0], sys.midpoints[:, 1]) <= window
        n_all += int(inside.sum())
        n_tr += int((inside & sys.truncated).sum())
        out.append(sys.half_lengths[inside & ~sys.truncated])
    frac = n_tr / max(n_all, 1)
    if frac >= TRUNCATION_LIMIT:
        raise ParameterError(f"truncated stick fraction {frac:.2e} exceeds {TRUNCATION_LIMIT}")
    return np.concatenate(out), frac


# ---------------------------------------------------------------- manifest

def manifest(mc: McConfig, **extra) -> str:
    rec = {"mc": asdict(mc)}
    rec.update(extra)
    return json.dumps(rec, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if hasattr(x, "__dataclass_fields__"):
        return asdict(x)
    return repr(x)
