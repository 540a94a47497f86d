"""Vehicles on streets and the typical-vehicle (Palm) scenarios.

Two routes exist for every model:

* ``condition_typical_*`` build one explicit scenario with full street
  geometry (`TypicalScenario`), used for inspection, dumps and tests;
* the ``*ScenarioGenerator`` classes draw many scenarios at once in flat
  arrays (realization id per vehicle) for Monte Carlo.

Both share the street samplers of `geometry` and `vehicles_on_segments`.
The typical vehicle is an added point at the origin and is never an
interferer or a neighbour of itself.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInputError, ParameterError, UnsupportedOrderError
from .geometry import (StreetSystem, default_t_cap, psp_padding, sample_og, sample_plm,
                       sample_plp, sample_psp, segment_disk_interval, uniform_disk, unit,
                       write_streets)
from .laws import HalfLengthLaw


@dataclass(frozen=True)
class ModelParams:
    lam: float
    p: float = 1.0
    D: float = 1.0
    alpha: float = 4.0

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ParameterError(f"vehicle intensity must be >= 0, got {self.lam}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"ALOHA probability must lie in [0, 1], got {self.p}")
        if not (self.D > 0 and math.isfinite(self.D)):
            raise ParameterError(f"link distance must be positive, got {self.D}")
        if not (self.alpha > 2 and math.isfinite(self.alpha)):
            raise ParameterError(f"path-loss exponent must exceed 2, got {self.alpha}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def lam_p(self) -> float:
        return self.lam * self.p


@dataclass
class VehicleSet:
    xy: np.ndarray
    street: np.ndarray
    offset: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        self.xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        n = self.xy.shape[0]
        self.street = np.asarray(self.street, dtype=int).reshape(n)
        self.offset = np.asarray(self.offset, dtype=float).reshape(n)
        self.active = np.asarray(self.active, dtype=bool).reshape(n)

    def __len__(self):
        return self.xy.shape[0]

    def subset(self, mask) -> "VehicleSet":
        return VehicleSet(self.xy[mask], self.street[mask], self.offset[mask], self.active[mask])

    def distances(self) -> np.ndarray:
        return np.hypot(self.xy[:, 0], self.xy[:, 1])


def vehicles_on_segments(rng, centers, dirs, halves, lam: float, radius: float):
    """Poisson(lam) points along each segment's part inside b(o, radius).

    Returns (segment index, along-segment offset, xy) of all points.
    """
    if lam < 0:
        raise ParameterError(f"vehicle intensity must be >= 0, got {lam}")
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    if centers.shape[0] == 0 or lam == 0:
        return np.zeros(0, dtype=int), np.zeros(0), np.zeros((0, 2))
    lo, hi = segment_disk_interval(centers, dirs, halves, radius)
    length = np.maximum(hi - lo, 0.0)
    counts = rng.poisson(lam * length)
    seg = np.repeat(np.arange(counts.size), counts)
    t = lo[seg] + rng.random(seg.size) * length[seg]
    xy = centers[seg] + t[:, None] * unit(np.asarray(dirs, dtype=float)[seg]).reshape(-1, 2)
    return seg, t, xy


def sample_vehicles(system: StreetSystem, lam: float, rng, radius: float | None = None) -> VehicleSet:
    """Independent 1-D Poisson processes of intensity lam on every street inside the window."""
    radius = system.window if radius is None else radius
    seg, t, xy = vehicles_on_segments(rng, *system.segments(), lam, radius)
    return VehicleSet(xy, seg, t, np.ones(seg.size, dtype=bool))


def thin_aloha(vehicles: VehicleSet, p: float, rng) -> VehicleSet:
    """Retain each vehicle independently with probability p (the transmitters)."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"ALOHA probability must lie in [0, 1], got {p}")
    keep = rng.random(len(vehicles)) < p
    return vehicles.subset(keep)


def _mark_active(vehicles: VehicleSet, p: float, rng) -> VehicleSet:
    vehicles.active = rng.random(len(vehicles)) < p
    return vehicles


# ---------------------------------------------------------------- explicit scenarios

@dataclass
class TypicalScenario:
    """Typical vehicle at the origin; street ids index own streets first, then background."""

    order: int
    own: StreetSystem
    background: StreetSystem
    vehicles: VehicleSet
    params: ModelParams

    @property
    def n_own(self) -> int:
        return len(self.own)

    def own_vehicles(self) -> VehicleSet:
        return self.vehicles.subset(self.vehicles.street < self.n_own)

    def background_vehicles(self) -> VehicleSet:
        return self.vehicles.subset(self.vehicles.street >= self.n_own)

    def dump(self) -> str:
        """Street file of own + background streets followed by vehicle records."""
        c_own = self.own
        allsys = StreetSystem(self.background.model, self.background.mu, self.background.window,
                              np.concatenate([c_own.offsets, self.background.offsets]),
                              np.concatenate([c_own.line_angles, self.background.line_angles]),
                              np.concatenate([c_own.midpoints, self.background.midpoints]),
                              np.concatenate([c_own.stick_angles, self.background.stick_angles]),
                              np.concatenate([c_own.half_lengths, self.background.half_lengths]),
                              np.concatenate([c_own.truncated, self.background.truncated]),
                              seed=self.background.seed)
        buf = io.StringIO()
        write_streets(allsys, buf)
        buf.write("street_id,offset,active\n")
        # street ids follow the file order: lines first, then sticks
        remap = self._file_order()
        for s, t, a in zip(self.vehicles.street, self.vehicles.offset, self.vehicles.active):
            buf.write(f"{remap[s]},{repr(float(t))},{int(a)}\n")
        return buf.getvalue()

    def _file_order(self):
        ol, os_ = self.own.n_lines, self.own.n_sticks
        bl, bs = self.background.n_lines, self.background.n_sticks
        ids = np.empty(ol + os_ + bl + bs, dtype=int)
        ids[:ol] = np.arange(ol)
        ids[ol:ol + os_] = ol + bl + np.arange(os_)
        ids[ol + os_:ol + os_ + bl] = ol + np.arange(bl)
        ids[ol + os_ + bl:] = ol + bl + os_ + np.arange(bs)
        return ids


def _scenario(order, own, background, params, rng, radius):
    c1, d1, h1 = own.segments()
    c2, d2, h2 = background.segments()
    seg, t, xy = vehicles_on_segments(rng, np.concatenate([c1, c2]), np.concatenate([d1, d2]),
                                      np.concatenate([h1, h2]), params.lam, radius)
    veh = _mark_active(VehicleSet(xy, seg, t, np.ones(seg.size, bool)), params.p, rng)
    return TypicalScenario(order, own, background, veh, params)


def _check_even(m):
    if m not in (2, 4):
        raise UnsupportedOrderError(f"order {m} is not supported here (use 2 or 4)")


def _own_line_angles(model, k, rng):
    if model == "OG":
        if k == 2:
            return np.array([0.0, 0.5 * math.pi])
        return 0.5 * math.pi * rng.integers(0, 2, 1)
    return rng.uniform(0.0, math.pi, k)


def condition_typical_line_model(model: str, m: int, params: ModelParams, mu: float,
                                 window: float, rng) -> TypicalScenario:
    """m/2 lines through the origin plus an independent OG/PLP background."""
    if model not in ("OG", "PLP"):
        raise ParameterError(f"line model must be OG or PLP, got {model!r}")
    _check_even(m)
    k = m // 2
    own = StreetSystem(model, mu, window, np.zeros(k), _own_line_angles(model, k, rng))
    bg = (sample_og if model == "OG" else sample_plp)(mu, window, rng)
    return _scenario(m, own, bg, params, rng, window)


def _own_sticks(law: HalfLengthLaw, k: int, rng):
    h = law.sample_biased(rng, k)
    ang = rng.uniform(0.0, math.pi, k)
    w = rng.uniform(-1.0, 1.0, k) * h
    # origin sits at signed position w from the midpoint
    mid = -w[:, None] * unit(ang).reshape(-1, 2)
    return mid, ang, h


def condition_typical_psp(m: int, params: ModelParams, mu: float, law: HalfLengthLaw,
                          window: float, rng) -> TypicalScenario:
    _check_even(m)
    if not (0 < law.mean < math.inf):
        raise ParameterError("half-length law needs a finite positive mean")
    mid, ang, h = _own_sticks(law, m // 2, rng)
    own = StreetSystem("PSP", mu, window, midpoints=mid, stick_angles=ang, half_lengths=h)
    bg = sample_psp(mu, law, window, rng)
    return _scenario(m, own, bg, params, rng, window)


class PlmPalmSampler:
    """Empirical Palm sampling of lilypond fields.

    A field is grown on a window of radius sel_radius + reach; typical points
    are drawn inside b(o, sel_radius) so that everything within `reach` of
    them is grown correctly.  Order 2 draws a uniform point of the street
    length (equivalently a uniformly chosen vehicle), order 3 a uniformly
    chosen T-junction.
    """

    def __init__(self, mu: float, reach: float, sel_radius: float | None = None,
                 t_cap: float | None = None):
        if not mu > 0:
            raise ParameterError("lilypond Palm sampling needs mu > 0")
        self.mu = float(mu)
        self.reach = float(reach)
        self.sel_radius = float(sel_radius) if sel_radius else max(self.reach, 5.0 / math.sqrt(mu))
        self.t_cap = default_t_cap(mu) if t_cap is None else float(t_cap)
        self.window = self.sel_radius + self.reach

    def field(self, rng):
        sys = sample_plm(self.mu, self.window, rng, self.t_cap)
        lo, hi = segment_disk_interval(sys.midpoints, sys.stick_angles, sys.half_lengths, self.sel_radius)
        return _PlmField(sys, lo, hi, self.sel_radius)

    def pick(self, fld: "_PlmField", order: int, k: int, rng):
        """k typical points: (points (k,2), own stick ids (k,2) with -1 padding)."""
        if order == 2:
            length = np.maximum(fld.hi - fld.lo, 0.0)
            total = length.sum()
            if not total > 0:
                raise DegenerateInputError("no street length inside the selection disk")
            idx = rng.choice(length.size, size=k, p=length / total)
            t = fld.lo[idx] + rng.random(k) * length[idx]
            pts = fld.sys.midpoints[idx] + t[:, None] * unit(fld.sys.stick_angles[idx]).reshape(-1, 2)
            own = np.stack([idx, np.full(k, -1)], axis=1)
        elif order == 3:
            jp = fld.sys.junction_points
            ok = np.flatnonzero(np.hypot(jp[:, 0], jp[:, 1]) <= self.sel_radius)
            if ok.size == 0:
                raise DegenerateInputError("no T-junction inside the selection disk")
            pick = ok[rng.integers(0, ok.size, k)]
            pts = jp[pick]
            own = np.stack([fld.sys.junction_blocker[pick], fld.sys.junction_stopped[pick]], axis=1)
        else:
            raise UnsupportedOrderError(f"lilypond order must be 2 or 3, got {order}")
        return pts, own


@dataclass
class _PlmField:
    sys: StreetSystem
    lo: np.ndarray
    hi: np.ndarray
    sel_radius: float
    _tree: cKDTree | None = field(default=None, repr=False)

    @property
    def tree(self):
        if self._tree is None:
            self._tree = cKDTree(self.sys.midpoints)
        return self._tree

    @property
    def hmax(self):
        return float(self.sys.half_lengths.max())


def condition_typical_plm(order: int, params: ModelParams, mu: float, window: float, rng,
                          max_retries: int = 20, sampler: PlmPalmSampler | None = None) -> TypicalScenario:
    """Grow a field, pick a typical point, translate it to the origin."""
    if order not in (2, 3):
        raise UnsupportedOrderError(f"lilypond order must be 2 or 3, got {order}")
    sampler = sampler or PlmPalmSampler(mu, window)
    for _ in range(max_retries):
        fld = sampler.field(rng)
        try:
            pts, own = sampler.pick(fld, order, 1, rng)
        except DegenerateInputError:
            continue
        sys = fld.sys.translated(pts[0])
        own_ids = [i for i in own[0] if i >= 0]
        mask = np.zeros(sys.n_sticks, dtype=bool)
        mask[own_ids] = True
        own_sys = sys.select_sticks(mask)
        bg = sys.select_sticks(~mask)
        bg.window = own_sys.window = window
        return _scenario(order, own_sys, bg, params, rng, window)
    raise DegenerateInputError("no admissible typical point after bounded retries")


def nearest_neighbor_distance(scenario: TypicalScenario) -> float:
    if len(scenario.vehicles) == 0:
        raise DegenerateInputError("scenario has no vehicle besides the typical one")
    return float(scenario.vehicles.distances().min())


# ---------------------------------------------------------------- batched generators

@dataclass
class Batch:
    """Vehicles of n scenarios in flat arrays.

    rid: scenario index per vehicle; r: distance to the typical vehicle;
    own: vehicle lies on one of the typical vehicle's streets;
    cluster: per-scenario group id (scenarios sharing a field), or None.
    """

    n: int
    rid: np.ndarray
    r: np.ndarray
    active: np.ndarray
    own: np.ndarray
    cluster: np.ndarray | None = None


def _batch(n, rid, xy, own, p, rng, cluster=None):
    r = np.hypot(xy[:, 0], xy[:, 1])
    active = rng.random(r.size) < p
    return Batch(n, rid, r, active, own, cluster)


class LineScenarioGenerator:
    """OG/PLP typical vehicle of order 2 or 4, vehicles within `radius`."""

    def __init__(self, model: str, m: int, params: ModelParams, mu: float, radius: float):
        if model not in ("OG", "PLP"):
            raise ParameterError(f"line model must be OG or PLP, got {model!r}")
        _check_even(m)
        if mu < 0 or radius <= 0:
            raise ParameterError("need mu >= 0 and radius > 0")
        self.model, self.m, self.params, self.mu, self.radius = model, m, params, float(mu), float(radius)

    def draw(self, rng, n: int) -> Batch:
        k = self.m // 2
        R = self.radius
        counts = rng.poisson(2.0 * self.mu * R, n)
        nb = int(counts.sum())
        off = np.concatenate([np.zeros(n * k), rng.uniform(-R, R, nb)])
        if self.model == "OG":
            if k == 2:
                own_ang = np.tile([0.0, 0.5 * math.pi], n)
            else:
                own_ang = 0.5 * math.pi * rng.integers(0, 2, n)
            bg_ang = 0.5 * math.pi * rng.integers(0, 2, nb)
        else:
            own_ang = rng.uniform(0.0, math.pi, n * k)
            bg_ang = rng.uniform(0.0, math.pi, nb)
        ang = np.concatenate([own_ang, bg_ang])
        line_rid = np.concatenate([np.repeat(np.arange(n), k), np.repeat(np.arange(n), counts)])
        centers = off[:, None] * unit(ang)
        seg, _, xy = vehicles_on_segments(rng, centers, ang + 0.5 * math.pi, np.full(off.size, np.inf),
                                          self.params.lam, R)
        return _batch(n, line_rid[seg], xy, seg < n * k, self.params.p, rng)


class PspScenarioGenerator:
    def __init__(self, m: int, params: ModelParams, mu: float, law: HalfLengthLaw, radius: float):
        _check_even(m)
        if mu < 0 or radius <= 0:
            raise ParameterError("need mu >= 0 and radius > 0")
        self.m, self.params, self.mu, self.law, self.radius = m, params, float(mu), law, float(radius)
        self.big = self.radius + psp_padding(law)

    def draw(self, rng, n: int) -> Batch:
        k = self.m // 2
        mid_o, ang_o, h_o = _own_sticks(self.law, n * k, rng)
        counts = rng.poisson(self.mu * math.pi * self.big ** 2, n)
        nb = int(counts.sum())
        mid = np.concatenate([mid_o, uniform_disk(rng, nb, self.big)])
        ang = np.concatenate([ang_o, rng.uniform(0.0, math.pi, nb)])
        h = np.concatenate([h_o, self.law.sample(rng, nb)])
        srid = np.concatenate([np.repeat(np.arange(n), k), np.repeat(np.arange(n), counts)])
        seg, _, xy = vehicles_on_segments(rng, mid, ang, h, self.params.lam, self.radius)
        return _batch(n, srid[seg], xy, seg < n * k, self.params.p, rng)


class PlmScenarioGenerator:
    """Lilypond typical vehicle (order 2: on a street, 3: at a T-junction).

    Several typical points share one grown field; `points_per_field`
    defaults to the expected number of sticks in the selection disk, at most 200.  The
    field index is returned as the cluster id of each scenario.
    """

    def __init__(self, order: int, params: ModelParams, mu: float, radius: float,
                 sel_radius: float | None = None, t_cap: float | None = None,
                 points_per_field: int | None = None):
        if order not in (2, 3):
            raise UnsupportedOrderError(f"lilypond order must be 2 or 3, got {order}")
        self.order, self.params, self.mu, self.radius = order, params, float(mu), float(radius)
        self.sampler = PlmPalmSampler(mu, radius, sel_radius, t_cap)
        if points_per_field is None:
            # one point per stick in the selection disk, capped so a run spans enough fields for the cluster CI
            points_per_field = min(200, max(1, int(round(mu * math.pi * self.sampler.sel_radius ** 2))))
        self.points_per_field = int(points_per_field)

    def draw(self, rng, n: int) -> Batch:
        rids, xys, owns, cluster = [], [], [], np.empty(n, dtype=int)
        done, nf = 0, 0
        while done < n:
            fld = self.sampler.field(rng)
            try:
                k = min(self.points_per_field, n - done)
                pts, own = self.sampler.pick(fld, self.order, k, rng)
            except DegenerateInputError:
                continue
            sys = fld.sys
            nbrs = fld.tree.query_ball_point(pts, self.radius + fld.hmax)
            cnt = np.fromiter((len(v) for v in nbrs), dtype=int, count=k)
            sid = np.concatenate([np.asarray(v, dtype=int) for v in nbrs]) if cnt.sum() else np.zeros(0, int)
            prid = np.repeat(np.arange(k), cnt)
            centers = sys.midpoints[sid] - pts[prid]
            seg, _, xy = vehicles_on_segments(rng, centers, sys.stick_angles[sid], sys.half_lengths[sid],
                                              self.params.lam, self.radius)
            vrid = prid[seg]
            vs = sid[seg]
            owns.append((vs == own[vrid, 0]) | (vs == own[vrid, 1]))
            rids.append(vrid + done)
            xys.append(xy)
            cluster[done:done + k] = nf
            done += k
            nf += 1
        xy = np.concatenate(xys) if xys else np.zeros((0, 2))
        return _batch(n, np.concatenate(rids), xy, np.concatenate(owns), self.params.p, rng, cluster)


class PppScenarioGenerator:
    """Homogeneous PPP baseline: d=1 on a line through the origin, d=2 in the plane."""

    def __init__(self, d: int, intensity: float, p: float, radius: float):
        if d not in (1, 2):
            raise ParameterError("PPP dimension must be 1 or 2")
        if intensity < 0 or radius <= 0 or not 0 <= p <= 1:
            raise ParameterError("invalid PPP baseline parameters")
        self.d, self.intensity, self.p, self.radius = d, float(intensity), float(p), float(radius)

    def draw(self, rng, n: int) -> Batch:
        R = self.radius
        if self.d == 1:
            counts = rng.poisson(self.intensity * 2.0 * R, n)
            x = rng.uniform(-R, R, int(counts.sum()))
            xy = np.stack([x, np.zeros_like(x)], axis=1)
        else:
            counts = rng.poisson(self.intensity * math.pi * R * R, n)
            xy = uniform_disk(rng, int(counts.sum()), R)
        rid = np.repeat(np.arange(n), counts)
        return _batch(n, rid, xy, np.zeros(rid.size, bool), self.p, rng)
