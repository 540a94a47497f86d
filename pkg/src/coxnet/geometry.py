"""Random street systems: lines, sticks, lilypond growth and disk intersections.

A line with offset x and normal angle phi is {(a, b): a cos(phi) + b sin(phi) = x};
its direction is phi + pi/2.  A stick is the segment y +- h u(varphi).

Internally every street is also viewed as a centred segment
(center, direction angle, half-length) with half-length inf for lines, which
lets the disk/chord and vehicle code treat both kinds uniformly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInputError, ParameterError
from .laws import HalfLengthLaw

GEOM_TOL = 1e-9
MODELS = ("OG", "PLP", "PSP", "PLM")
# PSP midpoint padding: the (1 - PAD_TAIL) quantile of the half-length
PAD_TAIL = 1e-6


def wrap_angle(phi):
    """Map orientations into [0, pi)."""
    return np.mod(np.asarray(phi, dtype=float), math.pi)


def unit(phi):
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class Line:
    offset: float
    angle: float

    def __post_init__(self):
        x, phi = float(self.offset), float(self.angle)
        # phi -> phi - k pi flips the normal, hence the offset sign, k times
        k = math.floor(phi / math.pi)
        phi -= k * math.pi
        if phi >= math.pi:  # rounding at the upper edge
            phi, k = phi - math.pi, k + 1
        if k % 2:
            x = -x
        object.__setattr__(self, "offset", x)
        object.__setattr__(self, "angle", phi)

    def contains(self, pt, tol=GEOM_TOL) -> bool:
        return abs(pt[0] * math.cos(self.angle) + pt[1] * math.sin(self.angle) - self.offset) <= tol


@dataclass(frozen=True)
class Stick:
    midpoint: tuple
    angle: float
    half_length: float

    def __post_init__(self):
        if not (self.half_length > 0 and math.isfinite(self.half_length)):
            raise ParameterError(f"stick half-length must be positive and finite, got {self.half_length}")
        object.__setattr__(self, "midpoint", (float(self.midpoint[0]), float(self.midpoint[1])))
        object.__setattr__(self, "angle", float(wrap_angle(self.angle)))

    @property
    def gamma(self) -> float:
        return math.hypot(*self.midpoint)

    @property
    def midpoint_angle(self) -> float:
        return math.atan2(self.midpoint[1], self.midpoint[0])

    def endpoints(self):
        u = np.array([math.cos(self.angle), math.sin(self.angle)])
        y = np.array(self.midpoint)
        return y - self.half_length * u, y + self.half_length * u


def _empty(shape=(0,)):
    return np.zeros(shape)


@dataclass(eq=False)
class StreetSystem:
    """Lines and/or sticks of one model realization inside a window disk b(o, window)."""

    model: str
    mu: float
    window: float
    offsets: np.ndarray = field(default_factory=_empty)
    line_angles: np.ndarray = field(default_factory=_empty)
    midpoints: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    stick_angles: np.ndarray = field(default_factory=_empty)
    half_lengths: np.ndarray = field(default_factory=_empty)
    truncated: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    # lilypond contacts: point, stopped stick, blocking stick, stopped endpoint sign
    junction_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    junction_stopped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    junction_blocker: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    junction_side: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    seed: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown street model {self.model!r}")
        self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        self.line_angles = np.asarray(self.line_angles, dtype=float).reshape(-1)
        self.midpoints = np.asarray(self.midpoints, dtype=float).reshape(-1, 2)
        self.stick_angles = wrap_angle(np.asarray(self.stick_angles, dtype=float).reshape(-1))
        self.half_lengths = np.asarray(self.half_lengths, dtype=float).reshape(-1)
        self.truncated = np.asarray(self.truncated, dtype=bool).reshape(-1)
        if self.truncated.size == 0 and self.half_lengths.size:
            self.truncated = np.zeros(self.half_lengths.size, dtype=bool)
        # normalise line angles into [0, pi), flipping offsets where needed
        k = np.floor(self.line_angles / math.pi)
        self.line_angles = self.line_angles - k * math.pi
        edge = self.line_angles >= math.pi
        self.line_angles[edge] -= math.pi
        k[edge] += 1
        self.offsets = np.where(np.mod(k, 2) == 1, -self.offsets, self.offsets)
        if self.offsets.shape != self.line_angles.shape:
            raise ParameterError("line offsets and angles differ in length")
        n = self.midpoints.shape[0]
        if not (self.stick_angles.size == n and self.half_lengths.size == n and self.truncated.size == n):
            raise ParameterError("stick arrays differ in length")
        if np.any(self.half_lengths <= 0):
            raise ParameterError("stick half-lengths must be positive")

    @property
    def n_lines(self) -> int:
        return self.offsets.size

    @property
    def n_sticks(self) -> int:
        return self.half_lengths.size

    def __len__(self):
        return self.n_lines + self.n_sticks

    def lines(self):
        return [Line(x, a) for x, a in zip(self.offsets, self.line_angles)]

    def sticks(self):
        return [Stick(tuple(y), a, h) for y, a, h in zip(self.midpoints, self.stick_angles, self.half_lengths)]

    def segments(self):
        """(centers (n,2), direction angles (n,), half-lengths (n,)); lines first."""
        c_line = self.offsets[:, None] * unit(self.line_angles)
        centers = np.concatenate([c_line, self.midpoints])
        dirs = np.concatenate([self.line_angles + 0.5 * math.pi, self.stick_angles])
        halves = np.concatenate([np.full(self.n_lines, np.inf), self.half_lengths])
        return centers, dirs, halves

    def translated(self, shift) -> "StreetSystem":
        """The system seen from `shift` (shift moved to the origin)."""
        shift = np.asarray(shift, dtype=float)
        off = self.offsets - unit(self.line_angles) @ shift
        return StreetSystem(self.model, self.mu, self.window, off, self.line_angles.copy(),
                            self.midpoints - shift, self.stick_angles.copy(), self.half_lengths.copy(),
                            self.truncated.copy(), self.junction_points - shift,
                            self.junction_stopped.copy(), self.junction_blocker.copy(),
                            self.junction_side.copy(), self.seed)

    def select_sticks(self, mask) -> "StreetSystem":
        mask = np.asarray(mask, dtype=bool)
        idx = np.flatnonzero(mask)
        remap = -np.ones(self.n_sticks, dtype=int)
        remap[idx] = np.arange(idx.size)
        keep = mask[self.junction_stopped] & mask[self.junction_blocker] if self.junction_stopped.size else np.zeros(0, bool)
        return StreetSystem(self.model, self.mu, self.window, self.offsets, self.line_angles,
                            self.midpoints[mask], self.stick_angles[mask], self.half_lengths[mask],
                            self.truncated[mask], self.junction_points[keep],
                            remap[self.junction_stopped[keep]], remap[self.junction_blocker[keep]],
                            self.junction_side[keep], self.seed)


# ---------------------------------------------------------------- sampling

def _check_mu_window(mu, window):
    if not (mu >= 0 and math.isfinite(mu)):
        raise ParameterError(f"street intensity must be non-negative and finite, got {mu}")
    if not (window > 0 and math.isfinite(window)):
        raise ParameterError(f"window radius must be positive and finite, got {window}")


def _sample_lines(model, mu, window, rng, angle_fn):
    _check_mu_window(mu, window)
    n = rng.poisson(2.0 * mu * window)
    offsets = rng.uniform(-window, window, n)
    return StreetSystem(model, mu, window, offsets, angle_fn(n))


def sample_og(mu: float, window: float, rng) -> StreetSystem:
    """Orthogonal grid: Poisson offsets on [-R, R], normal angle 0 or pi/2 with prob. 1/2."""
    return _sample_lines("OG", mu, window, rng, lambda n: 0.5 * math.pi * rng.integers(0, 2, n))


def sample_plp(mu: float, window: float, rng) -> StreetSystem:
    return _sample_lines("PLP", mu, window, rng, lambda n: rng.uniform(0.0, math.pi, n))


def uniform_disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    a = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)


def psp_padding(law: HalfLengthLaw) -> float:
    return float(law.quantile(1.0 - PAD_TAIL))


def sample_psp(mu: float, law: HalfLengthLaw, window: float, rng) -> StreetSystem:
    """Poisson stick process; midpoints on a disk padded by a high half-length quantile.

    Only sticks that meet the window disk are kept.
    """
    _check_mu_window(mu, window)
    if not isinstance(law, HalfLengthLaw) or not (0 < law.mean < math.inf):
        raise ParameterError("half-length law needs a finite positive mean")
    big = window + psp_padding(law)
    n = rng.poisson(mu * math.pi * big * big)
    y = uniform_disk(rng, n, big)
    ang = rng.uniform(0.0, math.pi, n)
    h = law.sample(rng, n)
    keep = segment_origin_distance(y, ang, h) <= window
    return StreetSystem("PSP", mu, window, midpoints=y[keep], stick_angles=ang[keep], half_lengths=h[keep])


def default_t_cap(mu: float) -> float:
    return 10.0 / math.sqrt(mu)


def sample_plm(mu: float, window: float, rng, t_cap: float | None = None) -> StreetSystem:
    """Lilypond model on seeds from a PPP padded by t_cap around the window."""
    _check_mu_window(mu, window)
    if mu == 0:
        return StreetSystem("PLM", mu, window)
    t_cap = default_t_cap(mu) if t_cap is None else float(t_cap)
    big = window + t_cap
    n = rng.poisson(mu * math.pi * big * big)
    y = uniform_disk(rng, n, big)
    ang = rng.uniform(0.0, math.pi, n)
    sys = grow_lilypond(y, ang, t_cap, mu=mu, window=window)
    return sys


# ---------------------------------------------------------------- lilypond

def collision_time(mid_i, angle_i, sign, mid_j, angle_j, h_j=None):
    """Time at which endpoint `sign` of a stick growing from mid_i touches stick j.

    Stick j grows at the same rate from time 0 and is frozen at half-length h_j
    (None: still growing).  Returns None if the endpoint never touches j.
    """
    e_i, e_j = unit(angle_i), unit(angle_j)
    den = float(cross2(e_i, e_j))
    if abs(den) < 1e-15:
        return None
    d = np.asarray(mid_j, dtype=float) - np.asarray(mid_i, dtype=float)
    s = float(cross2(d, e_j)) / den
    t = float(cross2(d, e_i)) / den
    if s * sign <= 0:
        return None
    time = abs(s)
    reach = time if h_j is None else min(time, h_j)
    if abs(t) <= reach + GEOM_TOL:
        return time
    return None


def _pair_events(y, e, i, j):
    """Crossing events for candidate pairs: (time, stopped, blocker, sign, |tau_blocker|)."""
    den = cross2(e[i], e[j])
    ok = np.abs(den) > 1e-15
    i, j, den = i[ok], j[ok], den[ok]
    d = y[j] - y[i]
    ti = cross2(d, e[j]) / den
    tj = cross2(d, e[i]) / den
    ai, aj = np.abs(ti), np.abs(tj)
    # the later arrival is stopped; exact ties stop the lower index
    i_stops = (ai > aj) | ((ai == aj) & (i < j))
    T = np.where(i_stops, ai, aj)
    stopped = np.where(i_stops, i, j)
    blocker = np.where(i_stops, j, i)
    sign = np.where(i_stops, np.sign(ti), np.sign(tj)).astype(int)
    tb = np.where(i_stops, aj, ai)
    return T, stopped, blocker, sign, tb


def _sweep(events, h, frozen, junctions):
    T, stopped, blocker, sign, tb = events
    order = np.lexsort((sign, stopped, T))
    for k in order:
        s = stopped[k]
        if frozen[s]:
            continue
        b = blocker[k]
        if frozen[b] and h[b] < tb[k] - GEOM_TOL:
            continue
        frozen[s] = True
        h[s] = T[k]
        junctions.append((s, b, sign[k]))


def grow_lilypond(midpoints, angles, t_cap: float, mu: float | None = None,
                  window: float | None = None) -> StreetSystem:
    """Exact lilypond growth.

    Every pair of non-parallel sticks meets at most once, where their support
    lines cross: stick i reaches that point at |tau_i|, stick j at |tau_j|,
    and the later of the two is stopped there provided the earlier one has
    not frozen short of it.  Processing the pair events in time order
    therefore reproduces the continuous dynamics exactly.  Sticks that are
    not stopped by t_cap keep half-length t_cap and are flagged truncated.
    """
    y = np.asarray(midpoints, dtype=float).reshape(-1, 2)
    ang = wrap_angle(np.asarray(angles, dtype=float).reshape(-1))
    n = y.shape[0]
    if not (t_cap > 0 and math.isfinite(t_cap)):
        raise ParameterError("t_cap must be positive and finite")
    if ang.size != n:
        raise ParameterError("one orientation per seed required")
    mu_eff = float(mu) if mu is not None else 0.0
    win = float(window) if window is not None else (float(np.max(np.hypot(*y.T))) if n else 1.0)
    if n == 0:
        return StreetSystem("PLM", mu_eff, win)
    tree = cKDTree(y)
    if tree.query_pairs(0.0, output_type="ndarray").size:
        raise DegenerateInputError("duplicate seed locations")

    e = unit(ang)
    h = np.full(n, float(t_cap))
    frozen = np.zeros(n, dtype=bool)
    junctions: list = []

    # phase 1: short events among close pairs
    if mu:
        t_search = 3.0 / math.sqrt(mu)
    else:
        span = np.ptp(y, axis=0)
        t_search = 3.0 * math.sqrt(max(span[0] * span[1], 1e-12) / n)
    t_search = min(t_search, t_cap) if n > 50 else t_cap
    pairs = tree.query_pairs(2.0 * t_search, output_type="ndarray")
    if pairs.size:
        ev = _pair_events(y, e, pairs[:, 0], pairs[:, 1])
        keep = ev[0] <= t_search
        _sweep(tuple(a[keep] for a in ev), h, frozen, junctions)

    # phase 2: remaining events of sticks still growing after t_search
    if t_search < t_cap and not frozen.all():
        live = np.flatnonzero(~frozen)
        nb = tree.query_ball_point(y[live], 2.0 * t_cap)
        ii = np.concatenate([np.full(len(v), a) for a, v in zip(live, nb)]) if len(live) else np.zeros(0, int)
        jj = np.concatenate([np.asarray(v, dtype=int) for v in nb]) if len(live) else np.zeros(0, int)
        m = ii != jj
        ii, jj = ii[m], jj[m]
        # a live-live pair appears twice; keep one copy
        dup = ~frozen[jj] & (jj < ii)
        ii, jj = ii[~dup], jj[~dup]
        if ii.size:
            ev = _pair_events(y, e, ii, jj)
            keep = (ev[0] > t_search) & (ev[0] <= t_cap) & ~frozen[ev[1]]
            _sweep(tuple(a[keep] for a in ev), h, frozen, junctions)

    if junctions:
        js = np.array(junctions, dtype=int)
        stopped, blocker, side = js[:, 0], js[:, 1], js[:, 2]
        pts = y[stopped] + (side * h[stopped])[:, None] * e[stopped]
    else:
        stopped = blocker = side = np.zeros(0, dtype=int)
        pts = np.zeros((0, 2))
    return StreetSystem("PLM", mu_eff, win, midpoints=y, stick_angles=ang, half_lengths=h,
                        truncated=~frozen, junction_points=pts, junction_stopped=stopped,
                        junction_blocker=blocker, junction_side=side)


# ---------------------------------------------------------------- disks

def disk_chord_length(gamma, mid_angle, orientation, h, r):
    """Length of stick (midpoint at polar (gamma, mid_angle)) inside b(o, r).

    Solves gamma^2 + u^2 + 2 gamma u cos(mid_angle - orientation) = r^2 for the
    positions u of the circle crossings along the stick.
    """
    gamma, psi = np.asarray(gamma, dtype=float), np.asarray(mid_angle, dtype=float) - np.asarray(orientation, dtype=float)
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    disc = r * r - (gamma * np.sin(psi)) ** 2
    root = np.sqrt(np.maximum(disc, 0.0))
    b = -gamma * np.cos(psi)
    u1, u2 = np.abs(b + root), np.abs(b - root)
    m1, m2 = np.minimum(u1, h), np.minimum(u2, h)
    inside = gamma <= r
    out = np.where(inside, m1 + m2, np.where(disc >= 0, np.abs(m1 - m2), 0.0))
    return out if out.ndim else float(out)


def line_disk_chord(offset, r):
    offset = np.abs(np.asarray(offset, dtype=float))
    out = np.where(offset <= r, 2.0 * np.sqrt(np.maximum(r * r - offset * offset, 0.0)), 0.0)
    return out if out.ndim else float(out)


def segment_disk_interval(centers, dirs, halves, r, center=(0.0, 0.0)):
    """Parameter interval [lo, hi] of each segment inside the disk (lo > hi when empty)."""
    c = np.asarray(centers, dtype=float).reshape(-1, 2) - np.asarray(center, dtype=float)
    e = unit(dirs).reshape(-1, 2)
    halves = np.asarray(halves, dtype=float).reshape(-1)
    proj = np.einsum("ij,ij->i", c, e)
    d2 = np.einsum("ij,ij->i", c, c) - proj * proj
    w = np.sqrt(np.maximum(r * r - d2, 0.0))
    lo = np.maximum(-proj - w, -halves)
    hi = np.minimum(-proj + w, halves)
    empty = d2 > r * r
    lo = np.where(empty, 1.0, lo)
    hi = np.where(empty, 0.0, hi)
    return lo, hi


def segment_origin_distance(mid, angles, halves):
    mid = np.asarray(mid, dtype=float).reshape(-1, 2)
    e = unit(angles).reshape(-1, 2)
    t = np.clip(-np.einsum("ij,ij->i", mid, e), -halves, halves)
    p = mid + t[:, None] * e
    return np.hypot(p[:, 0], p[:, 1])


def total_length_in(system: StreetSystem, r: float, center=(0.0, 0.0)) -> float:
    if len(system) == 0:
        return 0.0
    lo, hi = segment_disk_interval(*system.segments(), r, center)
    return float(np.sum(np.maximum(hi - lo, 0.0)))


# ---------------------------------------------------------------- orders

@dataclass
class JunctionSet:
    order1: np.ndarray
    order3: np.ndarray
    order4: np.ndarray
    length: float

    def counts(self) -> dict:
        return {1: len(self.order1), 3: len(self.order3), 4: len(self.order4)}


def _candidate_pairs(centers, halves):
    n = centers.shape[0]
    finite = np.isfinite(halves)
    idx_f = np.flatnonzero(finite)
    idx_l = np.flatnonzero(~finite)
    parts = []
    if idx_f.size > 1:
        tree = cKDTree(centers[idx_f])
        pr = tree.query_pairs(2.0 * float(halves[idx_f].max()) + GEOM_TOL, output_type="ndarray")
        if pr.size:
            a, b = idx_f[pr[:, 0]], idx_f[pr[:, 1]]
            close = np.hypot(*(centers[a] - centers[b]).T) <= halves[a] + halves[b] + GEOM_TOL
            parts.append(np.stack([a[close], b[close]], axis=1))
    if idx_l.size:
        a, b = np.meshgrid(idx_l, np.arange(n), indexing="ij")
        a, b = a.ravel(), b.ravel()
        m = (b != a) & ~((~finite[b]) & (b < a))
        parts.append(np.stack([a[m], b[m]], axis=1))
    return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=int)


def decompose(system: StreetSystem, r: float | None = None) -> JunctionSet:
    """Points of order 1, 3, 4 inside b(o, r) and the order-2 length.

    Order 4: two streets crossing in the interior of both; order 3: an
    endpoint resting on the interior of another street; order 1: the
    remaining stick endpoints.
    """
    r = system.window if r is None else r
    centers, dirs, halves = system.segments()
    e = unit(dirs).reshape(-1, 2)
    pairs = _candidate_pairs(centers, halves)
    o3, o4 = [], []
    resting = set()
    if pairs.size:
        i, j = pairs[:, 0], pairs[:, 1]
        den = cross2(e[i], e[j])
        ok = np.abs(den) > 1e-15
        i, j, den = i[ok], j[ok], den[ok]
        d = centers[j] - centers[i]
        s = cross2(d, e[j]) / den
        t = cross2(d, e[i]) / den
        hi_, hj_ = halves[i], halves[j]
        in_i = np.abs(s) < hi_ - GEOM_TOL
        in_j = np.abs(t) < hj_ - GEOM_TOL
        at_i = np.abs(np.abs(s) - hi_) <= GEOM_TOL
        at_j = np.abs(np.abs(t) - hj_) <= GEOM_TOL
        pts = centers[i] + s[:, None] * e[i]
        x4 = in_i & in_j
        o4 = pts[x4]
        for mask, who, par in ((at_i & in_j, i, s), (at_j & in_i, j, t)):
            o3.append(pts[mask])
            for a, sv in zip(who[mask], par[mask]):
                resting.add((int(a), int(np.sign(sv))))
    o3 = np.concatenate(o3) if o3 else np.zeros((0, 2))
    o4 = np.asarray(o4).reshape(-1, 2)
    # free endpoints of sticks
    nl = system.n_lines
    ends = []
    for k in range(system.n_sticks):
        for sg in (-1, 1):
            if (nl + k, sg) not in resting:
                ends.append(centers[nl + k] + sg * halves[nl + k] * e[nl + k])
    o1 = np.asarray(ends).reshape(-1, 2)

    def inside(p):
        return p[np.hypot(p[:, 0], p[:, 1]) <= r] if p.size else p.reshape(-1, 2)

    return JunctionSet(inside(o1), inside(o3), inside(o4), total_length_in(system, r))


def count_crossings(system: StreetSystem) -> int:
    """Number of transversal interior crossings among all streets (no window)."""
    big = np.inf
    return len(decompose(system, big).order4)


# ---------------------------------------------------------------- file format

COLUMNS = "kind,x|y.x,y.y,angle,halflen"


def _f(x):
    return repr(float(x))


def write_streets(system: StreetSystem, fh=None) -> str:
    buf = io.StringIO()
    seed = "" if system.seed is None else str(system.seed)
    buf.write(f"model={system.model},mu={_f(system.mu)},window={_f(system.window)},seed={seed}\n")
    buf.write(COLUMNS + "\n")
    for x, a in zip(system.offsets, system.line_angles):
        buf.write(f"line,{_f(x)},,{_f(a)},\n")
    for y, a, h, tr in zip(system.midpoints, system.stick_angles, system.half_lengths, system.truncated):
        kind = "stick-truncated" if tr else "stick"
        buf.write(f"{kind},{_f(y[0])},{_f(y[1])},{_f(a)},{_f(h)}\n")
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_streets(text: str) -> StreetSystem:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[1].strip() != COLUMNS:
        raise ParameterError("street file needs a header line and the column line")
    head = dict(kv.split("=", 1) for kv in lines[0].split(","))
    seed = int(head["seed"]) if head.get("seed") else None
    off, la, mid, sa, hl, tr = [], [], [], [], [], []
    for ln in lines[2:]:
        kind, a, b, ang, h = ln.split(",")
        if kind == "line":
            off.append(float(a))
            la.append(float(ang))
        elif kind in ("stick", "stick-truncated"):
            mid.append((float(a), float(b)))
            sa.append(float(ang))
            hl.append(float(h))
            tr.append(kind == "stick-truncated")
        else:
            raise ParameterError(f"unknown street record kind {kind!r}")
    return StreetSystem(head["model"], float(head["mu"]), float(head["window"]), off, la,
                        np.array(mid).reshape(-1, 2), sa, hl, np.array(tr, dtype=bool), seed=seed)
