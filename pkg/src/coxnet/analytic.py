"""Quadrature evaluation of success probabilities and nearest-neighbour laws.

Notation: s = theta D^alpha, rho = s^(1/alpha) = D theta^(1/alpha), delta = 2/alpha.
Distances are measured in units of rho inside the interference integrals, so a
vehicle at distance t from the origin contributes 1 / (1 + (t/rho)^alpha) to
the Laplace exponent after fading is averaged out.

Reusable one-dimensional kernels:

    G(t)    = int_0^t dv / (1 + v^alpha)                 (closed form, betainc)
    J(t, b) = int_0^t dw / (1 + (w^2 + b^2)^(alpha/2))   (tabulated per alpha)

G handles collinear interferers (own streets), J a stick seen from a point
at perpendicular distance b (background sticks).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .curves import SirCurve
from .errors import IntegrationError, ParameterError, UnsupportedOrderError
from .geometry import disk_chord_length
from .laws import DeterministicLaw, HalfLengthLaw, RayleighLaw
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, QuadResult, composite_rule,
                         gauss_legendre, integrate_scalar, integrate_vector)

# relative size of a fixed-rule error budget beyond which results are rejected
FIXED_RULE_REJECT = 1e-4


def _check_alpha(alpha, d=2):
    if not (alpha > d and math.isfinite(alpha)):
        raise ParameterError(f"path-loss exponent must exceed {d}, got {alpha}")


def _check_theta(theta):
    if not (theta > 0 and math.isfinite(theta)):
        raise ParameterError(f"SIR threshold must be positive and finite, got {theta}")


def _check_rate(name, x):
    if not (x >= 0 and math.isfinite(x)):
        raise ParameterError(f"{name} must be non-negative and finite, got {x}")


def _out(value, err, full):
    value = min(max(float(value), 0.0), 1.0)
    return QuadResult(value, float(err)) if full else value


# ---------------------------------------------------------------- closed forms

def gamma_product(x: float) -> float:
    """Gamma(1+x) Gamma(1-x) = pi x / sin(pi x) for 0 < x < 1."""
    if not 0.0 < x < 1.0:
        raise ParameterError(f"gamma_product needs 0 < x < 1, got {x}")
    return math.pi * x / math.sin(math.pi * x)


def ppp_success(d: int, lam_d: float, D: float, alpha: float, theta):
    """Success probability in a d-dimensional PPP of transmitters (Rayleigh fading)."""
    if d not in (1, 2):
        raise ParameterError("PPP dimension must be 1 or 2")
    _check_alpha(alpha, d)
    _check_rate("PPP intensity", lam_d)
    dp = d / alpha
    c = 2.0 if d == 1 else math.pi
    th = np.asarray(theta, dtype=float)
    out = np.exp(-c * lam_d * D ** d * th ** dp * gamma_product(dp))
    return float(out) if out.ndim == 0 else out


def G_line(t, alpha: float):
    """int_0^t dv / (1 + v^alpha) for t >= 0 (vectorised, exact)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore"):
        ta = np.power(t, alpha)
        x = np.where(np.isinf(t), 1.0, ta / (1.0 + ta))
    full = (math.pi / alpha) / math.sin(math.pi / alpha)
    return full * special.betainc(1.0 / alpha, 1.0 - 1.0 / alpha, x)


# ---------------------------------------------------------------- line models

def _line_kernel_integral(vx: float, alpha: float, spec: QuadratureSpec) -> QuadResult:
    # int_{vx}^inf dv / ((1 + v^(1/delta)) sqrt(v - vx)) with v = vx + w^2
    a2 = 0.5 * alpha
    return integrate_scalar(lambda w: 2.0 / (1.0 + (vx + w * w) ** a2), 0.0, math.inf, spec)


def laplace_line(s: float, x: float, lam_p: float, alpha: float,
                 spec: QuadratureSpec = DEFAULT_SPEC, full_output: bool = False):
    """Laplace transform at s of the interference from one line at distance x."""
    _check_alpha(alpha)
    _check_rate("lambda p", lam_p)
    if not s > 0:
        raise ParameterError("Laplace argument must be positive")
    if lam_p == 0 or math.isinf(x):
        return _out(1.0, 0.0, full_output)
    delta = 2.0 / alpha
    vx = x * x / s ** delta
    val, err = _line_kernel_integral(vx, alpha, spec)
    pref = lam_p * s ** (delta / 2.0)
    out = math.exp(-pref * val)
    return _out(out, out * pref * err, full_output)


def _own_line_exponent(m, lam_p, D, alpha, theta):
    delta = 2.0 / alpha
    return m * lam_p * D * theta ** (delta / 2.0) * gamma_product(delta / 2.0)


def og_plp_success(m: int, mu: float, lam_p: float, D: float, alpha: float, theta: float,
                   spec: QuadratureSpec = DEFAULT_SPEC, full_output: bool = False):
    """Success probability of the typical vehicle of order m in the OG or the PLP.

    Both line models share this single formula.
    """
    if m not in (2, 4):
        raise UnsupportedOrderError(f"line models have orders 2 and 4, got {m}")
    _check_alpha(alpha)
    _check_theta(theta)
    _check_rate("mu", mu)
    _check_rate("lambda p", lam_p)
    own = _own_line_exponent(m, lam_p, D, alpha, theta)
    if mu == 0 or lam_p == 0:
        return _out(math.exp(-own), 0.0, full_output)
    s = theta * D ** alpha
    rho = s ** (1.0 / alpha)
    inner = spec.inner()
    c = lam_p * rho

    # x = rho xi; per-line exponent is c * F(xi) with F the kernel integral at v_x = xi^2
    def f(xi):
        F = _line_kernel_integral(xi * xi, alpha, inner).value
        return -math.expm1(-c * F)

    val, err = integrate_scalar(f, 0.0, math.inf, spec, points=[1.0])
    bg = 2.0 * mu * rho * val
    expo = own + bg
    budget = 2.0 * mu * rho * err + inner.rtol * bg
    out = math.exp(-expo)
    return _out(out, out * budget, full_output)


def nn_cdf_og_plp(r: float, m: int, mu: float, lam: float,
                  spec: QuadratureSpec = DEFAULT_SPEC, full_output: bool = False):
    """Nearest-neighbour distance CDF of the typical vehicle in the OG/PLP."""
    if m not in (2, 4):
        raise UnsupportedOrderError(f"line models have orders 2 and 4, got {m}")
    _check_rate("mu", mu)
    _check_rate("lambda", lam)
    if r < 0:
        raise ParameterError("distance must be non-negative")
    if r == 0:
        return _out(0.0, 0.0, full_output)
    # u = r sin(w) removes the square-root endpoint
    f = lambda w: -math.expm1(-2.0 * lam * r * math.cos(w)) * math.cos(w)
    val, err = integrate_scalar(f, 0.0, 0.5 * math.pi, spec)
    expo = m * lam * r + 2.0 * mu * r * val
    surv = math.exp(-expo)
    return _out(1.0 - surv, surv * 2.0 * mu * r * err, full_output)


# ---------------------------------------------------------------- PSP nearest neighbour

def own_stick_void(h, r, lam):
    """(1/h) int_0^h exp(-lam [min(h+g, r) + min(h-g, r)]) dg, exactly (vectorised in h)."""
    h = np.asarray(h, dtype=float)
    out = np.zeros_like(h)
    cuts = np.stack([np.zeros_like(h), np.clip(r - h, 0, h), np.clip(h - r, 0, h), h], axis=-1)
    cuts = np.sort(cuts, axis=-1)
    for k in range(3):
        a, b = cuts[..., k], cuts[..., k + 1]
        mid = 0.5 * (a + b)
        e_mid = np.minimum(h + mid, r) + np.minimum(h - mid, r)
        slope = (np.where(h + mid < r, 1.0, 0.0) - np.where(h - mid < r, 1.0, 0.0))
        # exponent lam * (e_mid + slope (g - mid)) is linear on the piece
        c = lam * slope
        w = b - a
        with np.errstate(divide="ignore", invalid="ignore"):
            piece = np.where(np.abs(c * w) > 1e-12,
                             np.exp(-lam * e_mid) * 2.0 * np.sinh(0.5 * c * w) / np.where(c == 0, 1.0, c),
                             np.exp(-lam * e_mid) * w)
        out += np.where(w > 0, piece, 0.0)
    return out / h


def _stick_frame_a_integral(h, c, lam):
    """int_R (1 - exp(-lam |[-h,h] cap [a-c, a+c]|)) da, closed form."""
    m = np.minimum(h, c)
    q = -np.expm1(-2.0 * lam * m)
    if lam == 0:
        return np.zeros_like(m)
    return 2.0 * np.abs(c - h) * q + 2.0 * (2.0 * m - q / lam)


def psp_background_void_exponent(r, lam, h, order=24):
    """V(h, r) = int_{R^2} (1 - exp(-lam |stick cap b(y, r)|)) dy, via b = r sin(w).

    Returns (values, error estimate) with values shaped like h.
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))

    def rule(n):
        x, w = gauss_legendre(n)
        # split at the kink c = h, i.e. w* = arccos(h / r)
        wstar = np.arccos(np.clip(h / r, 0.0, 1.0))
        total = np.zeros_like(h)
        for lo, hi in ((np.zeros_like(h), wstar), (wstar, np.full_like(h, 0.5 * math.pi))):
            om = 0.5 * (hi - lo)[:, None] * x + 0.5 * (hi + lo)[:, None]
            wt = 0.5 * (hi - lo)[:, None] * w
            c = r * np.cos(om)
            total += np.sum(wt * _stick_frame_a_integral(h[:, None], c, lam) * np.cos(om), axis=1)
        return 2.0 * r * total

    hi_ = rule(order)
    lo_ = rule(order // 2 + 4)
    return hi_, np.abs(hi_ - lo_)


def nn_cdf_psp(r: float, m: int, mu: float, lam: float, law: HalfLengthLaw,
               order: int = 12, full_output: bool = False):
    """Nearest-neighbour distance CDF of the typical vehicle in the PSP.

    Own sticks: length-biased half-length, origin uniform along the stick.
    Background: exp(-mu E_H V(H, r)) with the disk/stick overlap integrated in
    the stick frame.
    """
    if m not in (2, 4):
        raise UnsupportedOrderError(f"PSP orders are 2 and 4, got {m}")
    _check_rate("mu", mu)
    _check_rate("lambda", lam)
    if r < 0:
        raise ParameterError("distance must be non-negative")
    if r == 0:
        return _out(0.0, 0.0, full_output)
    hb, wb = law.nodes(order, biased=True)
    own = float(np.sum(wb * own_stick_void(hb, r, lam)))
    own_err = 0.0
    if not isinstance(law, DeterministicLaw):
        hb2, wb2 = law.nodes(order - 4, biased=True)
        own_err = abs(own - float(np.sum(wb2 * own_stick_void(hb2, r, lam))))
    h, w = law.nodes(order)
    V, verr = psp_background_void_exponent(r, lam, h)
    bg = mu * float(np.sum(w * V))
    bg_err = mu * float(np.sum(w * verr))
    if not isinstance(law, DeterministicLaw):
        h2, w2 = law.nodes(order - 4)
        bg_err += abs(bg - mu * float(np.sum(w2 * psp_background_void_exponent(r, lam, h2)[0])))
    k = m // 2
    surv = own ** k * math.exp(-bg)
    err = surv * (k * own_err / max(own, 1e-300) + bg_err)
    if err > FIXED_RULE_REJECT * max(surv, 1e-12) + 1e-10:
        raise IntegrationError("PSP nearest-neighbour quadrature budget exceeded", 1.0 - surv, err)
    return _out(1.0 - surv, err, full_output)


def nn_cdf_psp_polar(r: float, m: int, mu: float, lam: float, law: HalfLengthLaw,
                     spec: QuadratureSpec = QuadratureSpec(rtol=1e-5, atol=1e-9)) -> float:
    """Slow reference: background integral in midpoint polar coordinates with chord lengths."""
    hb, wb = law.nodes(8, biased=True)
    own = float(np.sum(wb * np.array([
        integrate_scalar(lambda g: math.exp(-lam * disk_chord_length(g, 0.0, 0.0, h, r)), 0.0, h,
                         spec.inner(), points=[abs(r - h)]).value / h for h in hb])))
    h_n, w_n = law.nodes(8)
    inner = spec.inner()

    def per_h(h):
        def over_psi(psi):
            f = lambda g: -math.expm1(-lam * disk_chord_length(g, psi, 0.0, h, r)) * g
            return integrate_scalar(f, 0.0, r + h, inner, points=[abs(r - h), r]).value
        return 2.0 * integrate_scalar(over_psi, 0.0, math.pi, spec, points=[0.5 * math.pi]).value

    bg = mu * float(np.sum(w_n * np.array([per_h(h) for h in h_n])))
    return 1.0 - own ** (m // 2) * math.exp(-bg)


# ---------------------------------------------------------------- PSP interference

def laplace_io_psp(s: float, m: int, lam_p: float, law: HalfLengthLaw, alpha: float,
                   spec: QuadratureSpec = DEFAULT_SPEC, order: int = 8, full_output: bool = False):
    """Laplace transform of the interference from the typical vehicle's own sticks."""
    if m not in (2, 4):
        raise UnsupportedOrderError(f"PSP orders are 2 and 4, got {m}")
    _check_alpha(alpha)
    _check_rate("lambda p", lam_p)
    if not s > 0:
        raise ParameterError("Laplace argument must be positive")
    if lam_p == 0:
        return _out(1.0, 0.0, full_output)
    rho = s ** (1.0 / alpha)
    c = lam_p * rho

    def avg(h):
        # (1/h) int_0^h exp(-c [G(e/rho) + G((2h-e)/rho)]) de, e = rho x, split at x = 50
        eta = np.asarray(h, dtype=float) / rho
        split = np.minimum(eta, 50.0)

        def f1(u):
            x = split * u
            return split * np.exp(-c * (G_line(x, alpha) + G_line(2 * eta - x, alpha)))

        def f2(u):
            x = split + (eta - split) * u
            return (eta - split) * np.exp(-c * (G_line(x, alpha) + G_line(2 * eta - x, alpha)))

        v1, e1 = integrate_vector(f1, 0.0, 1.0, spec.inner())
        v2, e2 = integrate_vector(f2, 0.0, 1.0, spec.inner())
        return (v1 + v2) / eta, (e1 + e2) / eta

    hb, wb = law.nodes(order, biased=True)
    vals, errs = avg(hb)
    one = float(np.sum(wb * vals))
    err = float(np.sum(wb * errs))
    if not isinstance(law, DeterministicLaw):
        hb2, wb2 = law.nodes(order + 4, biased=True)
        v2, _ = avg(hb2)
        err += abs(one - float(np.sum(wb2 * v2)))
        one = float(np.sum(wb2 * v2))
    k = m // 2
    out = one ** k
    return _out(out, k * one ** (k - 1) * err, full_output)


class _JTable:
    """J(t, b) on fixed b nodes: cumulative Gauss-Legendre on phi = arctan(t / s_b),
    cubic Hermite between panel edges using the exact derivative."""

    PANELS = 2048

    def __init__(self, alpha: float, b_nodes: np.ndarray):
        self.alpha = alpha
        self.b = np.asarray(b_nodes, dtype=float)
        self.scale = np.maximum(1.0, self.b)
        K = self.PANELS
        self.dphi = 0.5 * math.pi / K
        edges = np.linspace(0.0, 0.5 * math.pi, K + 1)
        x, w = gauss_legendre(8)
        phis = (edges[:-1, None] + 0.5 * self.dphi * (x + 1.0)).ravel()
        g = self._dJdphi(phis[None, :])
        panel = (g.reshape(self.b.size, K, 8) * (0.5 * self.dphi * w)).sum(axis=2)
        self.J = np.concatenate([np.zeros((self.b.size, 1)), np.cumsum(panel, axis=1)], axis=1)
        self.dJ = self._dJdphi(edges[None, :]) * self.dphi
        self.dJ[:, -1] = 0.0  # derivative vanishes at phi = pi/2 since alpha > 2

    def _dJdphi(self, phi):
        sb = self.scale[:, None]
        bb = self.b[:, None]
        with np.errstate(over="ignore", invalid="ignore"):
            t = sb * np.tan(phi)
            sec2 = 1.0 + np.tan(phi) ** 2
            out = sb * sec2 / (1.0 + (t * t + bb * bb) ** (0.5 * self.alpha))
        return np.nan_to_num(out, nan=0.0, posinf=0.0)

    def full(self):
        return self.J[:, -1]

    def __call__(self, t, bi):
        """J at arguments t (any sign) for b-node indices bi (broadcastable)."""
        sgn = np.sign(t)
        phi = np.arctan(np.abs(t) / self.scale[bi])
        u = phi / self.dphi
        i = np.minimum(u.astype(np.int64), self.PANELS - 1)
        u = u - i
        J0, J1 = self.J[bi, i], self.J[bi, i + 1]
        d0, d1 = self.dJ[bi, i], self.dJ[bi, i + 1]
        u2 = u * u
        u3 = u2 * u
        val = (2 * u3 - 3 * u2 + 1) * J0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * J1 + (u3 - u2) * d1
        return sgn * val


def _box_side(eta: float) -> int:
    """log2 of the box half-side L >= max(8, 3 eta) used for the near field."""
    return int(math.ceil(math.log2(max(8.0, 3.0 * eta))))


def _b_global_edges(kmax):
    return np.concatenate([[0.0, 0.25, 0.5], 2.0 ** np.arange(0, kmax + 1)])


@lru_cache(maxsize=64)
def _b_setup(alpha: float, kmax: int, order: int):
    b, wb = composite_rule(_b_global_edges(kmax), order)
    return b, wb, _JTable(alpha, b)


def _a_edges(eta, L):
    """Panels on [0, L] refined geometrically toward the stick end a = eta."""
    edges = {0.0, eta, L}
    j = -2
    while 2.0 ** j < eta:
        edges.add(eta - 2.0 ** j)
        j += 1
    j = -2
    while eta + 2.0 ** j < L:
        edges.add(eta + 2.0 ** j)
        j += 1
    return np.array(sorted(edges))


def _far_field(eta, c, alpha, L, n=16):
    """Integral of 1 - exp(-c K) over the quadrant outside [0, L]^2, in polar form.

    Points there are at least 2 eta from the stick, so K is integrated directly
    along the stick with a fixed Gauss-Legendre rule.
    """
    x, w = gauss_legendre(n)
    phi = np.concatenate([(x + 1.0) * math.pi / 8.0, (x + 3.0) * math.pi / 8.0])
    wphi = np.concatenate([w, w]) * math.pi / 8.0
    rmin = L / np.maximum(np.cos(phi), np.sin(phi))
    # R = rmin u^-k makes R^(1-alpha) dR proportional to u du
    k = 2.0 / (alpha - 2.0)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    R = rmin[:, None] * u[None, :] ** (-k)
    dR = k * R / u[None, :]
    a = R * np.cos(phi)[:, None]
    b = R * np.sin(phi)[:, None]
    ws = eta * x
    d2 = (a[..., None] - ws) ** 2 + (b * b)[..., None]
    K = eta * np.sum(w / (1.0 + d2 ** (0.5 * alpha)), axis=-1)
    F = -np.expm1(-c * K)
    return float(np.sum(wphi[:, None] * wu[None, :] * F * R * dR))


def stick_area_functional(eta, c: float, alpha: float, order: int = 8, eta_max: float | None = None):
    """A(eta) = int_{R^2} (1 - exp(-c K(a, b))) da db for a stick of half-length eta
    (in units of rho), K(a, b) = J(a + eta, b) - J(a - eta, b).

    Near field [0, L]^2: tensor Gauss-Legendre with the tabulated J on fixed b
    nodes; far field: polar rule with K integrated directly.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    emax = float(eta.max()) if eta_max is None else max(eta_max, float(eta.max()))
    kmax = _box_side(emax)
    b_all, wb_all, table = _b_setup(float(alpha), kmax, order)
    out = np.empty_like(eta)
    for n, e in enumerate(eta):
        j = _box_side(e)
        L = 2.0 ** j
        nb = (3 + j) * order  # panels [0,.25,.5,1,...,2^j]
        bi = np.arange(nb)[:, None]
        a, wa = composite_rule(_a_edges(e, L), order)
        K = table(a[None, :] + e, bi) - table(a[None, :] - e, bi)
        F = -np.expm1(-c * K)
        out[n] = 4.0 * (float(wb_all[:nb] @ F @ wa) + _far_field(e, c, alpha, L))
    return out


def laplace_ir_psp(s: float, mu: float, lam_p: float, law: HalfLengthLaw, alpha: float,
                   order: int = 8, full_output: bool = False):
    """Laplace transform of the interference from all sticks not through the origin."""
    _check_alpha(alpha)
    _check_rate("mu", mu)
    _check_rate("lambda p", lam_p)
    if not s > 0:
        raise ParameterError("Laplace argument must be positive")
    if mu == 0 or lam_p == 0:
        return _out(1.0, 0.0, full_output)
    rho = s ** (1.0 / alpha)
    c = lam_p * rho
    h, w = law.nodes(order)
    eta_max = float(law.support()[1]) / rho
    A = stick_area_functional(h / rho, c, alpha, order, eta_max)
    A_lo = stick_area_functional(h / rho, c, alpha, order - 2, eta_max)
    expo = mu * rho * rho * float(np.sum(w * A))
    err = mu * rho * rho * float(np.sum(w * np.abs(A - A_lo)))
    if not isinstance(law, DeterministicLaw):
        h2, w2 = law.nodes(order + 4)
        A2 = stick_area_functional(h2 / rho, c, alpha, order, eta_max)
        expo2 = mu * rho * rho * float(np.sum(w2 * A2))
        err += abs(expo2 - expo)
        expo = expo2
    if err > FIXED_RULE_REJECT * max(1.0, expo):
        raise IntegrationError("background interference quadrature budget exceeded", math.exp(-expo), err)
    out = math.exp(-expo)
    return _out(out, out * err, full_output)


def psp_success(m: int, mu: float, lam_p: float, D: float, alpha: float, theta: float,
                law: HalfLengthLaw, full_output: bool = False):
    _check_theta(theta)
    s = theta * D ** alpha
    lo, elo = laplace_io_psp(s, m, lam_p, law, alpha, full_output=True)
    lr, elr = laplace_ir_psp(s, mu, lam_p, law, alpha, full_output=True)
    return _out(lo * lr, lo * elr + lr * elo, full_output)


def plm_success_general(mu, lam_p, D, alpha, theta, b, full_output=False):
    """Lilypond approximation: PSP order 2 with the fitted Rayleigh law."""
    return psp_success(2, mu, lam_p, D, alpha, theta, RayleighLaw(b), full_output)


def tjunction_factor(lam_p, D, alpha, theta, law: HalfLengthLaw, order: int = 12):
    """E over the unbiased half-length of exp(-lam_p rho G(2H / rho)): the ending street."""
    rho = D * theta ** (1.0 / alpha)
    f = lambda h: np.exp(-lam_p * rho * G_line(2.0 * h / rho, alpha))
    v = law.expect(f, order=order)
    err = 0.0 if isinstance(law, DeterministicLaw) else abs(v - law.expect(f, order=order - 4))
    return v, err


def plm_success_tjunction(mu, lam_p, D, alpha, theta, b, full_output=False):
    gen, egen = plm_success_general(mu, lam_p, D, alpha, theta, b, full_output=True)
    f, ef = tjunction_factor(lam_p, D, alpha, theta, RayleighLaw(b))
    return _out(gen * f, gen * ef + f * egen, full_output)


# ---------------------------------------------------------------- asymptotics

def low_theta_exponent(m: int, alpha: float) -> float:
    """Claimed exponent of the outage 1 - p_m as theta -> 0 for the PSP."""
    if m not in (2, 4):
        raise UnsupportedOrderError(f"PSP orders are 2 and 4, got {m}")
    _check_alpha(alpha)
    return (2.0 / alpha) * m / 4.0


def high_theta_asymptote(theta, mu: float, lam: float, p: float, D: float, alpha: float,
                         law: HalfLengthLaw):
    """2-D PPP success with transmitter intensity 2 mu lam p E[H]."""
    return ppp_success(2, 2.0 * mu * lam * p * law.mean, D, alpha, theta)


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


# ---------------------------------------------------------------- curves

def analytic_curve(fn, thetas, label: str = "", **meta) -> SirCurve:
    """Evaluate fn(theta, full_output=True) on a grid into an analytic SirCurve."""
    vals, errs = [], []
    for th in np.asarray(thetas, dtype=float):
        v, e = fn(float(th), full_output=True)
        vals.append(v)
        errs.append(e)
    return SirCurve(np.asarray(thetas, dtype=float), np.array(vals), np.array(errs),
                    kind="analytic", label=label, meta=dict(meta))


def og_plp_curve(m, mu, lam_p, D, alpha, thetas, label="OG/PLP"):
    return analytic_curve(lambda t, full_output: og_plp_success(m, mu, lam_p, D, alpha, t, full_output=full_output),
                          thetas, label)


def psp_curve(m, mu, lam_p, D, alpha, thetas, law, label="PSP"):
    return analytic_curve(lambda t, full_output: psp_success(m, mu, lam_p, D, alpha, t, law, full_output=full_output),
                          thetas, label)


def plm_general_curve(mu, lam_p, D, alpha, thetas, b, label="PLM general"):
    return analytic_curve(lambda t, full_output: plm_success_general(mu, lam_p, D, alpha, t, b, full_output),
                          thetas, label)


def plm_tjunction_curve(mu, lam_p, D, alpha, thetas, b, label="PLM T-junction"):
    return analytic_curve(lambda t, full_output: plm_success_tjunction(mu, lam_p, D, alpha, t, b, full_output),
                          thetas, label)


def ppp_curve(d, lam_d, D, alpha, thetas, label="PPP"):
    return SirCurve(np.asarray(thetas, dtype=float), ppp_success(d, lam_d, D, alpha, np.asarray(thetas, dtype=float)),
                    np.zeros(len(thetas)), kind="analytic", label=label)
