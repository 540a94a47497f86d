"""Quadrature formulas against independent oracles (scipy quad, closed forms, MC)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from coxnet import analytic as an
from coxnet.cox import ModelParams, PspScenarioGenerator
from coxnet.errors import ParameterError, UnsupportedOrderError
from coxnet.laws import DeterministicLaw, RayleighLaw


def quad(f, a, b, **kw):
    kw.setdefault("limit", 400)
    kw.setdefault("epsabs", 1e-13)
    kw.setdefault("epsrel", 1e-11)
    return integrate.quad(f, a, b, **kw)[0]


# ---------------------------------------------------------------- closed forms

def test_gamma_product():
    assert an.gamma_product(0.5) == pytest.approx(math.pi / 2)
    assert an.gamma_product(0.25) == pytest.approx(math.gamma(1.25) * math.gamma(0.75), rel=1e-14)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ParameterError):
            an.gamma_product(bad)


def test_ppp_examples():
    assert an.ppp_success(2, 1.0, 1.0, 4.0, 1.0) == pytest.approx(math.exp(-math.pi ** 2 / 2), rel=1e-12)
    assert an.ppp_success(2, 1.0, 1.0, 4.0, 1.0) == pytest.approx(0.007192, abs=5e-7)
    assert an.ppp_success(1, 0.3, 0.25, 4.0, 1.0) == pytest.approx(0.8465, abs=5e-5)
    with pytest.raises(ParameterError):
        an.ppp_success(1, 0.3, 0.25, 1.0, 1.0)
    with pytest.raises(ParameterError):
        an.ppp_success(3, 0.3, 0.25, 4.0, 1.0)


@settings(max_examples=25)
@given(st.sampled_from([1, 2]), st.floats(0.01, 2.0), st.floats(0.1, 2.0), st.floats(2.5, 6.0),
       st.floats(1e-3, 1e3))
def test_ppp_matches_pgfl_quadrature(d, lam, D, alpha, theta):
    if alpha <= d:
        alpha = d + 0.5
    s = theta * D ** alpha
    if d == 1:
        expo = 2.0 * lam * quad(lambda x: s / (s + x ** alpha), 0, np.inf)
    else:
        expo = lam * quad(lambda r: 2 * math.pi * r * s / (s + r ** alpha), 0, np.inf)
    assert an.ppp_success(d, lam, D, alpha, theta) == pytest.approx(math.exp(-expo), rel=1e-7, abs=1e-300)


@given(st.floats(0.0, 50.0), st.floats(2.2, 8.0))
def test_G_line_against_quad(t, alpha):
    ref = quad(lambda v: 1.0 / (1.0 + v ** alpha), 0.0, t)
    assert float(an.G_line(t, alpha)) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_G_line_limit():
    assert float(an.G_line(np.inf, 4.0)) == pytest.approx(math.pi / 4 / math.sin(math.pi / 4), rel=1e-14)


# ---------------------------------------------------------------- line models

def laplace_line_oracle(s, x, lam_p, alpha):
    f = lambda u: s / (s + (x * x + u * u) ** (alpha / 2))
    return math.exp(-2.0 * lam_p * quad(f, 0.0, np.inf))


@pytest.mark.parametrize("s,x,lam_p,alpha", [(1.0, 0.0, 0.3, 4.0), (0.01, 0.5, 1.0, 4.0),
                                             (2.0, 3.0, 0.2, 3.0), (1e-3, 0.01, 0.7, 5.0)])
def test_laplace_line_against_quad(s, x, lam_p, alpha):
    assert an.laplace_line(s, x, lam_p, alpha) == pytest.approx(laplace_line_oracle(s, x, lam_p, alpha), rel=1e-8)


def test_laplace_line_against_mc(rng):
    # Poisson(lam_p) points on the line y = x0, Rayleigh fading; truncate at |u| <= 200
    s, x0, lam_p, alpha = 1.0, 0.5, 0.4, 4.0
    n, L = 40000, 200.0
    counts = rng.poisson(lam_p * 2 * L, n)
    u = rng.uniform(-L, L, counts.sum())
    rid = np.repeat(np.arange(n), counts)
    g = np.log1p(s * (x0 * x0 + u * u) ** (-alpha / 2))
    est = np.exp(-np.bincount(rid, weights=g, minlength=n))
    se = est.std() / math.sqrt(n)
    assert abs(est.mean() - an.laplace_line(s, x0, lam_p, alpha)) < 4 * se


def og_plp_oracle(m, mu, lam_p, D, alpha, theta):
    s = theta * D ** alpha
    own = m * lam_p * quad(lambda u: s / (s + u ** alpha), 0, np.inf)
    bg = 2.0 * mu * quad(lambda x: 1.0 - laplace_line_oracle(s, x, lam_p, alpha), 0, np.inf, epsrel=1e-9)
    return math.exp(-own - bg)


@pytest.mark.parametrize("m", [2, 4])
@pytest.mark.parametrize("theta", [0.01, 1.0, 100.0])
def test_og_plp_success_against_quad(m, theta):
    args = (m, 1.0, 0.3, 0.25, 4.0, theta)
    v, err = an.og_plp_success(*args, full_output=True)
    assert v == pytest.approx(og_plp_oracle(*args), rel=1e-6)
    assert err < 1e-5


def test_og_plp_m4_own_term_formula():
    # with no background the m=4 value is exp(-4 lam_p D theta^(delta/2) Gamma-product)
    v = an.og_plp_success(4, 0.0, 0.3, 0.25, 4.0, 2.0)
    assert v == pytest.approx(math.exp(-4 * 0.3 * 0.25 * 2 ** 0.25 * an.gamma_product(0.25)), rel=1e-12)


def test_og_plp_orders():
    with pytest.raises(UnsupportedOrderError):
        an.og_plp_success(3, 1.0, 0.3, 0.25, 4.0, 1.0)


def nn_struve_oracle(r, m, mu, lam):
    # int_0^r exp(-2 lam sqrt(r^2 - x^2)) dx = r (pi/2) (L_{-1}(z) - I_1(z)), z = 2 lam r
    z = 2 * lam * r
    void_int = r * 0.5 * math.pi * (special.modstruve(-1, z) - special.iv(1, z))
    return 1.0 - math.exp(-m * lam * r - 2.0 * mu * (r - void_int))


@pytest.mark.parametrize("m", [2, 4])
@pytest.mark.parametrize("r", [0.05, 0.7, 3.0, 12.0])
def test_nn_cdf_line_models_against_struve(m, r):
    assert an.nn_cdf_og_plp(r, m, 0.3, 0.5) == pytest.approx(nn_struve_oracle(r, m, 0.3, 0.5), rel=1e-9, abs=1e-12)


def test_nn_cdf_zero_and_domain():
    assert an.nn_cdf_og_plp(0.0, 2, 1.0, 1.0) == 0.0
    with pytest.raises(ParameterError):
        an.nn_cdf_og_plp(-1.0, 2, 1.0, 1.0)


# ---------------------------------------------------------------- PSP nearest neighbour

@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0), st.floats(0.01, 3.0))
def test_own_stick_void_against_quad(h, r, lam):
    f = lambda g: math.exp(-lam * (min(h + g, r) + min(h - g, r)))
    ref = quad(f, 0.0, h, points=[x for x in (r - h, h - r) if 0 < x < h]) / h
    assert float(an.own_stick_void(h, r, lam)) == pytest.approx(ref, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("law,r", [(DeterministicLaw(3.0), 1.5), (DeterministicLaw(0.4), 2.5)])
def test_nn_cdf_psp_against_polar(law, r):
    fast = an.nn_cdf_psp(r, 2, 1.0, 0.3, law)
    slow = an.nn_cdf_psp_polar(r, 2, 1.0, 0.3, law)
    assert fast == pytest.approx(slow, abs=2e-5)


def test_nn_cdf_psp_long_sticks_approach_lines():
    # mu_PSP = mu / (2H): with long sticks the PSP nearest-neighbour law tends to the PLP one
    r, lam, mu = 2.0, 0.5, 0.2
    line = an.nn_cdf_og_plp(r, 2, mu, lam)
    gaps = [abs(an.nn_cdf_psp(r, 2, mu / (2 * H), lam, DeterministicLaw(H)) - line) for H in (10.0, 100.0, 1000.0)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-3


# ---------------------------------------------------------------- PSP interference

def J_closed(t, b):
    q = np.sqrt(b * b - 1j)
    return (np.arctan(t / q) / q).imag


def test_J_table_against_closed_form():
    b, _, table = an._b_setup(4.0, 5, 8)
    rng = np.random.default_rng(1)
    bi = rng.integers(0, b.size, 400)
    t = rng.uniform(-40, 40, 400) * rng.choice([1e-2, 1.0], 400)
    np.testing.assert_allclose(table(t, bi), J_closed(t, b[bi]), rtol=0, atol=1e-11)
    np.testing.assert_allclose(table.full(), J_closed(np.inf, b), atol=1e-11)


def A_oracle(eta, c):
    K = lambda a, b: J_closed(a + eta, b) - J_closed(a - eta, b)
    f = lambda b, a: -math.expm1(-c * K(a, b))
    # quadrant, split near the stick end where the integrand bends
    tot = 0.0
    for a0, a1 in ((0, eta), (eta, 2 * eta + 2), (2 * eta + 2, np.inf)):
        for b0, b1 in ((0, 1), (1, np.inf)):
            tot += integrate.dblquad(f, a0, a1, b0, b1, epsabs=1e-12, epsrel=1e-10)[0]
    return 4.0 * tot


# the oracle's inner quad warns on the slowly decaying far field; the outer result still agrees to 1e-7
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("eta,c", [(0.3, 0.2), (2.0, 0.05), (5.0, 1.0)])
def test_stick_area_functional_against_dblquad(eta, c):
    assert an.stick_area_functional(eta, c, 4.0)[0] == pytest.approx(A_oracle(eta, c), rel=1e-7)


def laplace_io_oracle(s, h, lam_p, alpha):
    # origin at distance e from one end of a stick of length 2h, e uniform on [0, 2h]
    f = lambda x: s / (s + abs(x) ** alpha)

    def at(e):
        return math.exp(-lam_p * (quad(f, 0, e) + quad(f, 0, 2 * h - e)))
    return quad(at, 0.0, 2 * h) / (2 * h)


@pytest.mark.parametrize("s,h", [(1.0, 2.0), (0.004, 10.0), (10.0, 0.5)])
def test_laplace_io_against_quad(s, h):
    law = DeterministicLaw(h)
    one = laplace_io_oracle(s, h, 0.3, 4.0)
    assert an.laplace_io_psp(s, 2, 0.3, law, 4.0) == pytest.approx(one, rel=1e-8)
    assert an.laplace_io_psp(s, 4, 0.3, law, 4.0) == pytest.approx(one ** 2, rel=1e-8)


def test_laplace_io_rayleigh_against_biased_expectation():
    law = RayleighLaw(0.3)
    s, lam_p = 0.5, 0.3
    ref = quad(lambda h: law.biased_pdf(h) * laplace_io_oracle(s, h, lam_p, 4.0), 0, law.support()[1], epsrel=1e-8)
    assert an.laplace_io_psp(s, 2, lam_p, law, 4.0) == pytest.approx(ref, rel=1e-6)


def test_laplace_ir_against_mc():
    # interference from background sticks only, Rayleigh fading
    s, mu, lam_p, h = 1.0, 0.1, 0.5, 2.0
    law = DeterministicLaw(h)
    gen = PspScenarioGenerator(2, ModelParams(lam_p), mu, law, 40.0)
    b = gen.draw(np.random.default_rng(7), 40000)
    keep = ~b.own
    g = np.log1p(s * b.r[keep] ** -4.0)
    est = np.exp(-np.bincount(b.rid[keep], weights=g, minlength=b.n))
    se = est.std() / math.sqrt(b.n)
    ref = an.laplace_ir_psp(s, mu, lam_p, law, 4.0)
    assert abs(est.mean() - ref) < 4 * se + 1e-3


def test_laplace_ir_rayleigh_budget():
    v, err = an.laplace_ir_psp(0.01, 0.01, 0.3, RayleighLaw(0.0104), 4.0, full_output=True)
    assert 0 < v < 1 and err < 1e-5


@pytest.mark.parametrize("m", [2, 4])
def test_low_theta_local_slope_is_half_delta(m):
    # outage ~ theta^(delta/2) for both orders; the own streets dominate as theta -> 0
    law = DeterministicLaw(10.0)
    th = np.array([1e-14, 1e-13])
    out = [1.0 - an.psp_success(m, 0.1, 0.3, 0.25, 4.0, t, law) for t in th]
    assert an.loglog_slope(th, out) == pytest.approx(0.25, abs=0.005)


def test_low_theta_exponent_claim():
    assert an.low_theta_exponent(2, 4.0) == 0.25
    assert an.low_theta_exponent(4, 4.0) == 0.5
    with pytest.raises(UnsupportedOrderError):
        an.low_theta_exponent(3, 4.0)


@pytest.mark.parametrize("theta", [0.1, 10.0])
def test_psp_long_sticks_approach_plp(theta):
    line = an.og_plp_success(2, 1.0, 0.3, 0.25, 4.0, theta)
    gaps = [abs(an.psp_success(2, 1.0 / (2 * c), 0.3, 0.25, 4.0, theta, DeterministicLaw(c)) - line)
            for c in (10.0, 100.0, 1000.0)]
    assert gaps[2] < gaps[0] and gaps[2] < 2e-3


def test_tjunction_factor_is_probability():
    v, err = an.tjunction_factor(0.3, 0.25, 4.0, 1.0, RayleighLaw(0.3))
    assert 0 < v < 1 and err < 1e-6
    gen = an.plm_success_general(0.3, 0.3, 0.25, 4.0, 1.0, 0.312)
    assert an.plm_success_tjunction(0.3, 0.3, 0.25, 4.0, 1.0, 0.312) < gen


def test_high_theta_asymptote_intensity():
    law = DeterministicLaw(10.0)
    v = an.high_theta_asymptote(100.0, 0.1, 0.6, 0.5, 0.25, 4.0, law)
    assert v == pytest.approx(an.ppp_success(2, 2 * 0.1 * 0.3 * 10.0, 0.25, 4.0, 100.0), rel=1e-14)


def test_analytic_curve_is_monotone():
    c = an.psp_curve(2, 0.1, 0.3, 0.25, 4.0, np.logspace(-2, 2, 9), DeterministicLaw(10.0))
    assert np.all(np.diff(c.values) < 0) and np.all(c.errors < 1e-6)
