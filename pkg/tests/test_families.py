import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klortho.errors import DomainError
from klortho.families import (
    GENERATED,
    CoefficientTable,
    askey_poly,
    cdh,
    family,
    family_function,
    generated_function,
    generated_image,
    kl_image_closed,
    kl_image_integral,
    laguerre,
    prudnikov_poly,
    wilson,
)
from klortho.kl_core import HAT, PLAIN, kl_forward
from klortho.quad import ExpDecay, QuadSpec, integrate_semiinf

PI = math.pi

# mpmath oracles (dps=30), frozen
LAGUERRE = [(3, 0.5, 1.7, -1.01133333333333333910649306138), (5, 1.5, 3.2, 1.91686608333333367948532928911)]
WILSON = [(2, -16.0118640000000008655156591431), (3, -604.664745984000115516201276478)]  # (1, .5, .7, 1.2), t=.9
CDH = [(2, (1.0, 0.5, 0.7), 0.9, 1.48359999999999939417349992254),
       (3, (0.4, 1.1, 0.6), 1.3, -50.2273750000000028841373733712)]
# int x**0.2 e**(-x/2) L_2^1.5(x) K_{0.8 i}(x/2) dx
F25_POINT = 1.06462944511659486180399897834

ABC = dict(a=1.0, b=0.5, c=0.7)
ABCD = dict(a=1.0, b=0.5, c=0.7, d=1.2)


def _fd_vanishes(vals, order):
    """``order``-th forward difference of samples on an arithmetic grid, relative to the samples."""
    diff = np.diff(vals, n=order)
    return np.max(np.abs(diff)) <= 1e-8 * np.max(np.abs(vals))


@pytest.mark.parametrize("n, alpha, x, ref", LAGUERRE)
def test_laguerre_oracle(n, alpha, x, ref):
    assert abs(laguerre(n, alpha, x) - ref) <= 1e-13 * abs(ref)


def test_laguerre_low_degrees():
    x = np.linspace(0, 4, 9)
    assert np.all(laguerre(0, 0.7, x) == 1)
    assert np.allclose(laguerre(1, 0.7, x), 1.7 - x, rtol=0, atol=1e-15)


def test_laguerre_norm():
    # int e**-x L_2(x)**2 dx = Gamma(3) / 2! = 1
    res = integrate_semiinf(lambda x: np.exp(-x) * laguerre(2, 0.0, x) ** 2, ExpDecay(1.0), QuadSpec())
    assert abs(res.value - 1.0) < 1e-12


@pytest.mark.parametrize("n, ref", WILSON)
def test_wilson_oracle(n, ref):
    assert abs(wilson(n, 0.9, 1.0, 0.5, 0.7, 1.2) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("n, abc, t, ref", CDH)
def test_cdh_oracle(n, abc, t, ref):
    assert abs(cdh(n, t, *abc) - ref) <= 1e-12 * abs(ref)


def test_askey_degree_zero_and_one():
    t = np.array([0.0, 0.4, 2.0])
    assert np.all(askey_poly(family("Wilson", **ABCD), 0, t) == 1)
    assert np.all(askey_poly(family("CDH", **ABC), 0, t) == 1)
    a, b, c = ABC.values()
    brute = (a + b) * (a + c) - (a * a + t * t)
    assert np.allclose(cdh(1, t, a, b, c), brute, rtol=1e-14)


def test_wilson_reversal_symmetry():
    assert abs(wilson(2, 0.9, 1, 0.5, 0.7, 1.2) / wilson(2, 0.9, 1.2, 0.7, 0.5, 1) - 1) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wilson_permutations(n):
    base = wilson(n, 0.9, 1, 0.5, 0.7, 1.2)
    for p in itertools.permutations((1, 0.5, 0.7, 1.2)):
        assert abs(wilson(n, 0.9, *p) / base - 1) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cdh_permutations(n):
    base = cdh(n, 1.3, 0.4, 1.1, 0.6)
    for p in itertools.permutations((0.4, 1.1, 0.6)):
        assert abs(cdh(n, 1.3, *p) / base - 1) <= 1e-12


@pytest.mark.parametrize("n", range(5))
def test_degree_by_finite_differences(n):
    s = np.linspace(0.5, 3.0, n + 6)  # arithmetic grid in the natural variable
    t = np.sqrt(s)
    # the tau**2 leading coefficients are small; a wider grid keeps the top difference visible
    wide = np.sqrt(np.linspace(0.5, 40.0, 2 * n + 6))
    nu_al = dict(nu=0.5, alpha=1.0)
    fams = [
        (n, laguerre(n, 0.3, s)),
        (n, wilson(n, t, *ABCD.values())),
        (n, cdh(n, t, *ABC.values())),
        (n, prudnikov_poly(family("Prudnikov_p", **nu_al), n, s)),
        # two conjugate pairs per term: degree 2n in tau**2
        (2 * n, prudnikov_poly(family("Prudnikov_V", **nu_al), n, wide)),
        (2 * n, prudnikov_poly(family("Prudnikov_S", **nu_al), n, wide)),
    ]
    for deg, vals in fams:
        assert _fd_vanishes(vals, deg + 1)
        # the top difference is a nonzero constant
        top = np.diff(vals, n=deg)
        assert abs(top[0]) > 1e3 * np.max(np.abs(np.diff(vals, n=deg + 1)))


@pytest.mark.parametrize("fid", GENERATED)
def test_generated_families_are_polynomials_times_envelope(fid):
    params = dict(ABCD) if "Wilson" in fid else dict(ABC)
    if "conv" in fid:
        params["c"] = 0.3
    fam = family(fid, **params)
    x = np.linspace(0.5, 3.0, 8)
    lead = params["a"] if fid.endswith(("2_23", "2_31", "2_37", "2_42")) else params["b"]
    env = x ** (lead - 1) * (np.exp(-x) if "conv" in fid else 1.0)
    for n in range(4):
        poly = generated_function(fam, n, x) / env
        assert _fd_vanishes(poly, n + 1)
        assert np.all(np.isfinite(poly))


def test_generated_examples():
    assert generated_function(family("CDH_f_2_23", a=1, b=1, c=1), 0, 2.5) == 2
    v = generated_function(family("CDHconv_f_2_31", a=1, b=1, c=0.3), 0, 1.5)
    assert abs(v - 2 / math.sqrt(PI) * math.exp(-1.5)) <= 1e-15
    # 2 (2)_1**3 2F3(-1, 4; 2, 2, 2; 1) = 16 (1 - 1/2)
    assert abs(generated_function(family("Wilson_f_2_37", a=1, b=1, c=1, d=1), 1, 1.0) - 8.0) <= 1e-14


def test_generated_image_matches_transform():
    for fid, spec in (("CDH_f_2_23", HAT), ("CDHconv_f_2_31", PLAIN)):
        fam = family(fid, a=1.0, b=0.5, c=0.3)
        for n in (0, 1, 2):
            for tau in (0.4, 1.5):
                ref = generated_image(fam, n, tau)
                val = kl_forward(family_function(fam, n), tau, spec)
                assert abs(val - ref) <= 1e-8 * max(1.0, abs(ref))


def test_prudnikov_examples():
    nu_al = dict(nu=0.5, alpha=1.0)
    assert prudnikov_poly(family("Prudnikov_p", **nu_al), 0, 1.3) == 1
    assert prudnikov_poly(family("Prudnikov_V", **nu_al), 0, 1.3) == 1
    assert prudnikov_poly(family("Prudnikov_S", **nu_al), 0, 1.3) == 1
    one = CoefficientTable(((1.0,),), "S39")
    assert prudnikov_poly(family("Prudnikov_S39", coeffs=one, **nu_al), 0, 0.7) == 1
    # p_1 = -(1+alpha)(1+alpha+nu) (1 - x / ((1+alpha)(1+alpha+nu)))
    x = 0.8
    assert abs(prudnikov_poly(family("Prudnikov_p", **nu_al), 1, x) - (-(2 * 2.5) + x)) <= 1e-14


def test_image_integral_examples():
    p = dict(alpha=0.0, beta=0.0, mu=1.0, eta=1.0)
    assert abs(kl_image_integral("F_2_5", 0, 1.0, p) - PI / math.sinh(PI)) <= 1e-10
    p = dict(alpha=1.5, beta=0.2, mu=0.5, eta=0.5)
    assert abs(kl_image_integral("F_2_5", 2, 0.8, p) / F25_POINT - 1) <= 1e-9
    assert abs(kl_image_closed("F_2_9", 2, 0.8, p) / F25_POINT - 1) <= 1e-7
    # companion weight exp(-(1 - mu) x) at mu = 1 is exponent zero
    p = dict(alpha=0.0, beta=0.0, mu=0.0, eta=2.0)
    assert abs(kl_image_integral("G_2_16", 0, 0.0, p) - 0.5) <= 1e-10


def test_closed_form_examples():
    for tau in (0.0, 0.7, 2.0):
        sinh_ratio = PI * tau / math.sinh(PI * tau) if tau else 1.0
        assert abs(kl_image_closed("F_2_9", 0, tau, dict(alpha=0.0, beta=0.0, mu=1.0)) - sinh_ratio) <= 1e-12
        assert abs(kl_image_closed("F_2_13", 0, tau, dict(alpha=0.0, gamma=0.0)) - PI / (2 * math.cosh(PI * tau / 2))) <= 1e-12


@pytest.mark.parametrize("n", range(4))
def test_closed_vs_integral(n):
    for alpha, beta, mu in ((0.0, 0.0, 1.0), (1.5, 0.2, 0.5), (0.5, 1.0, 0.8)):
        for tau in (0.3, 1.7):
            p = dict(alpha=alpha, beta=beta, mu=mu, eta=mu)
            ref = kl_image_closed("F_2_9", n, tau, p)
            assert abs(kl_image_integral("F_2_5", n, tau, p) - ref) <= 1e-7 * max(abs(ref), 1e-3)
        for gamma_ in (0.0, 0.4):
            form = "F_2_14" if n % 2 else "F_2_13"
            ref = kl_image_closed(form, n, 0.9, dict(alpha=alpha, gamma=gamma_))
            val = kl_image_integral("F_2_5", n, 0.9, dict(alpha=alpha, beta=gamma_, mu=0.0, eta=1.0))
            assert abs(val - ref) <= 1e-7 * max(abs(ref), 1e-3)
            ref = kl_image_closed("G_2_21", n, 0.9, dict(alpha=alpha, gamma=gamma_, eta=2.0))
            val = kl_image_integral("G_2_16", n, 0.9, dict(alpha=alpha, beta=gamma_, mu=0.0, eta=2.0))
            assert abs(val - ref) <= 1e-7 * max(abs(ref), 1e-3)


def test_parity_split_rejects_wrong_degree():
    with pytest.raises(DomainError):
        kl_image_closed("F_2_13", 1, 0.5, dict(alpha=0.0, gamma=0.0))
    with pytest.raises(DomainError):
        kl_image_closed("F_2_14", 2, 0.5, dict(alpha=0.0, gamma=0.0))


def test_table_free_images_need_a_table():
    with pytest.raises(DomainError):
        kl_image_closed("Q_3_13", 0, 0.5, dict(nu=0.5))
    with pytest.raises(DomainError):
        kl_image_integral("Q_3_11_left", 0, 0.5, dict(nu=0.5))


def test_three_term_image_rejects_small_index():
    table = CoefficientTable(((1.0,),))
    with pytest.raises(DomainError):
        kl_image_closed("q_3_15", 0, 0.01, dict(nu=0.5), table)


def test_family_validation():
    with pytest.raises(DomainError):
        family("Laguerre", alpha=-1.0)
    with pytest.raises(DomainError):
        family("Wilson", a=1, b=1, c=1, d=0)
    with pytest.raises(DomainError):
        family("CDHconv_f_2_31", a=1, b=1, c=0.5)
    with pytest.raises(DomainError):
        family("CDH", a=1, b=1)
    with pytest.raises(DomainError):
        family("CDH", a=1, b=1, c=1, d=1)
    with pytest.raises(DomainError):
        family("Prudnikov_S39", nu=0.5, alpha=1.0)
    with pytest.raises(DomainError):
        family("Hermite")
    with pytest.raises(DomainError):
        laguerre(11, 0.0, 1.0)
    with pytest.raises(DomainError):
        laguerre(1.5, 0.0, 1.0)


def test_coefficient_table_shape():
    with pytest.raises(DomainError):
        CoefficientTable(((1.0,), (1.0,)))
    with pytest.raises(DomainError):
        CoefficientTable(((float("nan"),),))
    t = CoefficientTable(((1,), (2, 3)))
    assert t.degree == 1 and t.row(1).tolist() == [2.0, 3.0]
    with pytest.raises(DomainError):
        t.row(2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.floats(0.0, 3.0), st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_generated_values_are_real_and_finite(n, x, a, b, c):
    fam = family("CDH_g_2_24", a=a, b=b, c=c)
    v = generated_function(fam, n, x + 0.1)
    assert isinstance(v, float) and math.isfinite(v)
