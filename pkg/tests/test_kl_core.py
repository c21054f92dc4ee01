import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klortho.errors import DomainError
from klortho.kl_core import (
    HAT,
    PLAIN,
    PowerSingularity,
    RealFunction,
    TransformSpec,
    kernel_cosine_inverse,
    kl_forward,
    kl_inverse,
    lemma1_forms,
    lemma2_positivity_scan,
    origin_of,
    parseval_residual,
    sine_laplace_tail,
    weight_q,
    zero_function,
)
from klortho.quad import ExpDecay, IndexDecay, NoDecay

PI = math.pi
EXP = RealFunction(lambda x: np.exp(-x), ExpDecay(1.0), name="exp(-x)")
XEXP = RealFunction(lambda x: x * np.exp(-x), ExpDecay(1.0), origin_of(1.0), "x exp(-x)")
ZERO = zero_function()


def image_of_exp(tau):
    tau = np.asarray(tau, dtype=float)
    return np.where(tau == 0, 1.0, PI * tau / np.sinh(PI * np.where(tau == 0, 1.0, tau)))


def test_forward_exp():
    taus = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
    assert np.allclose(kl_forward(EXP, taus), image_of_exp(taus), rtol=1e-10, atol=0)


def test_forward_constant_half_order_kernel():
    one = RealFunction(lambda x: np.ones_like(x), NoDecay(), name="1")
    assert abs(kl_forward(one, 0.0, HAT) - 0.5) < 1e-10


def test_forward_zero():
    assert kl_forward(ZERO, 1.3) == 0


def test_inverse_examples():
    assert abs(kl_inverse(image_of_exp, 1.0, decay=IndexDecay(PI / 2)) - math.exp(-1)) < 1e-10
    assert kl_inverse(lambda t: 0 * t, 1.0, decay=IndexDecay(1.0)) == 0


def test_inverse_of_cosine_representation():
    # F = int K_{i tau}(x) exp(-x cosh u) dx = pi sin(tau u) / (sinh(pi tau) sinh u)
    u = 0.5
    F = lambda t: PI * np.sin(t * u) / (np.sinh(PI * t) * math.sinh(u))
    f = RealFunction(lambda x: np.exp(-x * math.cosh(u)), ExpDecay(math.cosh(u)))
    taus = np.array([0.5, 1.0, 2.0])
    assert np.allclose(kl_forward(f, taus), F(taus), rtol=1e-10)
    for x in (0.5, 1.0, 2.0):
        assert abs(kl_inverse(F, x, decay=IndexDecay(PI / 2)) / math.exp(-x * math.cosh(u)) - 1) < 1e-9


def test_inverse_needs_decay():
    with pytest.raises(DomainError):
        kl_inverse(image_of_exp, 1.0)
    with pytest.raises(DomainError):
        kl_inverse(image_of_exp, -1.0, decay=IndexDecay(1.0))


def test_round_trip():
    for x in (0.5, 1.0, 2.0):
        back = kl_inverse(lambda t: kl_forward(EXP, t), x, decay=IndexDecay(PI / 2))
        assert abs(back / math.exp(-x) - 1) <= 1e-5


def test_kernel_cosine_inverse_point():
    assert abs(kernel_cosine_inverse(1.0, 0.5) - math.exp(-math.cosh(0.5))) < 1e-10


def test_parseval_examples():
    lhs, rhs = parseval_residual(EXP, EXP)
    assert abs(lhs - 0.25) < 1e-12 and abs(rhs - 0.25) < 1e-7
    assert parseval_residual(EXP, ZERO) == (0.0, 0.0)
    lhs, rhs = parseval_residual(EXP, XEXP)
    assert abs(lhs - 0.25) < 1e-12 and abs(rhs - lhs) < 1e-7


def test_parseval_symmetry():
    assert parseval_residual(EXP, XEXP) == parseval_residual(XEXP, EXP)


def test_lemma1_forms():
    ref = PI / math.sinh(PI)
    assert abs(lemma1_forms(XEXP, 1.0) - ref) < 1e-10
    for tau in (0.5, 2.0):
        a = lemma1_forms(XEXP, tau, "cosine_laplace")
        b = lemma1_forms(XEXP, tau, "sine")
        assert abs(a - b) <= 1e-8
        assert abs(a - kl_forward(EXP, tau)) <= 1e-8
    assert sine_laplace_tail(XEXP, 10.0) < 1e-3


def test_lemma1_rejections():
    with pytest.raises(DomainError):
        lemma1_forms(XEXP, 0.0, "sine")
    with pytest.raises(DomainError):
        lemma1_forms(EXP, 1.0, "cosine_laplace")
    with pytest.raises(DomainError):
        lemma1_forms(XEXP, 1.0, "fourier")


def test_weight_q():
    assert abs(weight_q(XEXP, 1.0) - PI / math.sinh(PI)) < 1e-10
    assert abs(weight_q(XEXP, 0.7) - weight_q(XEXP, 0.7, "sine")) <= 1e-6
    assert weight_q(ZERO, 1.0) == 0
    with pytest.raises(DomainError):
        weight_q(XEXP, 0.0, "sine")
    with pytest.raises(DomainError):
        weight_q(XEXP, 1.0, "cosine")


def test_positivity_scan():
    grid = [0.5, 1.0, 2.0, 5.0]
    rep = lemma2_positivity_scan(XEXP, grid)
    assert np.allclose(rep.values, image_of_exp(grid), rtol=1e-9)
    assert rep.minimum >= -1e-10 and rep.negative == ()
    assert lemma2_positivity_scan(ZERO, grid).values == (0.0, 0.0, 0.0, 0.0)


def test_transform_and_function_validation():
    with pytest.raises(DomainError):
        TransformSpec(alpha=0.0)
    with pytest.raises(DomainError):
        TransformSpec(beta=0.0)
    with pytest.raises(DomainError):
        PowerSingularity(-1.0)
    assert PLAIN == TransformSpec(1.0, 1.0)


def test_forward_is_vectorized_and_rejects_negative_index():
    taus = np.array([0.3, 1.7])
    vals = kl_forward(EXP, taus)
    assert vals.shape == (2,) and abs(vals[0] - kl_forward(EXP, 0.3)) < 1e-12
    with pytest.raises(DomainError):
        kl_forward(EXP, -taus)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.3, 2.0), st.floats(0.0, 5.0))
def test_mellin_exp_kernel_closed_form(s, mu, tau):
    # int x**(s-1) exp(-mu x) K_{i tau}(mu x) dx = sqrt(pi) (2 mu)**-s |Gamma(s + i tau)|**2 / Gamma(s + 1/2)
    f = RealFunction(lambda x: x ** (s - 1) * np.exp(-mu * x), ExpDecay(mu), origin_of(s - 1))
    ref = float(mp.sqrt(mp.pi) / (2 * mu) ** s * abs(mp.gamma(s + 1j * tau)) ** 2 / mp.gamma(s + 0.5))
    assert abs(kl_forward(f, tau, TransformSpec(mu, 1.0)) / ref - 1) <= 1e-9
