import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klortho.errors import ConvergenceError, DomainError
from klortho.quad import (
    AlgebraicDecay,
    ExpDecay,
    IndexDecay,
    NoDecay,
    QuadSpec,
    SqrtExpDecay,
    combine,
    integrate_2d,
    integrate_algebraic_tail,
    integrate_semiinf,
    integrate_tau_index,
)
from klortho.specfun import besselk_real, kiv_scaled

SEMIINF = [
    ("exp", lambda x: np.exp(-x), ExpDecay(1.0), 0.0, 1.0),
    ("x exp", lambda x: x * np.exp(-x), ExpDecay(1.0), 1.0, 1.0),
    ("K0", lambda x: besselk_real(0.0, x), ExpDecay(1.0), 0.0, math.pi / 2),
    ("x^-1/2 exp", lambda x: x**-0.5 * np.exp(-x), ExpDecay(1.0), -0.5, math.sqrt(math.pi)),
    ("exp sqrt", lambda x: np.exp(-np.sqrt(x)), SqrtExpDecay(1.0), 0.0, 2.0),
    ("log", lambda x: -np.log(x) * np.exp(-x), ExpDecay(1.0), 0.0, 0.5772156649015329),
]


def converged_ok(res):
    return res.converged and res.err_estimate <= max(1e-12, 1e-10 * abs(res.value))


@pytest.mark.parametrize("name, f, prof, p, ref", SEMIINF, ids=[s[0] for s in SEMIINF])
def test_semiinf_closed_forms(name, f, prof, p, ref):
    res = integrate_semiinf(f, prof, QuadSpec(), p)
    assert converged_ok(res)
    assert abs(res.value - ref) <= 1e-12 * max(1.0, abs(ref))


def test_tau_index_examples():
    res = integrate_tau_index(lambda t: t**3 / np.sinh(np.pi * t), QuadSpec(), IndexDecay(math.pi))
    assert res.converged and abs(res.value - 1 / 8) < 1e-13
    res = integrate_tau_index(lambda t: np.exp(-t), QuadSpec(), IndexDecay(1.0))
    assert res.converged and abs(res.value - 1.0) < 1e-13


def test_tau_index_kernel_identity():
    # (4/pi^2) int tau sinh(pi tau) K^3 at x = y = t = 1 is exp(-3/2)
    def h(tau):
        return 0.5 * tau * -np.expm1(-2 * np.pi * tau) * np.exp(-0.5 * np.pi * tau) * kiv_scaled(tau, 1.0) ** 3

    res = integrate_tau_index(h, QuadSpec(), IndexDecay(0.5 * math.pi))
    assert abs(4 / math.pi**2 * math.exp(-3.0) * res.value - math.exp(-1.5)) < 1e-12


def test_tau_index_requires_decay():
    with pytest.raises(DomainError):
        integrate_tau_index(lambda t: np.exp(-t), QuadSpec(), None)


def test_tau_index_cap_counts_against_convergence():
    # a slow rate puts the cut beyond tau = 40; the tail left at the cap is visible
    res = integrate_tau_index(lambda t: np.exp(-0.1 * t), QuadSpec(), IndexDecay(0.1))
    assert not res.converged


def test_integrate_2d_examples():
    res = integrate_2d(lambda y, t: np.exp(-y - t), (ExpDecay(1.0), ExpDecay(1.0)))
    assert res.converged and abs(res.value - 1) < 1e-9
    res = integrate_2d(lambda y, t: y * t * np.exp(-y - t), (ExpDecay(1.0), ExpDecay(1.0)), origin_exponents=(1, 1))
    assert res.converged and abs(res.value - 1) < 1e-9


def test_algebraic_tail():
    # int (1+x)^-1.3 dx = 1/0.3
    res = integrate_algebraic_tail(lambda x: (1 + x) ** -1.3, 1.3, QuadSpec())
    assert res.converged and abs(res.value - 1 / 0.3) < 1e-10
    # x^-1/2 (1+x)^-1 has integral pi
    res = integrate_algebraic_tail(lambda x: x**-0.5 / (1 + x), 1.5, QuadSpec(), -0.5)
    assert res.converged and abs(res.value - math.pi) < 1e-10
    with pytest.raises(DomainError):
        integrate_algebraic_tail(lambda x: 1 / (1 + x), 1.0)


def test_nonfinite_integrand_raises():
    with pytest.raises(ConvergenceError):
        integrate_semiinf(lambda x: np.where(x > 1, np.nan, np.exp(-x)), ExpDecay(1.0))


def test_nonconvergence_is_flagged():
    res = integrate_semiinf(lambda x: np.exp(-x) * np.sin(40 * x) ** 2, ExpDecay(1.0), QuadSpec(max_refinements=1))
    assert not res.converged


def test_quadspec_validation():
    with pytest.raises(DomainError):
        QuadSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadSpec(rel_tol=1.0)
    with pytest.raises(DomainError):
        QuadSpec(max_refinements=0)
    for bad in (lambda: ExpDecay(0.0), lambda: IndexDecay(-1.0), lambda: AlgebraicDecay(1.0)):
        with pytest.raises(DomainError):
            bad()


def test_combine():
    assert combine(ExpDecay(1.0), ExpDecay(2.0)) == ExpDecay(3.0)
    assert combine(ExpDecay(1.0), NoDecay()) == ExpDecay(1.0)
    assert combine(NoDecay(), SqrtExpDecay(2.0)) == SqrtExpDecay(2.0)


def test_stacked_integrand():
    rates = np.array([[1.0], [2.0], [4.0]])
    res = integrate_semiinf(lambda x: np.exp(-rates * x), ExpDecay(1.0))
    assert np.allclose(res.value, [1.0, 0.5, 0.25], rtol=1e-13)


def test_monotone_refinement_on_acceptance_integrands():
    tight = QuadSpec(abs_tol=1e-15, rel_tol=1e-15, max_refinements=6)
    for _, f, prof, p, ref in SEMIINF:
        hist = integrate_semiinf(f, prof, tight, p).history
        floor = 1e-14 * abs(ref)
        assert all(b <= max(a, floor) for a, b in zip(hist, hist[1:]))


@pytest.mark.parametrize("name, f, prof, p, ref", SEMIINF, ids=[s[0] for s in SEMIINF])
def test_refinement_budget_agreement(name, f, prof, p, ref):
    a = integrate_semiinf(f, prof, QuadSpec(max_refinements=4), p)
    b = integrate_semiinf(f, prof, QuadSpec(max_refinements=8), p)
    assert abs(a.value - b.value) <= a.err_estimate + 4e-16 * abs(a.value)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_linearity(al, be, r1, r2):
    spec = QuadSpec()
    prof = ExpDecay(min(r1, r2))
    f = lambda x: np.exp(-r1 * x) * x
    g = lambda x: np.exp(-r2 * x)
    lhs = integrate_semiinf(lambda x: al * f(x) + be * g(x), prof, spec, 0.0).value
    rhs = al * integrate_semiinf(f, ExpDecay(r1), spec, 1.0).value + be * integrate_semiinf(g, ExpDecay(r2), spec).value
    scale = abs(al) / r1**2 + abs(be) / r2
    assert abs(lhs - rhs) <= 2 * max(spec.abs_tol, spec.rel_tol * scale)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(0.3, 6.0))
def test_gamma_moments(s, rate):
    res = integrate_semiinf(lambda x: x ** (s - 1) * np.exp(-rate * x), ExpDecay(rate), QuadSpec(), s - 1)
    ref = math.gamma(s) / rate**s
    assert res.converged
    assert abs(res.value - ref) <= 1e-10 * ref
