"""The sixteen acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict (see ``conftest.py``) before asserting,
so the summary shows all criteria even when some fail.
"""
import itertools
import math
import time

import mpmath as mp
import numpy as np

from klortho.convolution import (
    convolution_kernel,
    convolve,
    factorization_residual,
    kernel_bound,
    kernel_index_integral,
    parseval_type_eval,
)
from klortho.families import kl_image_closed, kl_image_integral, wilson
from klortho.harness import case, d_orth_check, verify_case
from klortho.kl_core import RealFunction, kernel_cosine_inverse, origin_of, parseval_residual, weight_q
from klortho.quad import ExpDecay, QuadSpec, SqrtExpDecay, integrate_algebraic_tail, integrate_semiinf
from klortho.specfun import besselk_imag, besselk_real, kiv_scaled, rho_nu

PI = math.pi
EXP = RealFunction(lambda x: np.exp(-x), ExpDecay(1.0), name="exp(-x)")
TIGHT = QuadSpec(abs_tol=1e-14, rel_tol=1e-12, truncation_margin=40)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_01_reciprocity(criterion):
    t0 = time.perf_counter()
    worst = max(abs(kernel_cosine_inverse(x, u) - math.exp(-x * math.cosh(u)))
                for x in (0.5, 1.0, 2.0) for u in (0.0, 0.5, 1.0, 2.0))
    dt = time.perf_counter() - t0
    ok = criterion(1, worst <= 1e-6 and dt <= 10, f"reciprocity max residual {worst:.2e} (<= 1e-6), {dt:.1f} s (<= 10 s)")
    assert ok


def test_02_uniform_bound(criterion):
    worst = 0.0
    for d, tau, x in itertools.product((0.0, PI / 4, 3 * PI / 8), (0.5, 1.0, 5.0, 10.0), (0.5, 1.0, 2.0)):
        lhs = abs(float(besselk_imag(tau, x)))
        rhs = math.exp(-d * tau) * float(besselk_real(0.0, x * math.cos(d)))
        worst = max(worst, lhs / rhs)
    ok = criterion(2, worst <= 1 + 1e-10, f"uniform bound max |K|/bound {worst:.6f} (<= 1 + 1e-10)")
    assert ok


def test_03_eigenfunction(criterion):
    h = 1e-3
    worst = 0.0
    for x, tau in ((0.8, 1.0), (1.5, 3.0)):
        k = lambda v: float(besselk_imag(tau, v))
        k0 = k(x)
        d1 = (k(x + h) - k(x - h)) / (2 * h)
        d2 = (k(x + h) - 2 * k0 + k(x - h)) / h**2
        a_k = x * x * k0 - x * d1 - x * x * d2
        worst = max(worst, abs(a_k - tau * tau * k0) / abs(tau * tau * k0))
    ok = criterion(3, worst <= 1e-4, f"eigenfunction relative residual {worst:.2e} (<= 1e-4)")
    assert ok


def _mellin_errors():
    errs = {}
    w = 0.0
    for s, mu, tau in itertools.product((0.7, 1.0, 1.6), (0.5, 1.0), (0.0, 1.0, 2.5)):
        f = lambda x: x ** (s - 1) * np.exp(-mu * x) * besselk_imag(tau, mu * x)
        q = integrate_semiinf(f, ExpDecay(2 * mu), TIGHT, s - 1).value
        ref = float(mp.sqrt(mp.pi) / (2 * mu) ** s * abs(mp.gamma(s + 1j * tau)) ** 2 / mp.gamma(s + 0.5))
        w = max(w, rel(q, ref))
    errs["exp-kernel"] = w
    w = 0.0
    for s, eta, tau in itertools.product((0.7, 1.0, 1.6), (1.0, 2.0), (0.0, 1.0, 2.5)):
        f = lambda x: x ** (s - 1) * besselk_imag(tau, eta * np.sqrt(x))
        q = integrate_semiinf(f, SqrtExpDecay(eta), TIGHT, s - 1).value
        ref = float(eta ** (-2 * s) * 2 ** (2 * s - 1) * abs(mp.gamma(s + 0.5j * tau)) ** 2)
        w = max(w, rel(q, ref))
    errs["sqrt-kernel"] = w
    w = 0.0
    for s, tau in itertools.product((0.2, 0.4), (0.0, 1.0, 2.5)):
        # exp(x) K_{i tau}(x) x**(s-1) decays like x**(s-3/2)
        f = lambda x: x ** (s - 1) * kiv_scaled(tau, x) * math.exp(-0.5 * PI * tau)
        q = integrate_algebraic_tail(f, 1.5 - s, TIGHT, s - 1).value
        ref = float(mp.cosh(mp.pi * tau) / mp.sqrt(mp.pi) / 2**s * abs(mp.gamma(s + 1j * tau)) ** 2 * mp.gamma(0.5 - s))
        w = max(w, rel(q, ref))
    errs["growing-exp"] = w
    w = 0.0
    for s, nu, tau in itertools.product((1.0, 1.5), (0.3, 1.0), (0.0, 1.0, 2.5)):
        f = lambda x: x ** (s - 1) * besselk_imag(tau, 2 * np.sqrt(x)) * besselk_real(nu, 2 * np.sqrt(x))
        q = integrate_semiinf(f, SqrtExpDecay(4.0), TIGHT, s - 1 - nu / 2).value
        z = [s + (nu + 1j * tau) / 2, s - (nu + 1j * tau) / 2, s + (nu - 1j * tau) / 2, s - (nu - 1j * tau) / 2]
        ref = float(mp.re(mp.fprod(mp.gamma(v) for v in z) / (4 * mp.gamma(2 * s))))
        w = max(w, rel(q, ref))
    errs["product"] = w
    q = integrate_semiinf(lambda x: x**-0.5 * np.exp(-x - 1 / x), ExpDecay(1.0), TIGHT, -0.5).value
    errs["exp-reciprocal"] = rel(q, math.sqrt(PI) * math.exp(-2))
    return errs


def test_04_mellin(criterion):
    t0 = time.perf_counter()
    errs = _mellin_errors()
    dt = time.perf_counter() - t0
    worst = max(errs.values())
    parts = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    ok = criterion(4, worst <= 1e-8 and dt <= 60, f"Mellin closed forms: {parts} (<= 1e-8), {dt:.1f} s (<= 60 s)")
    assert ok


def test_05_parseval(criterion):
    lhs, rhs = parseval_residual(EXP, EXP)
    err = max(abs(lhs - 0.25), abs(rhs - 0.25))
    ok = criterion(5, err <= 1e-7, f"Parseval lhs {lhs:.12f} rhs {rhs:.12f} (1/4 within 1e-7)")
    assert ok


def test_06_weight_q(criterion):
    omega = RealFunction(lambda x: x * np.exp(-x), ExpDecay(1.0), origin_of(1.0))
    worst = max(abs(weight_q(omega, t) - PI * t / math.sinh(PI * t)) for t in (0.5, 1.0, 2.0))
    ok = criterion(6, worst <= 1e-8, f"weight q max error {worst:.2e} (<= 1e-8)")
    assert ok


def test_07_theorem_one(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for tau in (0.5, 1.0, 2.0):
        lhs, rhs = factorization_residual(EXP, EXP, tau)
        worst = max(worst, rel(lhs, rhs))
    for x in (1.0, 2.0):
        worst = max(worst, rel(convolve(EXP, EXP, x), parseval_type_eval(EXP, EXP, x)))
    dt = time.perf_counter() - t0
    ok = criterion(7, worst <= 1e-5 and dt <= 300, f"factorization and Parseval-type max rel {worst:.2e} (<= 1e-5), {dt:.1f} s")
    assert ok


def test_08_kernel(criterion):
    worst, bound_ok = 0.0, True
    for x, y, t in ((1.0, 1.0, 1.0), (0.5, 1.0, 2.0)):
        k = convolution_kernel(x, y, t)
        worst = max(worst, abs(kernel_index_integral(x, y, t) - k))
        bound_ok &= all(k <= kernel_bound(x, y, t, d) for d in (0.35 * PI, 0.45 * PI))
    ok = criterion(8, worst <= 1e-7 and bound_ok, f"kernel identity max error {worst:.2e} (<= 1e-7), bound holds: {bound_ok}")
    assert ok


def test_09_laguerre_gram(criterion):
    reps = [verify_case(case("LAG_2_4", alpha=a), 6, 1e-10, 1e-10) for a in (0.0, 0.5)]
    off = max(r.max_offdiag_rel for r in reps)
    diag = max(r.max_diag_rel_err for r in reps)
    ok = criterion(9, all(r.passed for r in reps), f"LAG_2_4 N=6 off-diagonal {off:.1e}, diagonal {diag:.1e} (<= 1e-10)")
    assert ok


def test_10_cdh_gram(criterion):
    t0 = time.perf_counter()
    rep = verify_case(case("CDH_2_10", beta=0.0, gamma=0.0), 4, 1e-6, 1e-6)
    dt = time.perf_counter() - t0
    n0 = rel(rep.matrix[0, 0], PI / 8)
    ok = criterion(10, rep.passed and n0 <= 1e-6 and dt <= 120,
                   f"CDH_2_10 N=4 off-diagonal {rep.max_offdiag_rel:.1e}, diagonal {rep.max_diag_rel_err:.1e}, "
                   f"n=0 vs pi/8 {n0:.1e} (<= 1e-6), {dt:.1f} s")
    assert ok


def test_11_generated_gram(criterion):
    rep = verify_case(case("GEN_2_6", beta=0.0, gamma=0.0, mu=0.5, route="closed"), 4, 1e-6, 1e-6)
    expected = [PI**2 / (2 * math.factorial(n)) * math.gamma(n + 2) for n in range(4)]
    printed = max(rel(a, b) for a, b in zip(np.diag(rep.matrix), expected))
    ok = criterion(11, rep.passed and printed <= 1e-6,
                   f"GEN_2_6 n,m<=3 off-diagonal {rep.max_offdiag_rel:.1e}, diagonal {printed:.1e} (<= 1e-6)")
    assert ok


def test_12_route_equivalence(criterion):
    worst = {}
    grid = ((0.0, 0.0), (1.5, 0.2), (0.5, 1.0))
    for n in range(4):
        for (alpha, beta), mu, tau in itertools.product(grid, (0.5, 1.0), (0.3, 1.7)):
            p = dict(alpha=alpha, beta=beta, mu=mu, eta=mu)
            e = rel(kl_image_integral("F_2_5", n, tau, p), kl_image_closed("F_2_9", n, tau, p))
            worst["exp-weight"] = max(worst.get("exp-weight", 0.0), e)
        for (alpha, gamma_), tau in itertools.product(grid, (0.4, 0.9)):
            form = "F_2_14" if n % 2 else "F_2_13"
            e = rel(kl_image_integral("F_2_5", n, tau, dict(alpha=alpha, beta=gamma_, mu=0.0, eta=1.0)),
                    kl_image_closed(form, n, tau, dict(alpha=alpha, gamma=gamma_)))
            worst["parity-split"] = max(worst.get("parity-split", 0.0), e)
            e = rel(kl_image_integral("G_2_16", n, tau, dict(alpha=alpha, beta=gamma_, mu=0.0, eta=2.0)),
                    kl_image_closed("G_2_21", n, tau, dict(alpha=alpha, gamma=gamma_, eta=2.0)))
            worst["sqrt-kernel"] = max(worst.get("sqrt-kernel", 0.0), e)
    a = verify_case(case("GEN_2_6", route="closed"), 3).matrix
    b = verify_case(case("GEN_2_6", route="integral"), 3).matrix
    worst["gram routes"] = float(np.max(np.abs(a - b) / np.sqrt(np.outer(np.diag(a), np.diag(a)))))
    parts = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    ok = criterion(12, max(worst.values()) <= 1e-7, f"route equivalence n<=3: {parts} (<= 1e-7)")
    assert ok


def test_13_convolution_orthogonality(criterion):
    t0 = time.perf_counter()
    reps = [verify_case(case(cid, a=1.0, b=1.0, c=0.3), 2, 1e-4, 1e-4) for cid in ("CONV_2_28", "CONV_2_34")]
    dt = time.perf_counter() - t0
    parts = ", ".join(f"{r.case_id} off {r.max_offdiag_rel:.1e} diag {r.max_diag_rel_err:.1e}" for r in reps)
    ok = criterion(13, all(r.passed for r in reps) and dt <= 900, f"{parts} (<= 1e-4), {dt:.1f} s (<= 900 s)")
    assert ok


def test_14_d_orthogonality(criterion):
    xs, ts = [], []
    for cid in ("DORTH_3_17", "DORTH_3_18", "DORTH_3_19", "DORTH_3_20"):
        for n in (1, 2):
            rep = d_orth_check(cid, 0.5, 1.0, n)
            xs += rep.x_residuals
            ts += rep.tau_residuals
    ok = criterion(14, max(ts) <= 1e-6 and max(xs) <= 1e-8,
                   f"d-orthogonality index residual {max(ts):.1e} (<= 1e-6), x residual {max(xs):.1e} (<= 1e-8)")
    assert ok


def test_15_wilson_symmetry(criterion):
    params = (1.0, 0.5, 0.7, 1.2)
    worst = 0.0
    for n in range(4):
        for t in (0.3, 0.9, 2.0):
            base = wilson(n, t, *params)
            for p in itertools.permutations(params):
                worst = max(worst, rel(wilson(n, t, *p), base))
    ok = criterion(15, worst <= 1e-12, f"Wilson 24 permutations max rel {worst:.1e} (<= 1e-12)")
    assert ok


def test_16_rho_moments(criterion):
    worst = 0.0
    for nu, s in ((0.5, 1.0), (1.0, 1.5)):
        q = integrate_semiinf(lambda x: rho_nu(nu, x) * x ** (s - 1), SqrtExpDecay(2.0), TIGHT, s - 1).value
        worst = max(worst, rel(q, math.gamma(s) * math.gamma(s + nu)))
    ok = criterion(16, worst <= 1e-8, f"rho moments max rel {worst:.1e} (<= 1e-8)")
    assert ok
