"""Kontorovich-Lebedev transform, inversion, Parseval sides and q-weights.

Every index integral is assembled from the scaled kernel
``exp(pi tau/2 + y) K_{i tau}(y)``; the leftover exponentials are folded in
analytically (``sinh(pi tau) exp(-pi tau) = (1 - exp(-2 pi tau)) / 2``), so
nothing overflows up to ``tau = 40``.
"""
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError
from .quad import (
    ExpDecay,
    IndexDecay,
    OffsetExpDecay,
    OffsetSqrtDecay,
    QuadSpec,
    SqrtExpDecay,
    StretchedExpDecay,
    combine,
    integrate_semiinf,
    integrate_tau_index,
)
from .specfun import kiv_scaled

PI = math.pi


@dataclass(frozen=True)
class Bounded:
    exponent: float = 0.0


@dataclass(frozen=True)
class LogSingularity:
    exponent: float = 0.0


@dataclass(frozen=True)
class PowerSingularity:
    exponent: float

    def __post_init__(self):
        if not self.exponent > -1:
            raise DomainError("power singularity must be integrable (exponent > -1)")


@dataclass(frozen=True)
class RealFunction:
    """A vectorized real function on ``(0, inf)`` with declared decay and origin behavior.

    ``origin`` describes ``f(x)`` as ``x -> 0``: ``Bounded()`` for a finite
    limit, ``PowerSingularity(p)`` for ``O(x**p)`` (``p`` may be positive, to
    declare a zero), ``LogSingularity()``.
    """
    eval: Callable
    decay: object
    origin: object = Bounded()
    name: str = ""

    def __call__(self, x):
        return np.asarray(self.eval(x), dtype=float)

    @property
    def origin_exponent(self):
        return self.origin.exponent


@dataclass(frozen=True)
class TransformSpec:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("transform needs alpha > 0")
        if self.beta == 0:
            raise DomainError("transform needs beta != 0")


PLAIN = TransformSpec()
HAT = TransformSpec(2.0, 0.5)


def origin_of(exponent):
    """Origin behavior ``O(x**exponent)``."""
    return Bounded() if exponent == 0 else PowerSingularity(exponent)


def zero_function(decay=ExpDecay(1.0)):
    # O(x) at the origin, so the zero function is admissible wherever f(x)/x must be
    return RealFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)), decay, PowerSingularity(1.0), "0")


def _debug_check(f):
    """Spot-sample ``f`` against its declared decay when ``KLORTHO_DEBUG`` is set."""
    if not os.environ.get("KLORTHO_DEBUG"):
        return
    L = QuadSpec().log_cut
    x_far = 0.5 * f.decay.upper(L)
    ref = max(float(np.max(np.abs(f(np.array([0.5, 1.0, 2.0]))))), 1e-300)
    far = abs(float(f(np.array([x_far]))[0]))
    if far > ref * math.exp(-0.25 * L + 30):
        raise DomainError(f"{f.name or 'function'} does not decay as declared: |f({x_far:g})| = {far:g}")


def _kernel_profile(spec, tau_max=0.0):
    # exp(pi tau/2) K_{i tau}(y) only starts to fall like exp(-y) past y ~ pi tau / 2
    a, b = spec.alpha, spec.beta
    y0 = 0.5 * PI * tau_max
    if b == 1:
        return OffsetExpDecay(y0 / a, a) if y0 else ExpDecay(a)
    if b == 0.5:
        return OffsetSqrtDecay(y0 / a, a) if y0 else SqrtExpDecay(a)
    if b > 0:
        return StretchedExpDecay(a, b)
    return None


def _integrand_profile(f, spec, tau_max=0.0):
    kp = _kernel_profile(spec, tau_max)
    return f.decay if kp is None else combine(kp, f.decay)


def _require(res, what):
    if not res.converged:
        raise ConvergenceError(f"{what} did not converge (error estimate {res.err_estimate:.3g})")
    return res.value


def _as_taus(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("index tau must be non-negative")
    return np.abs(tau)


def kl_forward_scaled(f, tau, spec=PLAIN, quad=QuadSpec()):
    """``exp(pi tau / 2) (F_{alpha,beta} f)(tau)`` as a ``QuadResult``; ``tau`` may be an array."""
    taus = _as_taus(tau)
    tcol = taus.reshape(-1, 1)
    a, b = spec.alpha, spec.beta

    def integrand(x):
        y = a * x**b
        return kiv_scaled(tcol, y) * (np.exp(-y) * f(x))

    _debug_check(f)
    profile = _integrand_profile(f, spec, float(np.max(taus)) if taus.size else 0.0)
    res = integrate_semiinf(integrand, profile, quad, f.origin_exponent)
    return type(res)(res.value.reshape(taus.shape), res.err_estimate, res.evaluations, res.converged, res.history)


def kl_forward(f, tau, spec=PLAIN, quad=QuadSpec()):
    """``int_0^inf K_{i tau}(alpha x**beta) f(x) dx``."""
    taus = _as_taus(tau)
    val = _require(kl_forward_scaled(f, taus, spec, quad), "KL transform")
    return _scalar(val * np.exp(-0.5 * PI * taus))


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def sinh_weight(tau):
    """``tau sinh(pi tau) exp(-pi tau)``, the index weight after scaling."""
    return 0.5 * tau * -np.expm1(-2.0 * PI * tau)


def kl_inverse(F, x, spec=PLAIN, quad=QuadSpec(), decay=None, scaled=False):
    """``(2|beta| / (pi**2 x)) int_0^inf tau sinh(pi tau) K_{i tau}(alpha x**beta) F(tau) d tau``.

    ``decay`` declares the exponential rate of the whole integrand in ``tau``
    and is required. With ``scaled=True`` the callable returns
    ``exp(pi tau / 2) F(tau)``.
    """
    if decay is None:
        raise DomainError("inversion needs a declared index decay (integrand must converge absolutely)")
    xs = np.asarray(x, dtype=float)
    if np.any(~(xs > 0)):
        raise DomainError("inversion point must be positive")
    y = (spec.alpha * xs**spec.beta).reshape(-1, 1)

    def h(tau):
        Ft = np.asarray(F(tau), dtype=float)
        if scaled:
            w = sinh_weight(tau) * Ft
        else:
            w = sinh_weight(tau) * np.exp(0.5 * PI * tau) * Ft
        return kiv_scaled(tau, y) * np.exp(-y) * w

    res = integrate_tau_index(h, quad, decay)
    val = _require(res, "KL inversion").reshape(xs.shape)
    return _scalar(2.0 * abs(spec.beta) / (PI**2 * xs) * val)


def kernel_cosine_inverse(x, u, quad=QuadSpec()):
    """``(2/pi) int_0^inf K_{i tau}(x) cos(tau u) d tau``, which should equal ``exp(-x cosh u)``."""
    xs = np.asarray(x, dtype=float).reshape(-1, 1)

    def h(tau):
        return kiv_scaled(tau, xs) * np.exp(-xs - 0.5 * PI * tau) * np.cos(tau * u)

    res = integrate_tau_index(h, quad, IndexDecay(0.5 * PI))
    return _scalar(2.0 / PI * _require(res, "cosine inversion").reshape(np.shape(x)))


def parseval_residual(f, g, spec=PLAIN, quad=QuadSpec(), decay=IndexDecay(1.0)):
    """Both sides of the Parseval equality: ``(int f g x dx, (2|beta|/pi**2) int tau sinh(pi tau) Ff Fg d tau)``."""
    lhs_prof = combine(f.decay, g.decay)
    lhs = _require(
        integrate_semiinf(lambda x: f(x) * g(x) * x, lhs_prof, quad, f.origin_exponent + g.origin_exponent + 1),
        "Parseval x-side",
    )

    def h(tau):
        Ff = _require(kl_forward_scaled(f, tau, spec, quad), "KL transform")
        Fg = Ff if g is f else _require(kl_forward_scaled(g, tau, spec, quad), "KL transform")
        return sinh_weight(tau) * (Ff * Fg)

    rhs = _require(integrate_tau_index(h, quad, decay), "Parseval index side")
    return float(lhs), float(2.0 * abs(spec.beta) / PI**2 * rhs)


# --- Lemma-1 forms: cosine-Laplace and sine forms ----------------------------------


def _laplace(f, u, power):
    """``int_0^inf exp(-x cosh u) f(x) x**power dx`` at every ``u``, after ``x = xi / cosh u``."""
    c = np.cosh(u).reshape(-1, 1)

    def integrand(xi):
        x = xi / c
        return np.exp(-xi) * f(x) * x**power / c

    return integrand


def lemma1_forms(f, tau, form="cosine_laplace", quad=QuadSpec()):
    """Transform of ``f(x)/x`` through a cosine-Laplace or a sine composition.

    ``cosine_laplace``: ``int cos(tau u) int exp(-x cosh u) f(x) dx/x du``;
    ``sine``: ``(1/tau) int sin(tau u) sinh(u) int exp(-x cosh u) f(x) dx du``.
    """
    e = f.origin_exponent
    if form == "cosine_laplace":
        if not e > 0:
            raise DomainError("f(x)/x must be integrable at 0")
        power, osc, rate = -1.0, np.cos, e
    elif form == "sine":
        if tau <= 0:
            raise DomainError("the sine form needs tau > 0")
        power, osc, rate = 0.0, np.sin, e
    else:
        raise DomainError(f"unknown form {form!r}")
    inner_prof = ExpDecay(1.0)

    def outer(u):
        inner = integrate_semiinf(_laplace(f, u, power), inner_prof, quad, e + power)
        val = _require(inner, "Laplace inner integral")
        if form == "sine":
            val = val * np.sinh(u)
        return osc(tau * u) * val

    res = integrate_semiinf(outer, ExpDecay(min(rate, 1.0) if form == "sine" else rate), quad)
    val = _require(res, "Lemma-1 outer integral")
    return float(val / tau) if form == "sine" else float(val)


def sine_laplace_tail(f, u, quad=QuadSpec()):
    """``sinh(u) int exp(-x cosh u) f(x) dx``, which must vanish as ``u -> inf``."""
    us = np.atleast_1d(np.asarray(u, dtype=float))
    res = integrate_semiinf(_laplace(f, us, 0.0), ExpDecay(1.0), quad, f.origin_exponent)
    val = np.sinh(us) * _require(res, "Laplace integral")
    return _scalar(val.reshape(np.shape(u)))


# --- weight q -----------------------------------------------------------------------


def weight_q(omega, tau, variant="plain", quad=QuadSpec()):
    """The convolution weight ``q(tau)``.

    ``plain``: ``int K_{i tau}(x) omega(x) dx/x``;
    ``hat``:   ``int K_{i tau}(2 sqrt x) omega(x) dx/x``;
    ``sine``:  ``(1/sinh(pi tau/2)) int sin(tau u) phi(sinh u) du`` with
    ``phi(v) = int sin(x v) omega(x) dx/x``.
    """
    taus = _as_taus(tau)
    e = omega.origin_exponent - 1.0
    if variant in ("plain", "hat"):
        if not e > -1:
            raise DomainError("omega(x)/x must be integrable at 0")
        g = RealFunction(lambda x: omega(x) / x, omega.decay, origin_of(e))
        spec = PLAIN if variant == "plain" else HAT
        return kl_forward(g, taus, spec, quad)
    if variant == "sine":
        if np.any(taus <= 0):
            raise DomainError("the sine form of q needs tau > 0")
        return _scalar(np.array([_q_sine(omega, t, quad) for t in taus.ravel()]).reshape(taus.shape))
    raise DomainError(f"unknown q variant {variant!r}")


def _q_sine(omega, tau, quad):
    p = omega.origin_exponent

    def outer(u):
        return np.sin(tau * u) * fourier_sine_weight(omega, np.sinh(u), quad)

    res = integrate_semiinf(outer, ExpDecay(min(p, 1.0)), quad, 1.0)
    return _require(res, "sine-form q") / math.sinh(0.5 * PI * tau)


def fourier_sine_weight(omega, v, quad=QuadSpec()):
    """``phi(v) = int_0^inf sin(x v) omega(x) dx / x`` for an array of ``v >= 0``.

    Small ``v`` use the half-line DE rule; large ``v`` the Ooura-Mori rule,
    whose nodes approach the zeros of the sine doubly exponentially.
    """
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape)
    flat = out.reshape(-1)
    vf = v.reshape(-1)
    e = omega.origin_exponent - 1.0
    small = (vf > 0) & (vf <= 4.0)
    if small.any():
        vs = vf[small].reshape(-1, 1)
        res = integrate_semiinf(lambda x: np.sin(x * vs) * omega(x) / x, omega.decay, quad, e + 1.0)
        flat[small] = _require(res, "Fourier sine transform")
    large = vf > 4.0
    if large.any():
        flat[large] = _ooura_mori_sine(lambda x: omega(x) / x, vf[large], quad)
    return out


def _ooura_mori_sine(g, v, quad):
    v = v.reshape(-1, 1)
    prev = None
    for level in range(quad.max_refinements + 2):
        h = 0.2 / 2**level
        M = PI / h
        n = np.arange(math.floor(-4.0 / h), math.ceil(4.5 / h) + 1)
        t = n * h
        s = 6.0 * np.sinh(t)
        em = np.exp(-s)
        denom = -np.expm1(-s)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            psi = np.where(n == 0, 1.0 / 6.0, t / denom)
            dpsi = np.where(n == 0, 0.5, (denom - 6.0 * t * np.cosh(t) * em) / denom**2)
        keep = psi > 0
        psi, dpsi = psi[keep], dpsi[keep]
        x = M * psi / v
        # sin(M psi) = sin(M (psi - t)) * (-1)**n: small near the sine zeros
        vals = g(x) * np.sin(M * psi) * dpsi
        cur = (M / v[:, 0]) * h * vals.sum(axis=-1)
        if prev is not None and np.all(np.abs(cur - prev) <= np.maximum(quad.abs_tol, quad.rel_tol * np.abs(cur))):
            return cur
        prev = cur
    raise ConvergenceError("Ooura-Mori sine transform did not converge")


@dataclass(frozen=True)
class PositivityReport:
    taus: tuple
    values: tuple
    minimum: float
    negative: tuple


def lemma2_positivity_scan(omega, taus, quad=QuadSpec(), tol=1e-10, variant="plain"):
    """Evaluate ``q`` on a grid and list the points where it dips below ``-tol``."""
    taus = np.asarray(taus, dtype=float)
    q = np.atleast_1d(weight_q(omega, taus, variant, quad))
    neg = tuple(float(t) for t, v in zip(taus, q) if v < -tol)
    return PositivityReport(tuple(map(float, taus)), tuple(map(float, q)), float(q.min()), neg)
