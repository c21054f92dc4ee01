"""KL convolution, its half-order variant, and the identities around them.

With ``y = t exp(w)`` the convolution becomes

    (f*g)(x) = exp(-x)/(2x) int g(t) t int f(t e^w) e^w
                   exp(-x (cosh w - 1) - t**2 e^w / (2x)) dw dt,

and with ``y = t exp(2w)`` the half-order ("hat") convolution becomes

    (f^g)(x) = exp(-2 sqrt x)/(2x) int g(t) t int f(t e^{2w}) e^{2w}
                   exp(-2 sqrt(x) (cosh w - 1) - t e^w / sqrt(x)) dw dt.

The inner ``w``-integral runs over the whole line by the trapezoidal rule
(doubly exponential decay on both sides); the outer ``t``-integral by the
half-line DE rule. ``conv_scaled`` returns the value without the leading
``exp(-x)`` / ``exp(-2 sqrt x)``, which lets weights growing like ``exp(x)``
be paired analytically.
"""
import math

import numpy as np

from .errors import ConvergenceError, DomainError
from .kl_core import (
    HAT,
    PI,
    PLAIN,
    RealFunction,
    _require,
    kl_forward,
    kl_forward_scaled,
    origin_of,
    sinh_weight,
)
from .quad import (
    ExpDecay,
    IndexDecay,
    OffsetExpDecay,
    OffsetSqrtDecay,
    QuadSpec,
    SqrtExpDecay,
    combine,
    integrate_algebraic_tail,
    integrate_semiinf,
    integrate_tau_index,
)
from .specfun import kiv_scaled, kv_scaled

STANDARD = "standard"
HAT_KIND = "hat"
KINDS = (STANDARD, HAT_KIND)

INNER_SPEC = QuadSpec(rel_tol=1e-8)
MIDDLE_SPEC = QuadSpec(rel_tol=1e-7)
OUTER_SPEC = QuadSpec(rel_tol=1e-6)


def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError(f"unknown convolution kind {kind!r}")


def _stacked(f):
    """Callable returning ``(k, *shape)``; plain ``RealFunction``s get ``k = 1``."""
    if isinstance(f, RealFunction):
        return lambda y: f(y)[None]
    return f


def _w_integral(F, t, x, kind, spec):
    """Inner integral over ``w`` for every ``t`` node: shape ``(k, nt)``."""
    L = spec.log_cut
    if kind == STANDARD:
        W = math.acosh(1.0 + L / x)
        lam, mu, pw = x, 0.5 / x, 1
        tt = (t * t)[:, None]
    else:
        r = math.sqrt(x)
        W = math.acosh(1.0 + L / (2.0 * r))
        lam, mu, pw = 2.0 * r, 1.0 / r, 2
        tt = t[:, None]

    def phi(w):
        ew = np.exp(w)[None, :]
        y = t[:, None] * ew**pw
        damp = ew**pw * np.exp(-2.0 * lam * np.sinh(0.5 * w) ** 2 - mu * tt * ew)
        return F(y) * damp

    n = 8
    h = W / n
    total = phi(h * np.arange(-n, n + 1)).sum(axis=-1)
    prev = h * total
    for _ in range(spec.max_refinements + 4):
        h *= 0.5
        total = total + phi(h * (2 * np.arange(-n, n) + 1)).sum(axis=-1)
        n *= 2
        cur = h * total
        # per t node: the t-integrand spans many decades and its tail matters
        scale = np.max(np.abs(cur), axis=0, keepdims=True)
        scale = np.maximum(scale, 1e-30 * np.max(scale))
        if np.all(np.abs(cur - prev) <= spec.rel_tol * scale + 1e-300):
            return cur
        prev = cur
    raise ConvergenceError(f"inner convolution integral did not converge at x = {x!r}")


def _t_profile(x, kind, g_decay):
    if kind == STANDARD:
        own = OffsetExpDecay(x)
    else:
        own = OffsetSqrtDecay(math.sqrt(x))
    return own if g_decay is None else combine(own, g_decay)


def conv_scaled(f, g, x, kind=STANDARD, quad=MIDDLE_SPEC, inner=INNER_SPEC, origin=None, g_decay=None):
    """``exp(x) (f*g)(x)`` or ``exp(2 sqrt x) (f^g)(x)`` at each ``x``.

    ``f`` and ``g`` are ``RealFunction``s, or callables returning a stack of
    function values ``(k, *y.shape)``; the result then has shape
    ``(kf, kg, *x.shape)`` (squeezed for plain functions). ``origin`` is the
    ``t``-origin exponent of the outer integrand, ``g_decay`` the decay of
    ``g``; both are read from ``RealFunction`` inputs when omitted.
    """
    _check_kind(kind)
    plain = isinstance(f, RealFunction) and isinstance(g, RealFunction)
    if origin is None:
        origin = f.origin_exponent + g.origin_exponent + 1.0
    if g_decay is None and isinstance(g, RealFunction):
        g_decay = g.decay
    F, G = _stacked(f), _stacked(g)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs > 0)):
        raise DomainError("convolution point must be positive")
    out = []
    for xv in xs.ravel():
        xv = float(xv)

        def integrand(t):
            I = _w_integral(F, t, xv, kind, inner)
            return np.einsum("in,jn->ijn", I, G(t) * t)

        res = integrate_semiinf(integrand, _t_profile(xv, kind, g_decay), quad, origin, joint=not plain,
                                lower_scale=min(xv, 1.0))
        out.append(_require(res, "convolution") / (2.0 * xv))
    val = np.stack(out, axis=-1).reshape(out[0].shape + xs.shape)
    if plain:
        val = val[0, 0]
    if np.ndim(x) == 0:
        val = val[..., 0]
    return val


def convolve(f, g, x, kind=STANDARD, quad=MIDDLE_SPEC):
    """``(f*g)(x)`` (``kind="standard"``) or the half-order convolution (``kind="hat"``)."""
    _check_kind(kind)
    s = conv_scaled(f, g, x, kind, quad)
    xs = np.asarray(x, dtype=float)
    damp = np.exp(-xs) if kind == STANDARD else np.exp(-2.0 * np.sqrt(xs))
    out = s * damp
    return float(out) if np.ndim(out) == 0 else out


def _conv_origin(f, g):
    return min(f.origin_exponent, g.origin_exponent, 0.0)


def factorization_residual(f, g, tau, quad=OUTER_SPEC):
    """``(F(f*g)(tau), Ff(tau) Fg(tau))``."""
    tau = abs(float(tau))

    def integrand(x):
        s = np.array([conv_scaled(f, g, xv) for xv in x])
        return kiv_scaled(tau, x) * np.exp(-2.0 * x) * s

    res = integrate_semiinf(integrand, ExpDecay(2.0), quad, _conv_origin(f, g))
    lhs = _require(res, "transform of the convolution") * math.exp(-0.5 * PI * tau)
    rhs = kl_forward(f, tau) * kl_forward(g, tau)
    return float(lhs), float(rhs)


def parseval_type_eval(f, g, x, quad=QuadSpec()):
    """``(2/(x pi**2)) int tau sinh(pi tau) K_{i tau}(x) Ff Fg d tau``."""
    xs = np.asarray(x, dtype=float)
    xc = xs.reshape(-1, 1)

    def h(tau):
        Ff = _require(kl_forward_scaled(f, tau, PLAIN, quad), "KL transform")
        Fg = _require(kl_forward_scaled(g, tau, PLAIN, quad), "KL transform")
        return sinh_weight(tau) * np.exp(-0.5 * PI * tau) * kiv_scaled(tau, xc) * Ff * Fg

    val = _require(integrate_tau_index(h, quad, IndexDecay(0.5 * PI)), "Parseval-type integral")
    out = 2.0 / (PI**2 * xs) * np.exp(-xs) * val.reshape(xs.shape)
    return float(out) if out.ndim == 0 else out


def weighted_functional(f, g, omega, kind=STANDARD, quad=OUTER_SPEC, index_quad=QuadSpec()):
    """Both sides of the weighted convolution identity.

    ``lhs = int (f*g)(x) omega(x) dx``; ``rhs`` is the index integral with the
    weight ``q`` (``kind="standard"``: factor ``2/pi**2``, kernel ``K(x)``;
    ``kind="hat"``: factor ``1/pi**2``, kernel ``K(2 sqrt x)``).
    """
    _check_kind(kind)
    if kind == STANDARD:
        prof, damp, spec, factor = ExpDecay(1.0), (lambda x: np.exp(-x)), PLAIN, 2.0 / PI**2
    else:
        prof, damp, spec, factor = SqrtExpDecay(2.0), (lambda x: np.exp(-2.0 * np.sqrt(x))), HAT, 1.0 / PI**2

    def integrand(x):
        s = np.array([conv_scaled(f, g, xv, kind) for xv in x])
        return damp(x) * s * omega(x)

    origin = _conv_origin(f, g) + omega.origin_exponent
    lhs = _require(integrate_semiinf(integrand, combine(prof, omega.decay), quad, origin), "weighted functional")

    w_over_x = RealFunction(lambda x: omega(x) / x, omega.decay, origin_of(omega.origin_exponent - 1.0))

    def h(tau):
        Ff = _require(kl_forward_scaled(f, tau, spec, index_quad), "KL transform")
        Fg = _require(kl_forward_scaled(g, tau, spec, index_quad), "KL transform")
        q = _require(kl_forward_scaled(w_over_x, tau, spec, index_quad), "weight q")
        return sinh_weight(tau) * np.exp(-0.5 * PI * tau) * Ff * Fg * q

    rhs = _require(integrate_tau_index(h, index_quad, IndexDecay(0.5 * PI)), "weighted index integral")
    return float(lhs), float(factor * rhs)


def kernel_index_integral(x, y, t, quad=QuadSpec()):
    """``(4/pi**2) int tau sinh(pi tau) K_{i tau}(x) K_{i tau}(y) K_{i tau}(t) d tau``."""

    def h(tau):
        return sinh_weight(tau) * np.exp(-0.5 * PI * tau) * kiv_scaled(tau, x) * kiv_scaled(tau, y) * kiv_scaled(tau, t)

    val = _require(integrate_tau_index(h, quad, IndexDecay(0.5 * PI)), "kernel index integral")
    return float(4.0 / PI**2 * math.exp(-(x + y + t)) * val)


def convolution_kernel(x, y, t):
    """``exp(-(y**2 + t**2) x / (2 y t) - y t / (2 x))``."""
    return math.exp(-(y * y + t * t) * x / (2.0 * y * t) - y * t / (2.0 * x))


def kernel_bound(x, y, t, delta):
    """``24 delta / (pi (9 delta**2 - pi**2)) K0(x cos d) K0(y cos d) K0(t cos d)``, ``pi/3 < delta < pi/2``."""
    if not PI / 3 < delta < PI / 2:
        raise DomainError("the kernel bound needs pi/3 < delta < pi/2")
    c = math.cos(delta)
    args = np.array([x, y, t]) * c
    k0 = kv_scaled(0.0, args) * np.exp(-args)
    return float(24.0 * delta / (PI * (9.0 * delta**2 - PI**2)) * np.prod(k0))


def young_norms(f, g, p, quad=QuadSpec(rel_tol=1e-8)):
    """``(||f*g||, ||f|| ||g||)`` in ``L1(K0(p**2 x) dx)`` and ``L1(K0(p x) dx)``."""

    def norm(fun, scale):
        def integrand(x):
            return np.abs(fun(x)) * kv_scaled(0.0, scale * x) * np.exp(-scale * x)

        return _require(integrate_semiinf(integrand, combine(ExpDecay(scale), fun.decay), quad, fun.origin_exponent), "norm")

    conv = RealFunction(lambda x: convolve(f, g, x), ExpDecay(1.0), origin_of(_conv_origin(f, g)))
    lhs = norm(conv, p * p)
    return float(lhs), float(norm(f, p) * norm(g, p))


def conv_exp_weight(c, d, x, quad=QuadSpec(), scaled=False):
    """``x**(d-1) int_0^inf K_d(x+y) (x+y)**(-d) e**y y**(c+d-1) dy``.

    The integrand behaves like ``y**(c+d-1)`` at 0 and ``y**(c-3/2)`` at
    infinity, so it converges exactly for ``c + d > 0`` and ``c < 1/2``.
    With ``scaled=True`` the result is multiplied by ``exp(x)``.
    """
    if not (c + d > 0 and c < 0.5):
        raise DomainError("conv_exp_weight converges only for c + d > 0 and c < 1/2")
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if np.any(~(xs > 0)):
        raise DomainError("conv_exp_weight needs x > 0")
    out = []
    for xv in xs:
        def integrand(y):
            s = xv + y
            return kv_scaled(d, s) * s ** (-d) * y ** (c + d - 1.0)

        # the y**(c+d-1) behaviour only holds for y below x; the tail is a function of x + y
        res = integrate_algebraic_tail(integrand, 1.5 - c, quad, c + d - 1.0, shift=1.0 + xv,
                                       lower_scale=min(xv, 1.0))
        out.append(xv ** (d - 1.0) * _require(res, "conv_exp_weight"))
    val = np.array(out)
    if not scaled:
        val = val * np.exp(-xs)
    val = val.reshape(np.shape(x))
    return float(val) if val.ndim == 0 else val
