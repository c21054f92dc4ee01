"""Macdonald-function kernels: numba loops and a pure-numpy twin.

Both kernels evaluate the integral representation by the trapezoidal rule
on a truncated half-line, halving the step until the change falls below
``rtol`` times the integral of ``|integrand|``. The integrands are even and
decay doubly exponentially, so the trapezoidal rule converges geometrically.

``kiv`` returns ``exp(pi*tau/2 + x) * K_{i tau}(x)``. The representation

    K_{i tau}(x) = int_0^inf exp(-x cosh u) cos(tau u) du

is moved onto the line ``u + i*theta``; on that line the integrand carries the
factor ``exp(-tau*theta)`` explicitly, so for ``theta`` close to ``pi/2`` no
cancellation below ``exp(-pi*tau/2)`` takes place. ``theta`` is placed at the
saddle height ``asin(tau/x)`` when ``tau < x`` and capped at
``pi/2 - THETA_GAP/tau`` otherwise.

For ``tau >= 1`` and ``x*x <= 2*tau`` the ascending series

    K_{i tau}(x) = Re[Gamma(i tau) (x/2)**(-i tau) 0F1(; 1 - i tau; x*x/4)]

is used instead; its terms shrink from the first one, and
``exp(pi*tau/2) |Gamma(i tau)|`` is known in closed form, so only the phase of
the gamma function is computed. On that range the shifted integrand would
oscillate fast in its tail and need thousands of nodes.

``kv`` returns ``exp(log_factor + x) * K_nu(x)`` for real ``nu``; the
``log_factor`` is folded into the exponent so that ``x**(nu/2) K_nu(2 sqrt x)``
style products do not overflow for small ``x``.
"""
import cmath
import math

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import ConvergenceError

HALF_PI = 0.5 * math.pi
# log-units dropped at the truncation point: ln(1/1e-15) + 40
LOG_CUT = 75.0
THETA_GAP = 1.5
KERNEL_RTOL = 1e-14
MAX_LEVELS = 20
MIN_LEVELS = 1
LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@njit
def _kiv_setup(tau, x):
    if tau > 0.0:
        theta = min(math.asin(min(1.0, tau / x)), HALF_PI - min(HALF_PI, THETA_GAP / tau))
    else:
        theta = 0.0
    c = math.cos(theta)
    s = math.sin(theta)
    a0 = tau * (HALF_PI - theta) + x * (1.0 - c)
    xc = x * c
    ustar = math.acosh(1.0 + LOG_CUT / xc)
    h = min(0.5, ustar / 8.0)
    if tau > 0.0:
        h = min(h, 2.0 * math.pi / (4.0 * tau))
    n = int(math.ceil(ustar / h))
    return s, a0, xc, n, ustar / n


@njit
def _kv_setup(nu, x, log_factor):
    um = math.asinh(nu / x)
    peak = _kv_logint(um, nu, x)
    # bracket the truncation point beyond the peak, then bisect
    lo = um
    hi = um + 1.0
    while _kv_logint(hi, nu, x) > peak - LOG_CUT:
        lo = hi
        hi = um + 2.0 * (hi - um)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _kv_logint(mid, nu, x) > peak - LOG_CUT:
            lo = mid
        else:
            hi = mid
    ustar = hi
    width = 1.0 / math.sqrt(math.sqrt(nu * nu + x * x) + 1.0)
    h = min(0.5, ustar / 8.0, 0.5 * width)
    n = int(math.ceil(ustar / h))
    return n, ustar / n


@njit
def _kv_logint(u, nu, x):
    y = nu * u
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0) - 2.0 * x * math.sinh(0.5 * u) ** 2


@njit
def _arg_gamma_1p(tau):
    """Continuous ``Im log Gamma(1 + i tau)``: upward shift, then Stirling."""
    ph = 0.0
    for k in range(1, 11):
        ph -= math.atan2(tau, float(k))
    w = complex(11.0, tau)
    wi = 1.0 / w
    w2 = wi * wi
    tail = wi * (1.0 / 12.0 + w2 * (-1.0 / 360.0 + w2 * (1.0 / 1260.0 + w2 * (-1.0 / 1680.0 + w2 * (
        1.0 / 1188.0 + w2 * (-691.0 / 360360.0 + w2 * (1.0 / 156.0 - w2 * (3617.0 / 122400.0))))))))
    s = (w - 0.5) * cmath.log(w) - w + LN_SQRT_2PI + tail
    return ph + s.imag


@njit
def _kiv_series(tau, x):
    amp = math.sqrt(2.0 * math.pi / (tau * -math.expm1(-2.0 * math.pi * tau)))
    phase = _arg_gamma_1p(tau) - 0.5 * math.pi - tau * math.log(0.5 * x)
    q = 0.25 * x * x
    term = complex(1.0, 0.0)
    total = term
    k = 0
    while abs(term) > 1e-17 * abs(total):
        k += 1
        term = term * q / (k * complex(k, -tau))
        total += term
    return amp * math.exp(x) * (math.cos(phase) * total.real - math.sin(phase) * total.imag)


@njit
def _kiv_point(tau, x, rtol):
    if tau >= 1.0 and x * x <= 2.0 * tau:
        return _kiv_series(tau, x), True
    s, a0, xc, n, h = _kiv_setup(tau, x)
    total = 0.5 * math.exp(a0)
    absum = total
    for k in range(1, n + 1):
        u = k * h
        f = math.exp(a0 - 2.0 * xc * math.sinh(0.5 * u) ** 2) * math.cos(tau * u - x * s * math.sinh(u))
        total += f
        absum += abs(f)
    prev = h * total
    for level in range(1, MAX_LEVELS + 1):
        h *= 0.5
        for k in range(n):
            u = (2 * k + 1) * h
            f = math.exp(a0 - 2.0 * xc * math.sinh(0.5 * u) ** 2) * math.cos(tau * u - x * s * math.sinh(u))
            total += f
            absum += abs(f)
        n *= 2
        cur = h * total
        if level >= MIN_LEVELS and abs(cur - prev) <= rtol * h * absum:
            return cur, True
        prev = cur
    return prev, False


@njit
def _kv_point(nu, x, log_factor, rtol):
    n, h = _kv_setup(nu, x, log_factor)
    total = 0.5 * math.exp(log_factor + _kv_logint(0.0, nu, x))
    for k in range(1, n + 1):
        total += math.exp(log_factor + _kv_logint(k * h, nu, x))
    prev = h * total
    for level in range(1, MAX_LEVELS + 1):
        h *= 0.5
        for k in range(n):
            total += math.exp(log_factor + _kv_logint((2 * k + 1) * h, nu, x))
        n *= 2
        cur = h * total
        if level >= MIN_LEVELS and abs(cur - prev) <= rtol * cur:
            return cur, True
        prev = cur
    return prev, False


@njit
def _kiv_loop(tau, x, rtol, out, ok):
    for i in range(tau.size):
        v, good = _kiv_point(tau[i], x[i], rtol)
        out[i] = v
        ok[i] = good


@njit
def _kv_loop(nu, x, log_factor, rtol, out, ok):
    for i in range(nu.size):
        v, good = _kv_point(nu[i], x[i], log_factor[i], rtol)
        out[i] = v
        ok[i] = good


# ---------------------------------------------------------------------------
# numpy path: per-point refinement, vectorized over the abscissae


def _kiv_point_np(tau, x, rtol):
    if tau >= 1.0 and x * x <= 2.0 * tau:
        return _kiv_series_np(tau, x), True
    s, a0, xc, n, h = _kiv_setup(tau, x)

    def f(u):
        return np.exp(a0 - 2.0 * xc * np.sinh(0.5 * u) ** 2) * np.cos(tau * u - x * s * np.sinh(u))

    vals = f(h * np.arange(1, n + 1))
    head = 0.5 * math.exp(a0)
    total = head + vals.sum()
    absum = head + np.abs(vals).sum()
    prev = h * total
    for level in range(1, MAX_LEVELS + 1):
        h *= 0.5
        vals = f(h * np.arange(1, 2 * n, 2))
        total += vals.sum()
        absum += np.abs(vals).sum()
        n *= 2
        cur = h * total
        if level >= MIN_LEVELS and abs(cur - prev) <= rtol * h * absum:
            return cur, True
        prev = cur
    return prev, False


def _kiv_series_np(tau, x):
    amp = math.sqrt(2.0 * math.pi / (tau * -math.expm1(-2.0 * math.pi * tau)))
    phase = _arg_gamma_1p(tau) - 0.5 * math.pi - tau * math.log(0.5 * x)
    # enough terms for 1e-17: ratio of successive terms is below q / (k * tau)
    q = 0.25 * x * x
    k = np.arange(1, 40)
    terms = np.concatenate(([1.0 + 0j], np.cumprod(q / (k * (k - 1j * tau)))))
    total = terms.sum()
    return amp * math.exp(x) * (math.cos(phase) * total.real - math.sin(phase) * total.imag)


def _kv_point_np(nu, x, log_factor, rtol):
    n, h = _kv_setup(nu, x, log_factor)
    ln2 = math.log(2.0)

    def f(u):
        y = nu * u
        return np.exp(log_factor + y + np.log1p(np.exp(-2.0 * y)) - ln2 - 2.0 * x * np.sinh(0.5 * u) ** 2)

    total = 0.5 * float(f(np.zeros(1))[0]) + f(h * np.arange(1, n + 1)).sum()
    prev = h * total
    for level in range(1, MAX_LEVELS + 1):
        h *= 0.5
        total += f(h * np.arange(1, 2 * n, 2)).sum()
        n *= 2
        cur = h * total
        if level >= MIN_LEVELS and abs(cur - prev) <= rtol * cur:
            return cur, True
        prev = cur
    return prev, False


def _kiv_loop_np(tau, x, rtol, out, ok):
    for i in range(tau.size):
        out[i], ok[i] = _kiv_point_np(float(tau[i]), float(x[i]), rtol)


def _kv_loop_np(nu, x, log_factor, rtol, out, ok):
    for i in range(nu.size):
        out[i], ok[i] = _kv_point_np(float(nu[i]), float(x[i]), float(log_factor[i]), rtol)


_kiv_loop_nb = _kiv_loop if USE_NUMBA else None
_kv_loop_nb = _kv_loop if USE_NUMBA else None


class KernelConvergenceError(ConvergenceError):
    pass


def _run(loop, arrays, rtol):
    shape = np.broadcast(*arrays).shape
    flat = [np.ascontiguousarray(np.broadcast_to(np.asarray(a, dtype=np.float64), shape)).ravel() for a in arrays]
    out = np.empty(flat[0].size)
    ok = np.ones(flat[0].size, dtype=np.bool_)
    loop(*flat, rtol, out, ok)
    if not ok.all():
        bad = np.flatnonzero(~ok)[0]
        raise KernelConvergenceError(
            "Macdonald kernel did not converge at " + ", ".join(f"{a[bad]!r}" for a in flat)
        )
    return out.reshape(shape)


def kiv(tau, x, rtol=KERNEL_RTOL, backend=None):
    """``exp(pi*tau/2 + x) * K_{i tau}(x)`` for broadcastable ``tau >= 0``, ``x > 0``."""
    loop = _select(backend, _kiv_loop_nb, _kiv_loop_np)
    return _run(loop, (np.abs(tau), x), rtol)


def kv(nu, x, log_factor=0.0, rtol=KERNEL_RTOL, backend=None):
    """``exp(log_factor + x) * K_nu(x)`` for broadcastable real ``nu``, ``x > 0``."""
    loop = _select(backend, _kv_loop_nb, _kv_loop_np)
    return _run(loop, (np.abs(nu), x, log_factor), rtol)


def _select(backend, nb, py):
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        if nb is None:
            raise RuntimeError("numba backend unavailable (not installed or disabled)")
        return nb
    if backend == "numpy":
        return py
    raise ValueError(f"unknown backend {backend!r}")
