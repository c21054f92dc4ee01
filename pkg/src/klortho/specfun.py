"""Scalar special functions: log-gamma, Pochhammer, hypergeometric sums, K.

All functions broadcast over numpy arrays. Complex quantities are numpy
``complex128`` values (Python ``complex`` for scalars).

Accuracy targets, all inside the supported box ``nu <= 10``, ``tau <= 40``,
``0 < x <= 200``, degrees ``n <= 10``:

* ``complex_lngamma``: 1e-13 relative in ``exp(result)`` for ``|z| <= 50``.
* ``besselk_real`` / ``besselk_imag``: about 1e-13 relative, measured against
  the largest value of the integrand for oscillating ``K_{i tau}``.
"""
import math

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, PoleError

NU_MAX = 10.0
TAU_MAX = 40.0
X_MAX = 200.0
POLE_TOL = 1e-10

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# B_{2k} / (2k (2k-1)), k = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_SHIFT_TO = 10.0


def _check_pole(z, what):
    near = (z.real <= POLE_TOL) & (np.abs(z.imag) <= POLE_TOL) & (np.abs(z.real - np.round(z.real)) <= POLE_TOL)
    if np.any(near):
        bad = np.asarray(z)[near].ravel()[0]
        raise PoleError(f"{what} at pole z = {complex(bad)!r}")


def _scalarize(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def complex_lngamma(z):
    """Log-gamma on the principal branch (cut along the negative real axis).

    Shifts ``z`` upward until ``Re z >= 10`` and applies Stirling's series; the
    shift uses principal logarithms, which keeps the result analytic off the
    negative real axis and equal to the usual ``loggamma``.
    """
    z = np.asarray(z, dtype=np.complex128)
    _check_pole(z, "log-gamma")
    w = z.copy()
    shift = np.zeros_like(z)
    while True:
        low = w.real < _SHIFT_TO
        if not low.any():
            break
        shift[low] += np.log(w[low])
        w[low] += 1.0
    wi = 1.0 / w
    w2 = wi * wi
    tail = np.zeros_like(w)
    for c in reversed(_STIRLING):
        tail = tail * w2 + c
    res = (w - 0.5) * np.log(w) - w + _LN_SQRT_2PI + wi * tail - shift
    return _scalarize(res)


def lngamma_abs_sq(a, t):
    """``log |Gamma(a + i t)|**2`` for real ``a``, ``t``."""
    return 2.0 * np.real(complex_lngamma(np.asarray(a, dtype=float) + 1j * np.asarray(t, dtype=float)))


def gamma_abs_sq(a, t):
    """``Gamma(a + i t) * Gamma(a - i t)`` as a positive real number."""
    return np.exp(lngamma_abs_sq(a, t))


def pochhammer(z, n):
    """Rising factorial ``(z)_n = z (z+1) ... (z+n-1)``; ``(z)_0 = 1``."""
    if int(n) != n or n < 0:
        raise DomainError(f"Pochhammer index must be a non-negative integer, got {n!r}")
    z = np.asarray(z)
    out = np.ones_like(z, dtype=np.result_type(z, float))
    for k in range(int(n)):
        out = out * (z + k)
    return _scalarize(out)


def _as_params(params):
    return [np.asarray(p, dtype=np.complex128) for p in params]


def hyp_terminating(top, bottom, z, n):
    """Terminating ``pFq(top; bottom; z)``: the ``n + 1`` terms up to ``k = n``.

    One of ``top`` is expected to equal ``-n``; the sum is cut after ``k = n``
    regardless. Terms come from the ratio recurrence, summed in order.
    """
    n = int(n)
    if n < 0:
        raise DomainError("termination index must be non-negative")
    top, bottom = _as_params(top), _as_params(bottom)
    z = np.asarray(z, dtype=np.complex128)
    term = np.ones(np.broadcast(z, *top, *bottom).shape, dtype=np.complex128)
    total = term.copy()
    for k in range(n):
        num = z / (k + 1)
        for a in top:
            num = num * (a + k)
        for b in bottom:
            bk = b + k
            if np.any(np.abs(bk) <= POLE_TOL):
                raise PoleError(f"bottom parameter reaches zero at k = {k}")
            num = num / bk
        term = term * num
        total = total + term
    return _scalarize(total)


def hyp_series(top, bottom, z, rtol=1e-16, max_terms=100000):
    """Convergent ``pFq`` series for ``p <= q`` (entire) or ``p = q + 1``, ``|z| < 1``.

    For ``2F1`` with real ``z < 0`` the Pfaff transformation
    ``2F1(a, b; c; z) = (1-z)**(-a) 2F1(a, c-b; c; z/(z-1))`` is applied first.
    Supported ``2F1`` arguments are real ``z <= 1/2``.
    """
    top, bottom = _as_params(top), _as_params(bottom)
    z = np.asarray(z, dtype=np.complex128)
    p, q = len(top), len(bottom)
    if p > q + 1:
        raise DomainError(f"{p}F{q} diverges for z != 0")
    if p == 2 and q == 1:
        if np.any(np.abs(z.imag) > 0) or np.any(z.real > 0.5):
            raise DomainError("2F1 supported only for real z <= 1/2")
        neg = z.real < 0
        if np.any(neg):
            a, b = top
            (c,) = bottom
            shape = np.broadcast(a, b, c, z).shape
            a, b, c, zz = (np.broadcast_to(v, shape) for v in (a, b, c, z))
            w = np.where(neg, zz / (zz - 1.0), zz)
            b2 = np.where(neg, c - b, b)
            pref = np.where(neg, (1.0 - zz) ** (-a), 1.0)
            return _scalarize(pref * _sum_series([a, b2], [c], w, rtol, max_terms))
    elif p == q + 1 and np.any(np.abs(z) >= 1):
        raise DomainError(f"{p}F{q} series needs |z| < 1")
    return _scalarize(_sum_series(top, bottom, z, rtol, max_terms))


def _sum_series(top, bottom, z, rtol, max_terms):
    shape = np.broadcast(z, *top, *bottom).shape
    term = np.ones(shape, dtype=np.complex128)
    total = term.copy()
    small = np.zeros(shape, dtype=int)
    for k in range(max_terms):
        num = z / (k + 1)
        for a in top:
            num = num * (a + k)
        for b in bottom:
            bk = b + k
            if np.any(np.abs(bk) <= POLE_TOL):
                raise PoleError(f"bottom parameter reaches zero at k = {k}")
            num = num / bk
        term = term * num
        total = total + term
        # two consecutive negligible terms, to step over isolated small ones
        tiny = np.abs(term) <= rtol * np.abs(total)
        small = np.where(tiny, small + 1, 0)
        if np.all((small >= 2) | (term == 0)):
            return total
    raise ConvergenceError(f"hypergeometric series did not converge in {max_terms} terms")


def _check_box(nu=None, tau=None, x=None):
    if nu is not None and np.any(np.abs(nu) > NU_MAX):
        raise DomainError(f"order outside supported box |nu| <= {NU_MAX}")
    if tau is not None and np.any(np.abs(tau) > TAU_MAX):
        raise DomainError(f"index outside supported box |tau| <= {TAU_MAX}")
    if x is not None:
        if np.any(~(np.asarray(x) > 0)):
            raise DomainError("Macdonald function needs x > 0")
        if np.any(np.asarray(x) > X_MAX):
            raise DomainError(f"argument outside supported box x <= {X_MAX}")


def besselk_real(nu, x):
    """``K_nu(x)`` for real order, by trapezoidal quadrature of the cosh integral."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_box(nu=nu, x=x)
    return _scalarize(_kernels.kv(nu, x) * np.exp(-x))


def besselk_imag(tau, x, scaled=False):
    """``K_{i tau}(x)``, or ``exp(pi tau / 2) K_{i tau}(x)`` when ``scaled``.

    Even in ``tau``; negative indices are folded onto ``|tau|``.
    """
    tau = np.abs(np.asarray(tau, dtype=float))
    x = np.asarray(x, dtype=float)
    _check_box(tau=tau, x=x)
    log_scale = -x if scaled else -x - 0.5 * math.pi * tau
    return _scalarize(_kernels.kiv(tau, x) * np.exp(log_scale))


def kiv_scaled(tau, x):
    """``exp(pi tau / 2 + x) K_{i tau}(x)``, unchecked; the quadrature workhorse."""
    return _kernels.kiv(tau, x)


def kv_scaled(nu, x, log_factor=0.0):
    """``exp(log_factor + x) K_nu(x)``, unchecked."""
    return _kernels.kv(nu, x, log_factor)


def rho_nu(nu, x):
    """``2 x**(nu/2) K_nu(2 sqrt(x))``."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(nu <= 0):
        raise DomainError("rho_nu needs nu > 0")
    if np.any(~(x > 0)):
        raise DomainError("rho_nu needs x > 0")
    _check_box(nu=nu)
    return _scalarize(rho_nu_scaled(nu, x) * np.exp(-2.0 * np.sqrt(x)))


def rho_nu_scaled(nu, x):
    """``exp(2 sqrt(x)) rho_nu(x)`` without box checks."""
    r = np.sqrt(x)
    return 2.0 * _kernels.kv(nu, 2.0 * r, 0.5 * nu * np.log(x))
