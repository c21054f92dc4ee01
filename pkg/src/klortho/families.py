"""Polynomial families, the functions they generate, and their KL images.

Conjugate parameter pairs ``a + i t``, ``a - i t`` enter every polynomial
here as ``(a + i t)_k (a - i t)_k = prod_j ((a + j)**2 + t**2)``, so the
Askey-type and Prudnikov-type sums are formed in real arithmetic and are
exactly real. Only the three-term image with separate ``Gamma(+-i tau)``
factors is genuinely complex before cancellation.

Degrees are limited to ``n <= 10``; beyond that the alternating sums lose
too many digits in double precision.
"""
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import ConvergenceError, DomainError
from .kl_core import RealFunction, TransformSpec, kl_forward, origin_of
from .quad import ExpDecay, NoDecay, QuadSpec, SqrtExpDecay
from .specfun import (
    complex_lngamma,
    gamma_abs_sq,
    hyp_series,
    hyp_terminating,
    kv_scaled,
    pochhammer,
    rho_nu_scaled,
)

N_MAX = 10
SQRT_PI = math.sqrt(math.pi)
# imaginary residue tolerated before a complex result is declared real
IMAG_TOL = 1e-10
Q315_TAU_MIN = 0.05

_ABC = ("a", "b", "c")
_ABCD = ("a", "b", "c", "d")
_NU_ALPHA = ("nu", "alpha")

FAMILY_PARAMS = MappingProxyType({
    "Laguerre": ("alpha",),
    "Wilson": _ABCD,
    "CDH": _ABC,
    "CDH_f_2_23": _ABC,
    "CDH_g_2_24": _ABC,
    "CDHconv_f_2_31": _ABC,
    "CDHconv_g_2_32": _ABC,
    "Wilson_f_2_37": _ABCD,
    "Wilson_g_2_38": _ABCD,
    "Wilsonconv_f_2_42": _ABCD,
    "Wilsonconv_g_2_43": _ABCD,
    "Prudnikov_p": _NU_ALPHA,
    "Prudnikov_V": _NU_ALPHA,
    "Prudnikov_S": _NU_ALPHA,
    "Prudnikov_S39": _NU_ALPHA,
    "Prudnikov_U310": _NU_ALPHA,
})

GENERATED = (
    "CDH_f_2_23", "CDH_g_2_24", "CDHconv_f_2_31", "CDHconv_g_2_32",
    "Wilson_f_2_37", "Wilson_g_2_38", "Wilsonconv_f_2_42", "Wilsonconv_g_2_43",
)
_COEFF_FAMILIES = ("Prudnikov_S39", "Prudnikov_U310")


@dataclass(frozen=True)
class CoefficientTable:
    """Lower-triangular coefficient rows; row ``n`` holds ``k = 0..n``."""
    rows: tuple
    family: str = ""

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in r) for r in self.rows)
        for n, r in enumerate(rows):
            if len(r) != n + 1:
                raise DomainError(f"coefficient row {n} has {len(r)} entries, expected {n + 1}")
            if not all(math.isfinite(v) for v in r):
                raise DomainError(f"coefficient row {n} has a non-finite entry")
        object.__setattr__(self, "rows", rows)

    def row(self, n):
        if not 0 <= n < len(self.rows):
            raise DomainError(f"coefficient table{' ' + self.family if self.family else ''} has no row {n}")
        return np.array(self.rows[n])

    @property
    def degree(self):
        return len(self.rows) - 1


@dataclass(frozen=True)
class FamilySpec:
    id: str
    params: MappingProxyType = field(default_factory=dict)
    coeffs: CoefficientTable = None

    def __post_init__(self):
        if self.id not in FAMILY_PARAMS:
            raise DomainError(f"unknown family {self.id!r}")
        names = FAMILY_PARAMS[self.id]
        extra = set(self.params) - set(names)
        if extra:
            raise DomainError(f"family {self.id} has no parameter {sorted(extra)[0]!r}")
        missing = [k for k in names if k not in self.params]
        if missing:
            raise DomainError(f"family {self.id} needs parameter {missing[0]!r}")
        p = {k: float(self.params[k]) for k in names}
        object.__setattr__(self, "params", MappingProxyType(p))
        _validate(self.id, p)
        if self.id in _COEFF_FAMILIES and self.coeffs is None:
            raise DomainError(f"family {self.id} needs a coefficient table")


def family(id, coeffs=None, **params):
    return FamilySpec(id, params, coeffs)


def _validate(fid, p):
    if fid == "Laguerre":
        if not p["alpha"] > -1:
            raise DomainError("Laguerre needs alpha > -1")
    elif fid.startswith("Prudnikov"):
        if not (p["nu"] >= 0 and p["alpha"] > 0):
            raise DomainError("Prudnikov families need nu >= 0 and alpha > 0")
    else:
        if not all(v > 0 for v in p.values()):
            raise DomainError(f"{fid} needs positive parameters")
        if "conv" in fid and not p["c"] < 0.5:
            raise DomainError(f"{fid} needs 0 < c < 1/2")


def _check_n(n):
    if int(n) != n or not 0 <= n <= N_MAX:
        raise DomainError(f"degree must be an integer in [0, {N_MAX}], got {n!r}")
    return int(n)


def _pair(a, t, k):
    """``(a + i t)_k (a - i t)_k`` for real ``a``, ``t``."""
    out = np.ones_like(np.asarray(t, dtype=float))
    for j in range(k):
        out = out * ((a + j) ** 2 + t * t)
    return out


def _hyp_pairs(n, top, pairs, bottom, z, t):
    """Terminating ``pFq`` with real ``top``/``bottom`` and conjugate pairs ``a +- i t``.

    ``top`` must contain ``-n``; the sum stops at ``k = n``.
    """
    t = np.asarray(t, dtype=float)
    term = np.ones_like(t)
    total = term.copy()
    for k in range(n):
        r = z / (k + 1)
        for a in top:
            r = r * (a + k)
        for b in bottom:
            r = r / (b + k)
        term = term * r
        for a in pairs:
            term = term * ((a + k) ** 2 + t * t)
        total = total + term
    return total


def _real(z, what, scale=None):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        ref = np.abs(z.real) if scale is None else scale
        if np.any(np.abs(z.imag) > IMAG_TOL * np.maximum(ref, 1e-300)):
            raise ConvergenceError(f"{what}: imaginary residue above {IMAG_TOL:g} after cancellation")
        z = z.real
    return float(z) if z.ndim == 0 else z


# --- polynomials ---------------------------------------------------------------


def laguerre(n, alpha, x):
    """``L_n^alpha(x) = sum_k (-1)**k binom(n+alpha, n-k) x**k / k!``."""
    n = _check_n(n)
    if not alpha > -1:
        raise DomainError("Laguerre needs alpha > -1")
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(n + 1):
        # binom(n+alpha, n-k) = (alpha+k+1)_{n-k} / (n-k)!
        c = pochhammer(alpha + k + 1.0, n - k) / math.factorial(n - k)
        total = total + (-1) ** k * c * x**k / math.factorial(k)
    return float(total) if total.ndim == 0 else total


def askey_poly(fam, n, t):
    """Wilson ``W_n(t**2)`` or continuous dual Hahn ``S_n(t**2)``."""
    n = _check_n(n)
    t = np.asarray(t, dtype=float)
    if fam.id == "Wilson":
        a, b, c, d = (fam.params[k] for k in _ABCD)
        pre = pochhammer(a + b, n) * pochhammer(a + c, n) * pochhammer(a + d, n)
        val = pre * _hyp_pairs(n, (-n, n + a + b + c + d - 1.0), (a,), (a + b, a + c, a + d), 1.0, t)
    elif fam.id == "CDH":
        a, b, c = (fam.params[k] for k in _ABC)
        pre = pochhammer(a + b, n) * pochhammer(a + c, n)
        val = pre * _hyp_pairs(n, (-n,), (a,), (a + b, a + c), 1.0, t)
    else:
        raise DomainError(f"askey_poly takes Wilson or CDH, not {fam.id}")
    return float(val) if val.ndim == 0 else val


def wilson(n, t, a, b, c, d):
    return askey_poly(family("Wilson", a=a, b=b, c=c, d=d), n, t)


def cdh(n, t, a, b, c):
    return askey_poly(family("CDH", a=a, b=b, c=c), n, t)


def _poly_monomial(row, x):
    x = np.asarray(x, dtype=float)
    return np.polynomial.polynomial.polyval(x, row)


def prudnikov_poly(fam, n, arg):
    """Prudnikov-type polynomials: ``p_n(x)``, ``V_n``, ``S_n``, and the table-driven sums.

    ``arg`` is ``x`` for ``p`` and ``tau`` for the others. The prefactor of
    ``p``, ``V`` and ``S`` is ``(-1)**n (1+alpha)_n (1+alpha+nu)_n``.
    """
    n = _check_n(n)
    nu, al = fam.params["nu"], fam.params["alpha"]
    arg = np.asarray(arg, dtype=float)
    pre = (-1) ** n * pochhammer(1.0 + al, n) * pochhammer(1.0 + al + nu, n)
    if fam.id == "Prudnikov_p":
        val = pre * np.real(hyp_terminating([-n], [1.0 + al, 1.0 + al + nu], arg, n))
    elif fam.id == "Prudnikov_V":
        val = pre * _hyp_pairs(n, (-n,), (1.0 + nu, 1.0), (0.5 * (nu + 2), 0.5 * (nu + 3), 1.0 + al, 1.0 + al + nu), 0.25, arg)
    elif fam.id == "Prudnikov_S":
        val = pre * _hyp_pairs(n, (-n,), (2.0 + nu, 1.0), (0.5 * (nu + 3), 0.5 * (nu + 4), 1.0 + al, 1.0 + al + nu), 0.25, arg)
    elif fam.id == "Prudnikov_S39":
        row = fam.coeffs.row(n)
        val = sum(row[k] * _pair(1.0, arg, k) for k in range(n + 1))
    elif fam.id == "Prudnikov_U310":
        row = fam.coeffs.row(n)
        val = sum(
            row[k] / pochhammer(2 * al + nu, 2 * k) * _pair(al + nu, arg, k) * _pair(al, arg, k)
            for k in range(n + 1)
        )
    else:
        raise DomainError(f"prudnikov_poly does not evaluate {fam.id}")
    val = np.asarray(val, dtype=float)
    return float(val) if val.ndim == 0 else val


# --- generated functions --------------------------------------------------------


def _gen_parts(fam, n):
    """``(power, exp_damped, prefactor, top, bottom, z_scale, lead)`` of a generated family."""
    p = fam.params
    a, b, c = p["a"], p["b"], p["c"]
    d = p.get("d")
    fid = fam.id
    first = fid.endswith(("2_23", "2_31", "2_37", "2_42"))
    lead = a if first else b
    if fid.startswith("CDH"):
        bottom = (a + b, lead + c)
        sums = ()
    else:
        bottom = (a + b, lead + c, lead + d)
        sums = (n + a + b + c + d - 1.0,)
    pre = 1.0
    for v in bottom:
        pre *= pochhammer(v, n)
    if "conv" in fid:
        return lead - 1.0, True, 2.0**lead / SQRT_PI * pre, (-n,) + sums + (lead + 0.5,), bottom, 2.0, lead
    return lead - 1.0, False, 2.0 * pre, (-n,) + sums, bottom, 1.0, lead


def generated_function(fam, n, x):
    """Value at ``x > 0`` of the generated family member of degree ``n``."""
    n = _check_n(n)
    if fam.id not in GENERATED:
        raise DomainError(f"{fam.id} is not a generated family")
    x = np.asarray(x, dtype=float)
    power, damped, pre, top, bottom, zs, _ = _gen_parts(fam, n)
    poly = np.real(hyp_terminating(top, bottom, zs * x, n))
    log_env = power * np.log(x) - (x if damped else 0.0)
    val = pre * np.exp(log_env) * poly
    return float(val) if val.ndim == 0 else val


def family_function(fam, n):
    """The generated member as a ``RealFunction`` carrying decay and origin data."""
    power, damped, *_ = _gen_parts(fam, _check_n(n))
    decay = ExpDecay(1.0) if damped else NoDecay()
    return RealFunction(lambda x: generated_function(fam, n, x), decay, origin_of(power), f"{fam.id}[{n}]")


def family_stack(fam, ns):
    """Callable ``y -> (len(ns), *y.shape)`` for stacked convolutions."""
    ns = [_check_n(n) for n in ns]
    return lambda y: np.stack([generated_function(fam, n, y) for n in ns])


def generated_image(fam, n, tau):
    """Closed-form KL image of a generated member.

    The ``x**(a-1)`` polynomial families go through the half-order transform
    ``int K_{i tau}(2 sqrt x) f(x) dx``; the ``e**(-x)`` families through the
    plain transform ``int K_{i tau}(x) f(x) dx``.
    """
    n = _check_n(n)
    if fam.id not in GENERATED:
        raise DomainError(f"{fam.id} is not a generated family")
    tau = np.asarray(tau, dtype=float)
    p = fam.params
    *_, lead = _gen_parts(fam, n)
    base = family("Wilson", **{k: p[k] for k in _ABCD}) if "d" in p else family("CDH", **{k: p[k] for k in _ABC})
    if "conv" in fam.id:
        val = gamma_abs_sq(lead, tau) * askey_poly(base, n, tau) / math.gamma(lead + 0.5)
    else:
        val = gamma_abs_sq(lead, 0.5 * tau) * askey_poly(base, n, 0.5 * tau)
    return float(val) if np.ndim(val) == 0 else val


# --- KL images ------------------------------------------------------------------

IMAGE_INTEGRALS = ("F_2_5", "G_2_16", "Q_3_11_left", "Q_3_11_right", "q_3_14_left", "q_3_14_right")
IMAGE_CLOSED = ("F_2_9", "F_2_12", "F_2_13", "F_2_14", "G_2_21", "Q_3_13", "q_3_15", "q_3_16")


def _need(params, *names):
    missing = [k for k in names if k not in params]
    if missing:
        raise DomainError(f"missing parameter {missing[0]!r}")
    return [float(params[k]) for k in names]


def _laguerre_weight(n, alpha, beta, mu):
    if not (alpha > -1 and beta > -1 and 0 <= mu <= 1):
        raise DomainError("need alpha, beta > -1 and 0 <= mu <= 1")

    def f(x):
        return np.exp(beta * np.log(x) - mu * x) * laguerre(n, alpha, x)

    return f


def _coeff_row(coeffs, n):
    if coeffs is None:
        raise DomainError("this image needs a coefficient table")
    return coeffs.row(n)


def _image_function(weight, n, params, coeffs):
    """The ``(RealFunction, TransformSpec)`` whose transform defines an image."""
    if weight in ("F_2_5", "G_2_16"):
        alpha, beta, mu, eta = _need(params, "alpha", "beta", "mu", "eta")
        if not eta > 0:
            raise DomainError("need eta > 0")
        f = _laguerre_weight(n, alpha, beta, mu)
        decay = ExpDecay(mu) if mu > 0 else NoDecay()
        spec = TransformSpec(eta, 1.0 if weight == "F_2_5" else 0.5)
        return RealFunction(f, decay, origin_of(beta), weight), spec
    (nu,) = _need(params, "nu")
    if not 0 < nu < 2:
        raise DomainError("need 0 < nu < 2")
    row = _coeff_row(coeffs, n)
    if weight == "Q_3_11_left":
        def f(x):
            return _poly_monomial(row, x) * np.exp((0.5 * nu - 1.0) * np.log(x) - x)

        return RealFunction(f, ExpDecay(1.0), origin_of(0.5 * nu - 1.0), weight), TransformSpec(2.0, 0.5)
    if weight == "Q_3_11_right":
        def f(x):
            r = 2.0 * np.sqrt(x)
            return _poly_monomial(row, x) * kv_scaled(nu, r) * np.exp(-r)

        return RealFunction(f, SqrtExpDecay(2.0), origin_of(-0.5 * nu), weight), TransformSpec(2.0, 0.5)
    if weight == "q_3_14_left":
        def f(x):
            return _poly_monomial(row, x) * np.exp(-1.0 / x - 2.0 * np.log(x))

        return RealFunction(f, NoDecay(), origin_of(0.0), weight), TransformSpec(2.0, 0.5)
    if weight == "q_3_14_right":
        def f(x):
            return _poly_monomial(row, x) * rho_nu_scaled(nu, x) * np.exp(-2.0 * np.sqrt(x))

        return RealFunction(f, SqrtExpDecay(2.0), origin_of(0.0), weight), TransformSpec(2.0, 0.5)
    raise DomainError(f"unknown image integral {weight!r}")


def kl_image_integral(weight, n, tau, params, coeffs=None, quad=QuadSpec()):
    """A family's KL image computed from its defining ``x``-integral.

    ``F_2_5``: ``int x**beta e**(-mu x) L_n^alpha(x) K_{i tau}(eta x) dx``;
    ``G_2_16``: the same with ``K_{i tau}(eta sqrt x)``. The Prudnikov-type
    images take the polynomial from ``coeffs`` (monomial basis).
    """
    n = _check_n(n)
    f, spec = _image_function(weight, n, params, coeffs)
    return kl_forward(f, tau, spec, quad)


def image_function(weight, n, params, coeffs=None):
    """The function behind ``kl_image_integral`` and its transform variant."""
    return _image_function(weight, _check_n(n), params, coeffs)


def _lag_coeff(n, alpha, k):
    # (-1)^k binom(n+alpha, n-k) / k! = (-n)_k (1+alpha)_n / (n! (1+alpha)_k k!)
    return pochhammer(-n, k) * pochhammer(1.0 + alpha, n) / (math.factorial(n) * pochhammer(1.0 + alpha, k) * math.factorial(k))


def _f_2_9(n, tau, alpha, beta, mu):
    if not 0 < mu <= 1:
        raise DomainError("need 0 < mu <= 1")
    pre = SQRT_PI / ((2 * mu) ** (beta + 1) * math.factorial(n)) * pochhammer(1.0 + alpha, n) / math.gamma(beta + 1.5)
    s = _hyp_pairs(n, (-n,), (beta + 1.0,), (alpha + 1.0, beta + 1.5), 1.0 / (2 * mu), tau)
    return pre * gamma_abs_sq(beta + 1.0, tau) * s


def _f_2_12(n, tau, alpha, gamma_, mu):
    """``int x**gamma e**(-(1-mu) x) L_n^alpha(x) K_{i tau}(mu x) dx`` via Gauss functions."""
    if not 0 < mu <= 1:
        raise DomainError("need 0 < mu <= 1")
    z = 1.0 - 1.0 / (2 * mu)
    total = 0.0
    for k in range(n + 1):
        s = k + gamma_ + 1.0
        f21 = hyp_series([s + 1j * tau, s - 1j * tau], [s + 0.5], z)
        f21 = _real(f21, "Gauss function of a conjugate pair")
        total = total + _lag_coeff(n, alpha, k) * gamma_abs_sq(s, tau) / ((2 * mu) ** s * math.gamma(s + 0.5)) * f21
    return SQRT_PI * total


def _f_2_13_14(n, tau, alpha, gamma_):
    """``int x**gamma L_n^alpha(x) K_{i tau}(x) dx`` in the split even/odd form."""
    m, odd = divmod(n, 2)
    pre = pochhammer(1.0 + alpha, n) * 2.0**gamma_ / math.factorial(n)
    g1 = gamma_abs_sq(0.5 * (gamma_ + 1.0), 0.5 * tau)
    g2 = gamma_abs_sq(0.5 * (gamma_ + 2.0), 0.5 * tau)
    lo1 = (0.5, 0.5 * (1.0 + alpha), 1.0 + 0.5 * alpha)
    lo2 = (1.5, 1.0 + 0.5 * alpha, 0.5 * (3.0 + alpha))
    if odd:
        h1 = _hyp_pairs(m, (-m, -0.5 - m), (0.5 * (gamma_ + 1.0),), lo1, 1.0, 0.5 * tau)
        h2 = _hyp_pairs(m, (-m, 0.5 - m), (0.5 * (gamma_ + 2.0),), lo2, 1.0, 0.5 * tau)
    else:
        h1 = _hyp_pairs(m, (-m, 0.5 - m), (0.5 * (gamma_ + 1.0),), lo1, 1.0, 0.5 * tau)
        h2 = _hyp_pairs(max(m - 1, 0), (1.0 - m, 0.5 - m), (0.5 * (gamma_ + 2.0),), lo2, 1.0, 0.5 * tau) if m else 0.0
    return pre * (0.5 * g1 * h1 - n / (1.0 + alpha) * g2 * h2)


def _g_2_21(n, tau, alpha, gamma_, eta):
    z = 4.0 / eta**2
    pre = pochhammer(1.0 + alpha, n) / (2.0 * math.factorial(n)) * z ** (gamma_ + 1.0)
    return pre * gamma_abs_sq(gamma_ + 1.0, 0.5 * tau) * _hyp_pairs(n, (-n,), (gamma_ + 1.0,), (1.0 + alpha,), z, 0.5 * tau)


def _q_3_13(n, tau, nu, row):
    h = 0.5 * tau
    pre = 0.25 * gamma_abs_sq(1.0 + 0.5 * nu, h) * gamma_abs_sq(1.0 - 0.5 * nu, h)
    s = sum(row[k] / pochhammer(2.0, 2 * k) * _pair(1.0 + 0.5 * nu, h, k) * _pair(1.0 - 0.5 * nu, h, k) for k in range(n + 1))
    return pre * s


def _q_3_15(n, tau, nu, row):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < Q315_TAU_MIN):
        raise DomainError(f"this image is evaluated only for tau >= {Q315_TAU_MIN} (separate Gamma(+-i tau) poles)")
    h = 0.5 * tau
    z = 1j * h
    lg_pos = complex_lngamma(1j * tau)
    lg_neg = complex_lngamma(-1j * tau)
    first = 0.5 * gamma_abs_sq(-1.0, h)
    t1 = 0.0
    t2 = 0.0
    t3 = 0.0
    scale = 0.0
    for k in range(n + 1):
        a1 = row[k] * _pair(-1.0, h, k) * hyp_series([], [2.0 - k + z, 2.0 - k - z], -1.0)
        a2 = row[k] * np.exp(lg_neg + complex_lngamma(1.0 - k - z)) * hyp_series([], [k + z, 1.0 + 1j * tau], -1.0)
        a3 = row[k] * np.exp(lg_pos + complex_lngamma(1.0 - k + z)) * hyp_series([], [k - z, 1.0 - 1j * tau], -1.0)
        t1, t2, t3 = t1 + a1, t2 + a2, t3 + a3
        scale = scale + np.abs(first * a1) + 0.5 * (np.abs(a2) + np.abs(a3))
    val = first * t1 + 0.5 * (t2 + t3)
    return _real(val, "three-term image", scale=np.maximum(np.abs(np.real(val)), 1e-16 * scale))


def _q_3_16(n, tau, nu, row):
    h = 0.5 * tau
    pre = gamma_abs_sq(1.0 + nu, h) * gamma_abs_sq(1.0, h) / (2.0 * math.gamma(2.0 + nu))
    s = sum(row[k] / pochhammer(2.0 + nu, 2 * k) * _pair(1.0 + nu, h, k) * _pair(1.0, h, k) for k in range(n + 1))
    return pre * s


def kl_image_closed(form, n, tau, params, coeffs=None):
    """Closed-form KL images.

    ``F_2_9``   ``int x**beta e**(-mu x) L_n^alpha K_{i tau}(mu x) dx`` (params alpha, beta, mu);
    ``F_2_12``  ``int x**gamma e**(-(1-mu) x) L_n^alpha K_{i tau}(mu x) dx`` (alpha, gamma, mu);
    ``F_2_13``/``F_2_14``  ``int x**gamma L_n^alpha K_{i tau}(x) dx``, even/odd ``n`` (alpha, gamma);
    ``G_2_21``  ``int x**gamma L_n^alpha K_{i tau}(eta sqrt x) dx`` (alpha, gamma, eta);
    ``Q_3_13``, ``q_3_15``, ``q_3_16``  half-order images of the coefficient-table
    polynomials times ``K_nu(2 sqrt x)``, ``e**(-1/x) x**-2`` and ``rho_nu`` (nu).
    """
    n = _check_n(n)
    tau = np.abs(np.asarray(tau, dtype=float))
    if form == "F_2_9":
        val = _f_2_9(n, tau, *_need(params, "alpha", "beta", "mu"))
    elif form == "F_2_12":
        val = _f_2_12(n, tau, *_need(params, "alpha", "gamma", "mu"))
    elif form in ("F_2_13", "F_2_14"):
        if (n % 2 == 1) != (form == "F_2_14"):
            raise DomainError(f"{form} covers {'odd' if form == 'F_2_14' else 'even'} degrees only")
        val = _f_2_13_14(n, tau, *_need(params, "alpha", "gamma"))
    elif form == "G_2_21":
        val = _g_2_21(n, tau, *_need(params, "alpha", "gamma", "eta"))
    elif form in ("Q_3_13", "q_3_15", "q_3_16"):
        (nu,) = _need(params, "nu")
        if not 0 < nu < 2:
            raise DomainError("need 0 < nu < 2")
        fn = {"Q_3_13": _q_3_13, "q_3_15": _q_3_15, "q_3_16": _q_3_16}[form]
        val = fn(n, tau, nu, _coeff_row(coeffs, n))
    else:
        raise DomainError(f"unknown closed form {form!r}")
    val = np.asarray(val, dtype=float)
    return float(val) if val.ndim == 0 else val
