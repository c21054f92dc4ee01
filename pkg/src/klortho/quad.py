"""Double-exponential quadrature on the half-line, index integrals, 2-D integrals.

Integrands are called with a numpy array of abscissae (always on the last
axis) and must return an array of the same trailing shape; leading axes are
carried through, so one call can integrate a whole matrix of functions on a
shared grid.

The half-line rule is the trapezoidal rule in ``t`` after a change of
variable ``x = phi(t)`` whose Jacobian kills both ends doubly exponentially:

* exponential-type decay: ``x = s exp(t - exp(-t))`` (``s`` = decay length);
* algebraic decay:        ``x = exp((pi/2) sinh t)``.

Each refinement halves the step and evaluates only the new (odd) nodes. The
error estimate is the change between the last two levels.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError

TAU_CAP = 40.0
X_FLOOR = 1e-300


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_refinements: int = 8
    truncation_margin: float = 20.0

    def __post_init__(self):
        if not 0 < self.abs_tol < 1 or not 0 < self.rel_tol < 1:
            raise DomainError("tolerances must lie in (0, 1)")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be at least 1")

    @property
    def log_cut(self):
        """Log-scale truncation level ``ln(1/abs_tol) + margin``."""
        return math.log(1.0 / self.abs_tol) + self.truncation_margin


SPEC_2D = QuadSpec(rel_tol=1e-7)


@dataclass(frozen=True)
class QuadResult:
    value: object
    err_estimate: float
    evaluations: int
    converged: bool
    history: tuple = field(default=(), compare=False)


# --- decay profiles ---------------------------------------------------------


@dataclass(frozen=True)
class ExpDecay:
    """Integrand bounded by a multiple of ``exp(-rate x)``."""
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("decay rate must be positive")

    def upper(self, L):
        return L / self.rate

    def scale(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class SqrtExpDecay:
    """Integrand bounded by a multiple of ``exp(-rate sqrt(x))``."""
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("decay rate must be positive")

    def upper(self, L):
        return (L / self.rate) ** 2

    def scale(self):
        return 1.0 / self.rate**2


@dataclass(frozen=True)
class StretchedExpDecay:
    """Integrand bounded by a multiple of ``exp(-rate x**power)``, ``0 < power``."""
    rate: float
    power: float

    def __post_init__(self):
        if not self.rate > 0 or not self.power > 0:
            raise DomainError("stretched decay needs positive rate and power")

    def upper(self, L):
        return (L / self.rate) ** (1.0 / self.power)

    def scale(self):
        return (1.0 / self.rate) ** (1.0 / self.power)


@dataclass(frozen=True)
class DoubleExpDecay:
    """Integrand bounded by a multiple of ``exp(-exp(x))``."""

    def upper(self, L):
        return math.log(L)

    def scale(self):
        return 1.0


@dataclass(frozen=True)
class IndexDecay:
    """Index integrand decaying like ``exp(-delta_sum tau)``."""
    delta_sum: float

    def __post_init__(self):
        if not self.delta_sum > 0:
            raise DomainError("index decay rate must be positive")

    def upper(self, L):
        return L / self.delta_sum

    def scale(self):
        return 1.0 / self.delta_sum


@dataclass(frozen=True)
class AlgebraicDecay:
    """Integrand bounded by a multiple of ``x**(-power)``, ``power > 1``."""
    power: float

    def __post_init__(self):
        if not self.power > 1:
            raise DomainError("algebraic decay needs power > 1")

    def upper(self, L):
        return math.exp(min(L / (self.power - 1.0), 700.0))


@dataclass(frozen=True)
class OffsetExpDecay:
    """``exp(-rate (t - offset))`` beyond ``offset``."""
    offset: float
    rate: float = 1.0

    def upper(self, L):
        return self.offset + L / self.rate

    def scale(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class OffsetSqrtDecay:
    """``exp(-rate (sqrt t - offset))`` beyond ``offset**2``."""
    offset: float
    rate: float = 2.0

    def upper(self, L):
        return (self.offset + L / self.rate) ** 2

    def scale(self):
        return 1.0 / self.rate**2


@dataclass(frozen=True)
class NoDecay:
    """No decay of its own (polynomial growth); a partner factor must supply it."""

    def upper(self, L):
        return math.inf

    def scale(self):
        return 1.0


def combine(p, q):
    """Decay profile of a product of two integrands with profiles ``p`` and ``q``."""
    if type(p) is type(q) and isinstance(p, (ExpDecay, SqrtExpDecay, IndexDecay)):
        return type(p)(_rate(p) + _rate(q))
    # otherwise the faster of the two bounds
    L = QuadSpec().log_cut
    return p if p.upper(L) <= q.upper(L) else q


def _rate(p):
    return p.delta_sum if isinstance(p, IndexDecay) else p.rate


# --- maps ---------------------------------------------------------------------


def _exp_map(s):
    def phi(t):
        x = s * np.exp(t - np.exp(-t))
        return x, x * (1.0 + np.exp(-t))

    def inverse(x):
        # solve t - exp(-t) = ln(x/s) by bisection on a bracket
        y = math.log(x / s)
        lo, hi = -40.0, max(1.0, y + 1.0)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid - math.exp(-mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    return phi, inverse


def _sinh_map():
    def phi(t):
        x = np.exp(0.5 * math.pi * np.sinh(t))
        return x, 0.5 * math.pi * np.cosh(t) * x

    def inverse(x):
        return math.asinh(math.log(x) / (0.5 * math.pi))

    return phi, inverse


def _grid(profile, spec, origin_exponent, upper=None, lower_scale=1.0):
    if origin_exponent <= -1:
        raise DomainError("integrand must be integrable at 0 (origin exponent > -1)")
    L = spec.log_cut
    if isinstance(profile, AlgebraicDecay):
        phi, inverse = _sinh_map()
    else:
        phi, inverse = _exp_map(profile.scale())
    x_hi = profile.upper(L)
    if upper is not None:
        x_hi = min(x_hi, upper)
    if not math.isfinite(x_hi):
        raise DomainError("integrand has no declared decay")
    x_lo = max(lower_scale * math.exp(-L / (1.0 + origin_exponent)), X_FLOOR)
    return phi, inverse(x_lo), inverse(x_hi), x_hi


def _trapezoid_levels(f, phi, t_lo, t_hi, spec, h0=0.5, min_levels=2, tol_factor=1.0, x_max=None, joint=False):
    """Halving trapezoid on ``[t_lo, t_hi]`` in the mapped variable.

    With ``joint`` the relative tolerance of a stacked integrand is measured
    against its largest entry, so entries crossing zero do not stall it.
    """
    k_lo = math.ceil(t_lo / h0)
    k_hi = math.floor(t_hi / h0)
    evals = 0

    def block(t):
        nonlocal evals
        x, w = phi(t)
        if x_max is not None:
            keep = x <= x_max
            x, w = x[keep], w[keep]
        evals += x.size
        if x.size == 0:
            return 0.0
        v = np.asarray(f(x))
        if not np.all(np.isfinite(v)):
            bad = x[np.nonzero(~np.isfinite(v))[-1][0]]
            raise ConvergenceError(f"integrand is not finite at x = {bad!r}")
        return v @ w if v.ndim > 1 else np.dot(v, w)

    h = h0
    total = block(h0 * np.arange(k_lo, k_hi + 1))
    prev = h * total
    history = []
    err = math.inf
    for level in range(1, spec.max_refinements + 1):
        h *= 0.5
        # odd nodes of the finer grid inside the same t-range
        j_lo = math.ceil((t_lo / h - 1) / 2)
        j_hi = math.floor((t_hi / h - 1) / 2)
        total = total + block(h * (2 * np.arange(j_lo, j_hi + 1) + 1))
        cur = h * total
        diff = np.abs(np.asarray(cur) - np.asarray(prev))
        err = float(np.max(diff)) if np.size(diff) else 0.0
        history.append(err)
        mag = np.max(np.abs(cur)) if joint else np.abs(cur)
        target = tol_factor * np.maximum(spec.abs_tol, spec.rel_tol * mag)
        prev = cur
        if level >= min_levels and np.all(diff <= target):
            return QuadResult(cur, err, evals, True, tuple(history))
    return QuadResult(prev, err, evals, False, tuple(history))


def integrate_semiinf(f, profile, spec=QuadSpec(), origin_exponent=0.0, upper=None, joint=False, lower_scale=1.0):
    """``int_0^inf f(x) dx`` for an integrand with the declared decay.

    ``origin_exponent`` is ``p`` in ``f(x) = O(x**p)`` as ``x -> 0`` (log
    singularities count as ``p = 0``); it sets how close to 0 the nodes go.
    ``upper`` optionally caps the truncation point; ``joint`` judges a stacked
    integrand against its largest entry. ``lower_scale`` is where the
    ``x**p`` behaviour sets in when that is not ``x ~ 1``.
    """
    phi, t_lo, t_hi, x_hi = _grid(profile, spec, origin_exponent, upper, lower_scale)
    return _trapezoid_levels(f, phi, t_lo, t_hi, spec, x_max=x_hi, joint=joint)


def integrate_algebraic_tail(f, power, spec=QuadSpec(), origin_exponent=0.0, fit_at=1e3, terms=3, shift=1.0,
                             lower_scale=1.0):
    """``int_0^inf f(x) dx`` for ``f(x) ~ x**(-power) (A0 + A1/x + ...)``, ``power > 1``.

    Slow algebraic tails make the half-line rule reach absurd abscissae. The
    model ``sum_k B_k (shift+x)**(-power-k)`` is fitted to ``f`` at
    ``fit_at * shift * 2**j`` and integrated exactly; the remainder decays like
    ``x**(-power-terms)`` and goes to ``integrate_semiinf``.
    """
    if not power > 1:
        raise DomainError("algebraic tail needs power > 1")
    if not shift > 0:
        raise DomainError("tail shift must be positive")
    ks = np.arange(terms)
    xs = fit_at * shift * 2.0 ** ks
    basis = (shift + xs[:, None]) ** (-power - ks[None, :])
    fx = np.asarray(f(xs))
    lead = fx.shape[:-1]
    B = np.linalg.solve(basis, fx.reshape(-1, terms).T).reshape((terms,) + lead)
    model_int = np.tensordot(shift ** (1.0 - power - ks) / (power + ks - 1.0), B, axes=1)

    def rest(x):
        m = np.tensordot(B, (shift + x[None, :]) ** (-power - ks[:, None]), axes=([0], [0]))
        return np.asarray(f(x)) - m

    res = integrate_semiinf(rest, AlgebraicDecay(power + terms), spec, min(origin_exponent, 0.0),
                            lower_scale=lower_scale)
    value = np.asarray(res.value) + model_int
    target = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(value))
    ok = res.converged and bool(np.all(res.err_estimate <= target))
    return QuadResult(value, res.err_estimate, res.evaluations + terms, ok, res.history)


def integrate_tau_index(h, spec=QuadSpec(), decay=None, tau_max=TAU_CAP):
    """``int_0^inf h(tau) d tau`` with all exponential factors pre-folded into ``h``.

    ``decay`` (an ``IndexDecay``) is mandatory. The cut is placed where the
    declared decay reaches the log-tolerance, but never beyond ``tau_max``;
    when the cap bites, the tail ``|h(tau_max)| / delta`` is added to the error
    estimate and counts against convergence.
    """
    if decay is None:
        raise DomainError("an index integral needs a declared decay rate")
    if not isinstance(decay, IndexDecay):
        decay = IndexDecay(float(decay))
    phi, t_lo, t_hi, x_hi = _grid(decay, spec, 0.0, tau_max)
    res = _trapezoid_levels(h, phi, t_lo, t_hi, spec, x_max=x_hi)
    if x_hi < decay.upper(spec.log_cut):
        tail = float(np.max(np.abs(np.asarray(h(np.array([x_hi])))))) / decay.delta_sum
        err = res.err_estimate + tail
        target = np.min(np.maximum(spec.abs_tol, spec.rel_tol * np.abs(np.asarray(res.value))))
        return QuadResult(res.value, err, res.evaluations + 1, bool(res.converged and err <= target), res.history)
    return res


def integrate_2d(f, profiles, spec=SPEC_2D, origin_exponents=(0.0, 0.0)):
    """``int_0^inf int_0^inf f(y, t) dt dy`` as an iterated half-line rule.

    The inner rule runs at a tenth of the outer tolerances and its error
    estimates are integrated alongside the values; the combined estimate is
    checked against ten times the 1-D tolerance.
    """
    py, pt = profiles
    inner_spec = QuadSpec(spec.abs_tol / 10, spec.rel_tol / 10, spec.max_refinements, spec.truncation_margin)
    phi_t, t_lo, t_hi, t_max = _grid(pt, inner_spec, origin_exponents[1])
    inner_ok = [True]
    inner_evals = [0]

    def outer(y):
        res = _trapezoid_levels(
            lambda t: f(y[:, None], t[None, :]), phi_t, t_lo, t_hi, inner_spec, x_max=t_max
        )
        inner_ok[0] &= res.converged
        inner_evals[0] += res.evaluations
        # per-node error: the inner estimate is a max; spread it uniformly
        return np.stack([np.asarray(res.value), np.full(y.shape, res.err_estimate)])

    phi_y, y_lo, y_hi, y_max = _grid(py, spec, origin_exponents[0])
    res = _trapezoid_levels(
        outer, phi_y, y_lo, y_hi, spec, tol_factor=10.0, x_max=y_max
    )
    value, inner_err = float(res.value[0]), float(res.value[1])
    err = res.err_estimate + abs(inner_err)
    ok = res.converged and inner_ok[0] and err <= 10 * max(spec.abs_tol, spec.rel_tol * abs(value))
    return QuadResult(value, err, inner_evals[0], ok, res.history)
