"""A small, safe expression language for functions entered on the command line.

Expressions are parsed with ``ast`` and compiled to numpy closures; only the
constructs below are accepted, so nothing is ever executed. Every construct
also carries its asymptotics, from which the decay profile and origin
exponent a ``RealFunction`` needs are derived:

    numbers, pi, e, the variable (``x`` or ``tau``)
    + - * / **  (exponents must be constants)
    exp sqrt log sin cos sinh cosh tanh
    laguerre(n, alpha, x)   rho(nu, x)   besselk(nu, x)
    <generated family>(n, x, params...)   e.g. CDH_f_2_23(1, x, 1, 1, 0.3)
"""
import ast
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .families import FAMILY_PARAMS, GENERATED, family, family_function, laguerre
from .kl_core import RealFunction, origin_of
from .quad import AlgebraicDecay, ExpDecay, IndexDecay, NoDecay, SqrtExpDecay
from .specfun import besselk_real, rho_nu

INF = math.inf


@dataclass(frozen=True)
class Asym:
    """``|f| <~ v**origin`` as ``v -> 0`` and ``v**power exp(-lin v - root sqrt(v))`` as ``v -> inf``."""
    origin: float = 0.0
    lin: float = 0.0
    root: float = 0.0
    power: float = 0.0

    def key(self):
        return (self.lin, self.root, -self.power)


CONST = Asym()


@dataclass(frozen=True)
class Affine:
    """Coefficients of ``c0 + c1 v + c2 sqrt(v) + c3 / v``, when an expression has that form."""
    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0

    def __add__(self, o):
        return Affine(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)

    def scale(self, k):
        return Affine(k * self.c0, k * self.c1, k * self.c2, k * self.c3)


@dataclass(frozen=True)
class Node:
    fn: object
    asym: Asym
    const: float = None
    affine: Affine = None


class ExprError(DomainError):
    pass


def _const(v):
    return Node(lambda v_, c=v: np.full(np.shape(v_), c), Asym(origin=INF if v == 0 else 0.0), v, Affine(c0=v))


def _sum(a, b, sign):
    fa, fb = a.fn, b.fn
    fn = (lambda v: fa(v) + fb(v)) if sign > 0 else (lambda v: fa(v) - fb(v))
    slow = min(a.asym, b.asym, key=Asym.key)
    asym = Asym(min(a.asym.origin, b.asym.origin), slow.lin, slow.root, slow.power)
    const = None if a.const is None or b.const is None else a.const + sign * b.const
    aff = None if a.affine is None or b.affine is None else a.affine + b.affine.scale(sign)
    return Node(fn, asym, const, aff)


def _scale(node, k):
    f = node.fn
    aff = None if node.affine is None else node.affine.scale(k)
    return Node(lambda v: k * f(v), node.asym, None if node.const is None else k * node.const, aff)


def _prod(a, b, div=False):
    if b.const is not None and not div:
        return _scale(a, b.const)
    if a.const is not None and not div:
        return _scale(b, a.const)
    if div and b.const is not None:
        if b.const == 0:
            raise ExprError("division by zero")
        return _scale(a, 1.0 / b.const)
    s = -1.0 if div else 1.0
    fa, fb = a.fn, b.fn
    fn = (lambda v: fa(v) / fb(v)) if div else (lambda v: fa(v) * fb(v))
    A, B = a.asym, b.asym
    asym = Asym(A.origin + s * B.origin, A.lin + s * B.lin, A.root + s * B.root, A.power + s * B.power)
    aff = None
    if div and a.const is not None and b.affine == Affine(c1=1.0):
        aff = Affine(c3=a.const)
    elif not div and a.affine is not None and b.affine is not None:
        # sqrt(v) * sqrt(v) and v * (1/v) stay affine; anything else does not
        pa, pb = a.affine, b.affine
        if (pa.c0, pa.c1, pa.c3) == (0, 0, 0) and (pb.c0, pb.c1, pb.c3) == (0, 0, 0):
            aff = Affine(c1=pa.c2 * pb.c2)
    return Node(fn, asym, None, aff)


def _power(a, k):
    f = a.fn
    A = a.asym
    if a.const is not None:
        return _const(a.const**k)
    aff = None
    if a.affine is not None:
        p = a.affine
        if (p.c0, p.c2, p.c3) == (0, 0, 0) and p.c1 == 1:
            if k == 0.5:
                aff = Affine(c2=1.0)
            elif k == -1:
                aff = Affine(c3=1.0)
            elif k == 1:
                aff = p
    return Node(lambda v: f(v) ** k, Asym(A.origin * k, A.lin * k, A.root * k, A.power * k), None, aff)


def _exp(a):
    if a.const is not None:
        return _const(math.exp(a.const))
    p = a.affine
    if p is None:
        raise ExprError("exp() needs an argument of the form c0 + c1*v + c2*sqrt(v) + c3/v")
    if p.c3 > 0:
        raise ExprError("exp(+c/v) blows up at the origin")
    f = a.fn
    origin = INF if p.c3 < 0 else 0.0
    return Node(lambda v: np.exp(f(v)), Asym(origin, -p.c1, -p.c2, 0.0))


def _unary(name, a):
    f = a.fn
    A = a.asym
    if a.const is not None and name in _CONST_FUNCS:
        return _const(_CONST_FUNCS[name](a.const))
    if name == "exp":
        return _exp(a)
    if name == "sqrt":
        return _power(a, 0.5)
    if name == "log":
        # a log contributes no power at either end
        return Node(lambda v: np.log(f(v)), Asym(0.0, 0.0, 0.0, 0.0))
    if name in ("sin", "tanh"):
        g = np.sin if name == "sin" else np.tanh
        return Node(lambda v: g(f(v)), Asym(max(A.origin, 0.0) if A.origin > 0 else 0.0))
    if name == "cos":
        return Node(lambda v: np.cos(f(v)), CONST)
    if name in ("sinh", "cosh"):
        p = a.affine
        if p is None or (p.c0, p.c2, p.c3) != (0, 0, 0):
            raise ExprError(f"{name}() needs an argument of the form c*v")
        g = np.sinh if name == "sinh" else np.cosh
        origin = 1.0 if name == "sinh" else 0.0
        return Node(lambda v: g(f(v)), Asym(origin, -abs(p.c1)))
    raise ExprError(f"unknown function {name!r}")


_CONST_FUNCS = {
    "exp": math.exp, "sqrt": math.sqrt, "log": math.log, "sin": math.sin, "cos": math.cos,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
}


def _literal(node, what):
    if node.const is None:
        raise ExprError(f"{what} must be a constant")
    return node.const


class _Compiler:
    def __init__(self, var):
        self.var = var

    def visit(self, t):
        if isinstance(t, ast.Expression):
            return self.visit(t.body)
        if isinstance(t, ast.Constant) and isinstance(t.value, (int, float)) and not isinstance(t.value, bool):
            return _const(float(t.value))
        if isinstance(t, ast.Name):
            if t.id == self.var:
                return Node(lambda v: np.asarray(v, dtype=float), Asym(1.0, 0.0, 0.0, 1.0), None, Affine(c1=1.0))
            if t.id == "pi":
                return _const(math.pi)
            if t.id == "e":
                return _const(math.e)
            raise ExprError(f"unknown name {t.id!r} (the variable is {self.var!r})")
        if isinstance(t, ast.UnaryOp) and isinstance(t.op, (ast.USub, ast.UAdd)):
            a = self.visit(t.operand)
            return _scale(a, -1.0) if isinstance(t.op, ast.USub) else a
        if isinstance(t, ast.BinOp):
            a, b = self.visit(t.left), self.visit(t.right)
            if isinstance(t.op, ast.Add):
                return _sum(a, b, 1)
            if isinstance(t.op, ast.Sub):
                return _sum(a, b, -1)
            if isinstance(t.op, ast.Mult):
                return _prod(a, b)
            if isinstance(t.op, ast.Div):
                return _prod(a, b, div=True)
            if isinstance(t.op, ast.Pow):
                return _power(a, _literal(b, "an exponent"))
            raise ExprError(f"operator {type(t.op).__name__} is not supported")
        if isinstance(t, ast.Call) and isinstance(t.func, ast.Name) and not t.keywords:
            return self.call(t.func.id, t.args)
        raise ExprError(f"unsupported syntax: {ast.dump(t)[:40]}")

    def _var_arg(self, t, fname):
        if not (isinstance(t, ast.Name) and t.id == self.var):
            raise ExprError(f"{fname}() takes the bare variable {self.var!r} as its argument")

    def call(self, name, args):
        if name in _CONST_FUNCS:
            if len(args) != 1:
                raise ExprError(f"{name}() takes one argument")
            return _unary(name, self.visit(args[0]))
        consts = [self.visit(a) for a in args[:-1]]
        if name == "laguerre":
            if len(args) != 3:
                raise ExprError("laguerre(n, alpha, x) takes three arguments")
            self._var_arg(args[2], name)
            n, al = int(_literal(consts[0], "n")), _literal(consts[1], "alpha")
            return Node(lambda v: laguerre(n, al, v), Asym(0.0, 0.0, 0.0, float(n)))
        if name in ("rho", "besselk"):
            if len(args) != 2:
                raise ExprError(f"{name}(nu, x) takes two arguments")
            self._var_arg(args[1], name)
            nu = _literal(consts[0], "nu")
            if name == "rho":
                return Node(lambda v: rho_nu(nu, v), Asym(0.0, 0.0, 2.0, 0.5 * nu - 0.25))
            return Node(lambda v: besselk_real(nu, v), Asym(-abs(nu), 1.0, 0.0, -0.5))
        if name in GENERATED:
            names = FAMILY_PARAMS[name]
            if len(args) != 2 + len(names):
                raise ExprError(f"{name}(n, x, {', '.join(names)}) takes {2 + len(names)} arguments")
            self._var_arg(args[1], name)
            n = int(_literal(consts[0], "n"))
            params = {k: _literal(self.visit(a), k) for k, a in zip(names, args[2:])}
            rf = family_function(family(name, **params), n)
            lin = rf.decay.rate if isinstance(rf.decay, ExpDecay) else 0.0
            return Node(rf, Asym(rf.origin_exponent, lin, 0.0, rf.origin_exponent + n))
        raise ExprError(f"unknown function {name!r}")


def compile_expr(text, var="x"):
    """Parse ``text`` into a ``Node`` (callable ``fn`` plus asymptotics)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse expression {text!r}: {exc.msg}") from None
    return _Compiler(var).visit(tree)


def _decay_of(asym):
    if asym.lin < 0 or (asym.lin == 0 and asym.root < 0):
        raise ExprError("expression grows exponentially; no kernel can tame it")
    if asym.lin > 0:
        return ExpDecay(asym.lin)
    if asym.root > 0:
        return SqrtExpDecay(asym.root)
    if asym.power < -1:
        return AlgebraicDecay(-asym.power)
    return NoDecay()


def real_function(text):
    """A ``RealFunction`` of ``x`` whose decay and origin come from the grammar."""
    node = compile_expr(text, "x")
    # exp(-c/x) beats every power; claiming a huge one would push the quadrature's lower cut up
    origin = node.asym.origin if math.isfinite(node.asym.origin) else 1.0
    return RealFunction(node.fn, _decay_of(node.asym), origin_of(origin), text)


def index_function(text):
    """A callable of ``tau`` plus the ``IndexDecay`` of ``tau sinh(pi tau) K_{i tau} F(tau)``."""
    node = compile_expr(text, "tau")
    # the inversion integrand carries exp(pi tau / 2) on top of F
    rate = node.asym.lin - 0.5 * math.pi
    decay = IndexDecay(rate) if rate > 0 else None
    return node.fn, decay
