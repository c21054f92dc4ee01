"""Command-line front end.

    klortho eval besselk-imag --tau 1 --x 1
    klortho transform --f "x*exp(-x)" --tau 0.5,1,2
    klortho invert --F "pi*tau/sinh(pi*tau)" --x 1
    klortho convolve --f "exp(-x)" --g "exp(-x)" --x 1,2
    klortho gram --case CDH_2_10 --N 3 --format csv
    klortho verify --case LAG_2_4 --alpha 0 --n 3
    klortho list-cases

Exit status: 0 success, 1 a verification failed or a computation did not
converge, 2 bad usage or out-of-domain input.
"""
import argparse
import sys
from dataclasses import replace

import numpy as np

from . import specfun
from .convolution import KINDS, STANDARD, convolve
from .errors import ConvergenceError, KLError
from .expr import index_function, real_function
from .families import cdh, laguerre, wilson
from .harness import CASES, case, gram_matrix, verify_case
from .kl_core import TransformSpec, kl_forward, kl_inverse
from .quad import IndexDecay, QuadSpec
from .serialize import SchemaError, load_coefficients, matrix_to_csv, parse_decimal, report_dict, to_json

CASE_PARAMS = ("alpha", "beta", "gamma", "mu", "eta", "a", "b", "c", "d", "nu")
FORMATS = ("json", "csv", "plain")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text):
    try:
        return parse_decimal(text)
    except SchemaError as exc:
        raise argparse.ArgumentTypeError(str(exc).split(": ", 1)[-1]) from None


def _numbers(text):
    parts = [p for p in text.split(",")]
    if not all(p.strip() for p in parts):
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers")
    return [_number(p) for p in parts]


def _count(text):
    v = _number(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(v)


def _positive_count(text):
    v = _count(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return v


# --- evaluable functions ----------------------------------------------------

def _kiv(a):
    return specfun.besselk_imag(a.tau, np.asarray(a.x), scaled=a.scaled)


def _lngamma(a):
    z = specfun.complex_lngamma(complex(a.re, a.im))
    return [float(np.real(z)), float(np.imag(z))]


EVAL = {
    "besselk-imag": (("tau", "x*"), _kiv, "K_{i tau}(x); --scaled multiplies by exp(pi tau/2 + x)"),
    "besselk-real": (("nu", "x*"), lambda a: specfun.besselk_real(a.nu, np.asarray(a.x)), "K_nu(x)"),
    "rho": (("nu", "x*"), lambda a: specfun.rho_nu(a.nu, np.asarray(a.x)), "2 x**(nu/2) K_nu(2 sqrt(x))"),
    "lngamma": (("re", "im"), _lngamma, "principal log Gamma(re + i im), printed as [re, im]"),
    "pochhammer": (("z", "n#"), lambda a: specfun.pochhammer(a.z, a.n), "(z)_n"),
    "laguerre": (("n#", "alpha", "x*"), lambda a: laguerre(a.n, a.alpha, np.asarray(a.x)), "L_n^alpha(x)"),
    "wilson": (("n#", "t*", "a", "b", "c", "d"),
               lambda a: wilson(a.n, np.asarray(a.t), a.a, a.b, a.c, a.d), "Wilson polynomial W_n(t**2)"),
    "cdh": (("n#", "t*", "a", "b", "c"),
            lambda a: cdh(a.n, np.asarray(a.t), a.a, a.b, a.c), "continuous dual Hahn S_n(t**2)"),
    "expr": (("f", "x*"), lambda a: real_function(a.f)(np.asarray(a.x)), "a grammar expression in x"),
}


def _add_quad_flags(p):
    g = p.add_argument_group("quadrature overrides")
    g.add_argument("--abs-tol", type=_number)
    g.add_argument("--rel-tol", type=_number)
    g.add_argument("--max-refinements", type=_positive_count)
    g.add_argument("--truncation-margin", type=_number)


def _common(default_format="json", quad=True):
    p = _Parser(add_help=False)
    p.add_argument("--format", choices=FORMATS, default=default_format)
    if quad:
        _add_quad_flags(p)
    return p


def build_parser():
    top = _Parser(prog="klortho", description="Kontorovich-Lebedev transforms and orthogonality checks.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate a special function")
    evs = ev.add_subparsers(dest="function", required=True, parser_class=_Parser)
    for name, (args, _, text) in EVAL.items():
        q = evs.add_parser(name, help=text, parents=[_common(quad=False)])
        for arg in args:
            flag = arg.rstrip("*#")
            if arg == "f":
                q.add_argument("--f", required=True, metavar="EXPR")
            elif arg.endswith("*"):
                q.add_argument(f"--{flag}", type=_numbers, required=True, metavar="V[,V...]")
            elif arg.endswith("#"):
                q.add_argument(f"--{flag}", type=_count, required=True)
            else:
                q.add_argument(f"--{flag}", type=_number, required=True)
        if name == "besselk-imag":
            q.add_argument("--scaled", action="store_true")

    tr = sub.add_parser("transform", help="forward KL transform of an expression in x", parents=[_common()])
    tr.add_argument("--f", required=True, metavar="EXPR")
    tr.add_argument("--tau", type=_numbers, required=True, metavar="V[,V...]")
    tr.add_argument("--alpha", type=_number, default=1.0, help="kernel K(alpha x**beta)")
    tr.add_argument("--beta", type=_number, default=1.0)

    inv = sub.add_parser("invert", help="KL inversion of an expression in tau", parents=[_common()])
    inv.add_argument("--F", required=True, metavar="EXPR")
    inv.add_argument("--x", type=_numbers, required=True, metavar="V[,V...]")
    inv.add_argument("--decay", type=_number, help="exponential rate in tau of the inversion integrand")
    inv.add_argument("--alpha", type=_number, default=1.0)
    inv.add_argument("--beta", type=_number, default=1.0)

    cv = sub.add_parser("convolve", help="KL convolution of two expressions in x", parents=[_common()])
    cv.add_argument("--f", required=True, metavar="EXPR")
    cv.add_argument("--g", required=True, metavar="EXPR")
    cv.add_argument("--x", type=_numbers, required=True, metavar="V[,V...]")
    cv.add_argument("--kind", choices=KINDS, default=STANDARD)

    for name, text in (("gram", "Gram matrix of a case"), ("verify", "run verification cases")):
        q = sub.add_parser(name, help=text, parents=[_common()])
        if name == "gram":
            q.add_argument("--case", required=True, choices=sorted(CASES), metavar="ID")
        else:
            q.add_argument("--case", action="append", choices=sorted(CASES), metavar="ID")
            q.add_argument("--all", action="store_true", help="every registered case")
            q.add_argument("--tol-off", type=_number)
            q.add_argument("--tol-diag", type=_number)
        q.add_argument("--N", type=_positive_count, help="matrix size")
        q.add_argument("--n", type=_count, help="matrix size, or the degree index of a d-orthogonality case")
        for k in CASE_PARAMS:
            q.add_argument(f"--{k}", type=_number)
        q.add_argument("--route", help="computation route (GEN_2_6, GEN_2_15: closed or integral)")
        q.add_argument("--coeffs", action="append", metavar="PATH", help="coefficient table (JSON)")
        q.add_argument("--allow-expensive", action="store_true", help="lift the default matrix-size cap")
        q.add_argument("--timing", action="store_true", help="include wall_time in reports")

    sub.add_parser("list-cases", help="print the case identifiers", parents=[_common("plain", quad=False)])
    return top


# --- helpers -----------------------------------------------------------------

def _quad(a, base=None):
    over = {k: getattr(a, k) for k in ("abs_tol", "rel_tol", "max_refinements", "truncation_margin")
            if getattr(a, k, None) is not None}
    if not over:
        return base
    return replace(base or QuadSpec(), **over)


def _emit(value, fmt, out):
    if fmt == "csv":
        raise UsageError("--format csv is only available for matrices (gram, verify)")
    arr = np.asarray(value, dtype=float)
    if fmt == "json":
        out.write(to_json(arr.item() if arr.ndim == 0 else arr.tolist()) + "\n")
    else:
        for v in np.atleast_1d(arr).ravel():
            out.write(to_json(float(v)) + "\n")


def _vector(vals, arg):
    # a single value prints as a bare number
    return vals if len(vals) > 1 else vals[0]


def _tables(paths):
    return [load_coefficients(p) for p in paths or ()]


def _table_for(d, tables):
    if not d.coeffs:
        return None
    if len(tables) == 1:
        return tables[0]
    label = d.coeffs[0]
    for t in tables:
        if t.family == d.coeffs or t.family[:1] == label:
            return t
    raise UsageError(f"--coeffs: case {d.id} needs a coefficient table for {d.coeffs}")


def _case_spec(a, case_id, tables):
    d = CASES[case_id]
    params = {}
    for k in CASE_PARAMS:
        v = getattr(a, k)
        if v is not None:
            if k not in d.defaults:
                raise UsageError(f"--{k}: case {case_id} has no parameter {k!r}")
            params[k] = v
    if d.kind == "dorth" and a.n is not None:
        params["n"] = a.n
    if a.route is not None and a.route not in (d.routes or (d.route,)):
        raise UsageError(f"--route: case {case_id} has no route {a.route!r}")
    return case(case_id, coeffs=_table_for(d, tables), quad=_quad(a), route=a.route, **params)


def _size(a, d):
    if a.N is not None and a.n is not None and d.kind == "gram" and a.N != a.n:
        raise UsageError("--N and --n disagree")
    return a.N if a.N is not None else (a.n if d.kind == "gram" else None)


# --- subcommands -----------------------------------------------------------------

def _cmd_eval(a, out):
    _, fn, _ = EVAL[a.function]
    val = fn(a)
    if a.function != "lngamma" and np.size(val) == 1:
        val = np.asarray(val).item()
    _emit(val, a.format, out)
    return 0


def _cmd_transform(a, out):
    f = real_function(a.f)
    vals = kl_forward(f, np.asarray(a.tau), TransformSpec(a.alpha, a.beta), _quad(a, QuadSpec()))
    _emit(_vector(np.atleast_1d(vals), a.tau), a.format, out)
    return 0


def _cmd_invert(a, out):
    F, decay = index_function(a.F)
    if a.decay is not None:
        if not a.decay > 0:
            raise UsageError("--decay: the rate must be positive")
        decay = IndexDecay(a.decay)
    if decay is None:
        raise UsageError("--F: cannot infer an absolutely convergent index integral; pass --decay")
    vals = kl_inverse(F, np.asarray(a.x), TransformSpec(a.alpha, a.beta), _quad(a, QuadSpec()), decay)
    _emit(_vector(np.atleast_1d(vals), a.x), a.format, out)
    return 0


def _cmd_convolve(a, out):
    f, g = real_function(a.f), real_function(a.g)
    kw = {} if _quad(a) is None else {"quad": _quad(a)}
    vals = convolve(f, g, np.asarray(a.x), a.kind, **kw)
    _emit(_vector(np.atleast_1d(vals), a.x), a.format, out)
    return 0


def _cmd_gram(a, out):
    d = CASES[a.case]
    if d.kind != "gram":
        raise UsageError(f"--case: {a.case} is a d-orthogonality case; use verify")
    spec = _case_spec(a, a.case, _tables(a.coeffs))
    N = _size(a, d) or min(3, d.max_n)
    rep = gram_matrix(spec, N, a.allow_expensive, a.timing)
    if a.format == "csv":
        out.write(matrix_to_csv(rep.matrix))
    elif a.format == "plain":
        for row in rep.matrix:
            out.write(" ".join(to_json(float(v)) for v in row) + "\n")
    else:
        out.write(to_json(np.asarray(rep.matrix).tolist()) + "\n")
    for e in rep.errors:
        print(f"klortho: {a.case}: {e}", file=sys.stderr)
    return 1 if rep.errors else 0


def _cmd_verify(a, out):
    if a.all and a.case:
        raise UsageError("--all: give either --all or --case, not both")
    ids = sorted(CASES) if a.all else a.case
    if not ids:
        raise UsageError("--case: at least one case (or --all) is required")
    tables = _tables(a.coeffs)
    specs = [_case_spec(a, cid, tables) for cid in ids]
    reports = []
    for spec in specs:
        d = spec.definition
        reports.append(verify_case(spec, _size(a, d), a.tol_off, a.tol_diag, a.allow_expensive, a.timing))
    if a.format == "csv":
        if len(reports) != 1 or not hasattr(reports[0], "matrix"):
            raise UsageError("--format csv needs exactly one Gram case")
        out.write(matrix_to_csv(reports[0].matrix))
    elif a.format == "plain":
        for r in reports:
            out.write(f"{r.case_id} {'pass' if r.passed else 'FAIL'}\n")
    else:
        docs = [report_dict(r) for r in reports]
        out.write(to_json(docs[0] if len(docs) == 1 else docs) + "\n")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_list(a, out):
    ids = list(CASES)
    if a.format == "json":
        out.write(to_json(ids) + "\n")
    elif a.format == "csv":
        raise UsageError("--format csv is only available for matrices (gram, verify)")
    else:
        out.write("".join(i + "\n" for i in ids))
    return 0


COMMANDS = {
    "eval": _cmd_eval, "transform": _cmd_transform, "invert": _cmd_invert, "convolve": _cmd_convolve,
    "gram": _cmd_gram, "verify": _cmd_verify, "list-cases": _cmd_list,
}


def run(argv=None, out=None, err=None):
    """Run the CLI; returns the exit status instead of exiting."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        return COMMANDS[a.command](a, out)
    except UsageError as exc:
        print(f"klortho: error: {exc}", file=err)
        return 2
    except ConvergenceError as exc:
        print(f"klortho: no convergence: {exc}", file=err)
        return 1
    except KLError as exc:
        print(f"klortho: error: {exc}", file=err)
        return 2
    except SystemExit as exc:
        # --help
        return 0 if exc.code in (0, None) else 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
