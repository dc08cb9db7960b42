"""Command-line front end.

Exit codes: 0 success, 1 operational error (bad input, budget, contour,
convergence), 2 numerical acceptance failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .contour import QuadratureSettings, cauchy_coefficient, choose_contour
from .divided import divided_difference
from .errors import BudgetError, DimensionError, ExpansionError, ParseError
from .expansion import convergence_profile, expand, reference_function
from .functions import parse_function
from .lemma import coefficient_from_B, expand_monomial_lemma
from .problem import format_problem, read_problem
from .scalars import format_scalar_digits, split_top_level

VERIFY_MAX_DIM = 6
VERIFY_MAX_ORDER = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("problem", help="problem file (dimension, diagonal, perturbation)")
    common.add_argument("--f", dest="function", required=True,
                        help="exp, sin, cos, log, pow:<p>, poly:<c0>,<c1>,..., recip:<a>")
    common.add_argument("--order", type=_positive_int, default=4, help="truncation order n_max")
    common.add_argument("--strategy", choices=("path-sum", "quadrature"), default="quadrature")
    common.add_argument("--accept-tol", type=_positive_float, default=1e-8)
    common.add_argument("--contour-radius-factor", type=_positive_float, default=1.25)
    common.add_argument("--quad-nodes", type=_positive_int, default=64)
    common.add_argument("--quad-max-nodes", type=_positive_int, default=4096)
    common.add_argument("--quad-tol", type=_positive_float, default=1e-12)

    parser = _Parser(prog="opexpand", description="Perturbative expansion of matrix functions f(lam + tau).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("expand", parents=[common], help="expand f(lam + tau) order by order")
    coeffs = sub.add_parser("coeffs", parents=[common], help="coefficient for one index path")
    coeffs.add_argument("--path", required=True, help="comma-separated indices i,m1,...,p")
    sub.add_parser("verify", parents=[common], help="cross-check strategies and oracles")
    conv = sub.add_parser("convergence", parents=[common], help="truncation error versus scale")
    conv.add_argument("--scales", default="1,1/2,1/4,1/8", help="comma-separated positive scales")
    return parser


def _settings(args):
    try:
        return QuadratureSettings(
            radius_factor=args.contour_radius_factor,
            nodes=args.quad_nodes,
            max_nodes=args.quad_max_nodes,
            tol=args.quad_tol,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _strategy(args):
    return args.strategy.replace("-", "_")


def _fmt(x):
    return f"{x:.3e}"


def _matrix_lines(m, indent="  "):
    m = np.asarray(m)
    real_only = bool(np.all(m.imag == 0))
    return [indent + "  ".join(format_scalar_digits(z, 16, real_only) for z in row) for row in m]


def _echo(lam, tau):
    return ["# problem", *format_problem(lam, tau).splitlines(), "# end problem"]


def _header(command, f, args, extra=()):
    lines = [f"opexpand {command}", f"function: {f.spec}"]
    lines += list(extra)
    return lines


def cmd_expand(args, out):
    f = parse_function(args.function)
    lam, tau = read_problem(args.problem)
    settings = _settings(args)
    result = expand(f, lam, tau, args.order, _strategy(args), settings)
    ref, oracle = reference_function(f, np.diag(lam) + tau, lam, np.linalg.norm(tau), settings)
    err = float(np.max(np.abs(result.truncated_sum - ref)))
    ok = err <= args.accept_tol

    lines = _header("expand", f, args, [f"strategy: {args.strategy}", f"order: {args.order}"])
    lines += _echo(lam, tau)
    if result.contour is not None:
        c = result.contour
        lines.append(f"contour: center {format_scalar_digits(c.center, 6)} radius {c.radius:.6g}")
    lines.append("term norms (Frobenius):")
    lines += [f"  order {n:2d}  {v:.6e}" for n, v in enumerate(result.term_norms)]
    lines.append("truncated sum:")
    lines += _matrix_lines(result.truncated_sum)
    lines.append(f"oracle: {oracle}  max-abs error {_fmt(err)}  accept-tol {_fmt(args.accept_tol)}")
    lines.append(f"converged: {'yes' if result.converged else 'no'}")
    lines.append(f"status: {'PASS' if ok else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    return 0 if ok else 2


def _parse_path(text, n):
    try:
        path = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ParseError(f"malformed index path {text!r}") from None
    if len(path) < 2:
        raise ParseError("an index path needs at least two indices")
    if any(not 0 <= i < n for i in path):
        raise DimensionError(f"path index out of range 0..{n - 1}")
    return path


def cmd_coeffs(args, out):
    f = parse_function(args.function)
    lam, tau = read_problem(args.problem)
    settings = _settings(args)
    path = _parse_path(args.path, lam.size)
    nodes = lam[path]
    dd = divided_difference(f, nodes)
    contour = choose_contour(nodes, f, 0.0, settings)
    quad = cauchy_coefficient(f, nodes, contour, settings)
    rows = [("divided-difference", dd), ("contour-quadrature", quad)]
    skipped = None
    if np.any(lam[path] == 0):
        skipped = "zero diagonal entry on the path"
    elif f.singular_distance(0.0) == 0:
        skipped = f"{f.spec} has no Taylor series at 0"
    else:
        try:
            rows.append(("taylor-at-zero (B)", coefficient_from_B(f, lam, path)))
        except ExpansionError as exc:
            skipped = f"{type(exc).__name__}: {exc}"

    lines = _header("coeffs", f, args, [f"path: {','.join(map(str, path))}"])
    lines.append("nodes: " + "  ".join(format_scalar_digits(z, 16) for z in nodes))
    for name, value in rows:
        lines.append(f"  {name:<22s} {format_scalar_digits(value, 16)}")
    if skipped:
        lines.append(f"  {'taylor-at-zero (B)':<22s} skipped ({skipped})")
    worst = max(abs(v - dd) / max(1.0, abs(dd)) for _, v in rows)
    ok = worst <= args.accept_tol
    lines.append(f"max relative discrepancy {_fmt(worst)}  accept-tol {_fmt(args.accept_tol)}")
    lines.append(f"status: {'PASS' if ok else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    return 0 if ok else 2


def cmd_verify(args, out):
    f = parse_function(args.function)
    lam, tau = read_problem(args.problem)
    if lam.size > VERIFY_MAX_DIM or args.order > VERIFY_MAX_ORDER:
        raise BudgetError(
            f"verify is limited to N <= {VERIFY_MAX_DIM} and order <= {VERIFY_MAX_ORDER}"
            f" (got N = {lam.size}, order = {args.order})"
        )
    settings = _settings(args)
    n_max = args.order
    disabled = dict(stop_rtol=0.0)
    ps = expand(f, lam, tau, n_max, "path_sum", settings, **disabled)
    qd = expand(f, lam, tau, n_max, "quadrature", settings, **disabled)
    ref, oracle = reference_function(f, np.diag(lam) + tau, lam, np.linalg.norm(tau), settings)

    def termwise(a, b):
        return max(float(np.max(np.abs(x - y))) for x, y in zip(a.terms, b.terms))

    rows = [
        ("path-sum vs quadrature (per term)", termwise(ps, qd)),
        (f"path-sum vs {oracle}", float(np.max(np.abs(ps.truncated_sum - ref)))),
        (f"quadrature vs {oracle}", float(np.max(np.abs(qd.truncated_sum - ref)))),
    ]
    skipped = None
    if f.kind != "pow":
        skipped = f"lemma route needs pow:<p>, got {f.spec}"
    elif np.any(lam == 0):
        skipped = "lemma route needs a nonzero diagonal"
    elif f.degree == 0:
        skipped = "lemma route has no perturbative terms for pow:0"
    else:
        k = min(n_max, f.degree)
        lemma = expand_monomial_lemma(lam, tau, f.degree, k)
        rows.append(("lemma vs path-sum", float(np.max(np.abs(lemma - ps.partial_sum(k))))))

    lines = _header("verify", f, args, [f"order: {n_max}"])
    lines += _echo(lam, tau)
    lines.append(f"  {'check':<36s} {'max-abs':>10s}  result")
    ok = True
    for name, value in rows:
        passed = value <= args.accept_tol
        ok &= passed
        lines.append(f"  {name:<36s} {_fmt(value):>10s}  {'ok' if passed else 'FAIL'}")
    if skipped:
        lines.append(f"  {'lemma vs path-sum':<36s} {'-':>10s}  skipped ({skipped})")
    lines.append(f"accept-tol {_fmt(args.accept_tol)}")
    lines.append(f"status: {'PASS' if ok else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    return 0 if ok else 2


def parse_scales(text):
    scales = []
    for tok in split_top_level(text):
        try:
            value = float(Fraction(tok.strip()))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed scale {tok!r}") from None
        if value <= 0:
            raise ParseError(f"scales must be positive, got {tok!r}")
        scales.append(value)
    if len(scales) < 2:
        raise ParseError("need at least two scales")
    return scales


def cmd_convergence(args, out):
    f = parse_function(args.function)
    scales = parse_scales(args.scales)
    lam, tau = read_problem(args.problem)
    settings = _settings(args)
    profile = convergence_profile(f, lam, tau, args.order, scales, _strategy(args), settings)

    lines = _header("convergence", f, args, [f"strategy: {args.strategy}", f"order: {args.order}"])
    lines += _echo(lam, tau)
    head = f"  {'order':>5s}  {'slope':>8s}  {'expected':>8s}" + "".join(
        f"  {'s=' + format(s, '.6g'):>11s}" for s in scales
    )
    lines.append("max-abs truncation error by scale:")
    lines.append(head)
    for row, n in enumerate(profile.orders):
        slope = profile.slopes[row]
        slope_txt = "exact" if slope is None else f"{slope:.4f}"
        cells = "".join(f"  {v:11.3e}" for v in profile.errors[row])
        lines.append(f"  {n:5d}  {slope_txt:>8s}  {n + 1:8d}{cells}")
    out.write("\n".join(lines) + "\n")
    return 0


COMMANDS = {
    "expand": cmd_expand,
    "coeffs": cmd_coeffs,
    "verify": cmd_verify,
    "convergence": cmd_convergence,
}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ExpansionError as exc:
        err.write(f"opexpand: {type(exc).__name__}: {exc}\n")
        return 1
    except OSError as exc:
        err.write(f"opexpand: {type(exc).__name__}: {exc}\n")
        return 1


def run():
    sys.exit(main())
