"""Command line surface: ``mn <subcommand>``.

Deterministic output (series terms in field order, compact JSON with fixed
key order) so runs are byte-stable for golden tests.  Exit codes: 0 success,
1 mathematical refusal (singular change of variables, division by zero, out
of precision), 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from fractions import Fraction

from .errors import MNError, UsageError
from .identities import (
    DysonInstance,
    dixon_sum,
    dyson_ct,
    dyson_rhs,
    j_r_closed_form,
    j_r_determinant,
    wilson_v,
    zspec,
)
from .ordering import Box, cube, format_field_spec, parse_field_spec, parse_rational
from .parser import expand, parse
from .residues import (
    change_of_variables,
    jacobian,
    jacobian_number,
    lagrange_coefficient,
    lagrange_inverse,
    log_jacobian,
    residue_verify,
)


def _compact(data):
    return json.dumps(data, separators=(",", ":"))


def _field_from_args(args):
    if getattr(args, "field", None):
        spec = parse_field_spec(args.field)
    elif getattr(args, "vars", None):
        names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
        if getattr(args, "twist", None):
            spec = parse_field_spec(f"vars={','.join(names)}; twist={args.twist}")
        else:
            spec = parse_field_spec("vars=" + ",".join(names))
    else:
        raise UsageError("specify the field with --vars (and --twist) or --field")
    return spec


def _box_from_args(args, spec):
    text = str(args.box).strip()
    if ":" not in text:
        return cube(spec.n, int(text))
    bounds = []
    for chunk in text.split(","):
        lo, _, hi = chunk.partition(":")
        try:
            bounds.append((int(lo), int(hi)))
        except ValueError:
            raise UsageError(f"bad box interval {chunk!r}") from None
    if len(bounds) != spec.n:
        raise UsageError(f"box needs {spec.n} intervals, got {len(bounds)}")
    return Box(tuple(bounds))


def _bindings_from_args(args):
    bindings = {}
    if getattr(args, "bind", None):
        for item in args.bind.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise UsageError(f"bad binding {item!r}, expected name=p/q")
            name, _, value = item.partition("=")
            bindings[name.strip()] = parse_rational(value)
    return bindings


def _expr_from_args(args):
    if getattr(args, "expr", None) is not None:
        return args.expr
    if getattr(args, "expr_file", None):
        with open(args.expr_file, "r", encoding="utf-8") as handle:
            return handle.read().strip()
    raise UsageError("an expression is required (--expr or --expr-file)")


def _cov_series(args, spec, box, bindings):
    texts = [t for t in args.cov.split(";") if t.strip()]
    return [expand(parse(t), spec, box=box, bindings=bindings) for t in texts]


def _xvars_from_args(args, spec, count):
    if getattr(args, "xvars", None):
        names = tuple(v.strip() for v in args.xvars.split(",") if v.strip())
    else:
        names = spec.variables[:count]
    if len(names) != count:
        raise UsageError(f"need {count} x-variables, got {len(names)}")
    return names


def _print_series(series, args):
    if args.format == "json":
        print(_compact(series.to_json()))
    else:
        print(series)


def _print_scalar(value, args):
    if args.format == "json":
        print(_compact({"value": str(Fraction(value))}))
    else:
        print(Fraction(value))


# ----------------------------------------------------------------------
# subcommands

def _cmd_expand(args):
    spec = _field_from_args(args)
    box = _box_from_args(args, spec)
    series = expand(parse(_expr_from_args(args)), spec, box=box,
                    bindings=_bindings_from_args(args))
    _print_series(series, args)
    return 0


def _extract_command(args, want):
    spec = _field_from_args(args)
    box = _box_from_args(args, spec)
    bindings = _bindings_from_args(args)
    series = expand(parse(_expr_from_args(args)), spec, box=box, bindings=bindings)
    if args.over:
        over = tuple(v.strip() for v in args.over.split(",") if v.strip())
    else:
        over = spec.variables
    if getattr(args, "cov", None):
        F = _cov_series(args, spec, box, bindings)
        cov = change_of_variables(F, _xvars_from_args(args, spec, len(F)))
        report = {
            "jacobian_number": cov.jnum,
            "initial_exponents": [list(row) for row in cov.leading_exponents],
            "target_field": format_field_spec(cov.target) if cov.target else None,
        }
        if cov.jnum != 0:
            lj_ct = log_jacobian(F, cov.xnames).ct(list(cov.xnames)) \
                if len(cov.xnames) < spec.n else None
            if lj_ct is None:
                check = log_jacobian(F, cov.xnames).ct_scalar() == cov.jnum
            else:
                check = lj_ct.equals_on(cov.jnum)
            report["ct_log_jacobian_equals_jnum"] = bool(check)
        print(_compact(report), file=sys.stderr)
    if len(over) == spec.n:
        exponent = (want,) * spec.n
        _print_scalar(series.coefficient(exponent), args)
    else:
        result = series.ct(list(over)) if want == 0 else series.res(list(over))
        _print_series(result, args)
    return 0


def _cmd_ct(args):
    return _extract_command(args, 0)


def _cmd_res(args):
    return _extract_command(args, -1)


def _jacobian_inputs(args):
    spec = _field_from_args(args)
    box = _box_from_args(args, spec)
    bindings = _bindings_from_args(args)
    texts = [t for t in args.F.split(";") if t.strip()]
    F = [expand(parse(t), spec, box=box, bindings=bindings) for t in texts]
    xnames = _xvars_from_args(args, spec, len(F))
    return spec, F, xnames


def _cmd_jacobian(args):
    _, F, xnames = _jacobian_inputs(args)
    _print_series(jacobian(F, list(xnames)), args)
    return 0


def _cmd_jnum(args):
    _, F, xnames = _jacobian_inputs(args)
    print(jacobian_number(F, list(xnames)))
    return 0


def _cmd_lj(args):
    _, F, xnames = _jacobian_inputs(args)
    _print_series(log_jacobian(F, list(xnames)), args)
    return 0


def _cmd_cov(args):
    spec = _field_from_args(args)
    box = _box_from_args(args, spec)
    bindings = _bindings_from_args(args)
    F = _cov_series(args, spec, box, bindings)
    xnames = _xvars_from_args(args, spec, len(F))
    verdict = residue_verify(parse(args.phi), F, list(xnames),
                             bindings=bindings, box=box, form=args.form)
    print(_compact(verdict.to_json()))
    return 0 if verdict.equal else 1


def _cmd_lagrange(args):
    spec = _field_from_args(args)
    box = _box_from_args(args, spec)
    bindings = _bindings_from_args(args)
    texts = [t for t in args.F.split(";") if t.strip()]
    F = [expand(parse(t), spec, box=box, bindings=bindings) for t in texts]
    if args.inverse:
        inverse = lagrange_inverse(F, args.degree)
        print(_compact([series.to_json() for series in inverse]))
        return 0
    if not args.k:
        raise UsageError("lagrange needs --k k1,k2,... or --inverse")
    k = tuple(int(v) for v in args.k.split(","))
    phi = parse(args.phi) if args.phi else parse(spec.variables[0])
    _print_scalar(lagrange_coefficient(phi, F, k), args)
    return 0


def _cmd_dyson(args):
    a = tuple(int(v) for v in args.a.split(","))
    instance = DysonInstance(len(a), a, generalized=args.generalized)
    lhs = dyson_ct(instance)
    rhs = dyson_rhs(instance)
    print(_compact({"lhs": str(lhs), "rhs": str(rhs), "equal": lhs == rhs}))
    return 0 if lhs == rhs else 1


def _cmd_dixon(args):
    a, b, c = (int(v) for v in args.abc.split(","))
    lhs = dixon_sum(a, b, c)
    rhs = dyson_ct(DysonInstance(3, (a, b, c)))
    print(_compact({"lhs": str(lhs), "rhs": str(rhs), "equal": lhs == rhs}))
    return 0 if lhs == rhs else 1


def _cmd_wilson(args):
    n = args.n
    spec = zspec(n)
    box = cube(n, args.box)
    if args.j:
        _print_series(wilson_v(n, args.j, spec, box), args)
        return 0
    vs = [wilson_v(n, j, spec, box) for j in range(1, n + 1)]
    total = vs[0]
    for v in vs[1:]:
        total = total + v
    # opposing geometric tails pollute the outer shell of the box, so the
    # identities are checked on the interior half-radius region
    inner = cube(n, max(1, args.box // 2))
    report = {"n": n, "sum_is_one": total.equals_on(1, box=inner)}
    if n >= 2:
        names = [spec.variables[j] for j in range(n - 1)]
        lj = log_jacobian(vs[: n - 1], names)
        factor = 1
        for m in range(2, n):
            factor *= m
        if (n - 1) % 2:
            factor = -factor
        # LJ(v_1..v_{n-1}) = (-1)^(n-1) (n-1)! v_n: the sign is the parity of
        # the triangular initial-exponent matrix with diagonal -(n-j)
        report["lj_identity"] = lj.equals_on(vs[n - 1].scale(factor), box=inner)
    print(_compact(report))
    return 0 if all(v for k, v in report.items() if k != "n") else 1


def _cmd_jr(args):
    closed = j_r_closed_form(args.n, args.r)
    det = j_r_determinant(args.n, args.r)
    print(_compact({"n": args.n, "r": args.r, "closed_form": closed,
                    "determinant": det, "equal": closed == det}))
    return 0 if closed == det else 1


# ----------------------------------------------------------------------
# argument plumbing

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mn",
        description="Exact constant-term and residue computations in twisted "
                    "iterated Laurent fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    field = argparse.ArgumentParser(add_help=False)
    field.add_argument("--vars", help="comma separated variable names, least "
                                      "significant first")
    field.add_argument("--twist", help="integer matrix [[...],[...]] of twist rows")
    field.add_argument("--field", help="field spec text: vars=x,y; twist=[[...]]")
    field.add_argument("--box", default="16",
                       help="box radius k for [-k,k] on every coordinate, or "
                            "explicit intervals lo:hi,lo:hi,... per coordinate")
    field.add_argument("--bind", help="parameter bindings, e.g. p=2,q=3/2")
    field.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("expand", parents=[field], help="expand an expression")
    p.add_argument("--expr")
    p.add_argument("--expr-file")
    p.set_defaults(func=_cmd_expand)

    for name, func, blurb in (("ct", _cmd_ct, "constant term"),
                              ("res", _cmd_res, "residue")):
        p = sub.add_parser(name, parents=[field], help=f"{blurb} of an expression")
        p.add_argument("--expr")
        p.add_argument("--expr-file")
        p.add_argument("--over", help="variables to project (default: all)")
        p.add_argument("--cov", help="change-of-variables expressions F1;F2;... "
                                     "(reported on stderr)")
        p.add_argument("--xvars", help="the variables the cov series replace")
        p.set_defaults(func=func)

    for name, func in (("jacobian", _cmd_jacobian), ("jnum", _cmd_jnum),
                       ("lj", _cmd_lj)):
        p = sub.add_parser(name, parents=[field])
        p.add_argument("--F", required=True, help="series expressions F1;F2;...")
        p.add_argument("--xvars")
        p.set_defaults(func=func)

    p = sub.add_parser("cov", parents=[field],
                       help="verify both sides of the residue identity")
    p.add_argument("--phi", required=True, help="slot expression in the x-variables")
    p.add_argument("--cov", required=True, help="F1;F2;...")
    p.add_argument("--xvars")
    p.add_argument("--form", choices=("res", "ct"), default="ct")
    p.set_defaults(func=_cmd_cov)

    p = sub.add_parser("lagrange", parents=[field], help="Lagrange inversion")
    p.add_argument("--F", required=True)
    p.add_argument("--phi")
    p.add_argument("--k", help="coefficient multi-index k1,k2,...")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--degree", type=int, default=10)
    p.set_defaults(func=_cmd_lagrange)

    p = sub.add_parser("dyson", help="Dyson constant-term identity")
    p.add_argument("--a", required=True, help="exponents a1,a2,...")
    p.add_argument("--generalized", action="store_true")
    p.set_defaults(func=_cmd_dyson)

    p = sub.add_parser("dixon", help="Dixon alternating sum vs Dyson CT")
    p.add_argument("--abc", required=True, help="a,b,c")
    p.set_defaults(func=_cmd_dixon)

    p = sub.add_parser("wilson", help="Wilson v_j change-of-variables checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--box", type=int, default=10)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_wilson)

    p = sub.add_parser("jr", help="Jacobian number of the u^(r) family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=_cmd_jr)

    return parser


def _apply_config(argv):
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    extra = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line and not line.startswith("#"):
                extra.extend(shlex.split(line))
    # config flags first so explicit flags win
    return rest[:1] + extra + rest[1:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except MNError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status


if __name__ == "__main__":
    sys.exit(main())
