"""Command-line front end.

Subcommands construct the maximal-symmetry objects (generators, equations,
Lagrangians, first integrals), run the three symmetry checks, apply point
transformations, and reproduce the bundled verification cases.  Reports
are emitted as text or as JSON with the fixed claim schema
{case, claims: [{id, status, residual, paper_ref, millis}]}.

Exit codes: 0 all claims verified, 1 a refutation was found, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

import sympy as sp

from . import casebook, maxsym, noether, transform
from .exprcore import SOL_U, SOL_V, UnsupportedForm, canon
from .grammar import ParseError, parse, render
from .jetcalc import DiffEq, Lagrangian, VectorField


class UsageError(ValueError):
    pass


def _parse_expr(text: str) -> sp.Expr:
    try:
        e = parse(text)
        canon(e)  # validates the elementary-function grammar
        return e
    except (ParseError, UnsupportedForm) as err:
        raise UsageError(str(err)) from err


def _parse_vf(text: str) -> VectorField:
    parts = text.split(";")
    if len(parts) != 2:
        raise UsageError('vector field must be given as "<xi>;<psi>"')
    try:
        return VectorField(_parse_expr(parts[0]), _parse_expr(parts[1]))
    except ValueError as err:
        raise UsageError(str(err)) from err


def _parse_map(text: str) -> transform.PointTransformation:
    pieces = {}
    for chunk in text.split(";"):
        if "=" not in chunk:
            raise UsageError('map must be given as "z=<expr>; w=<expr>"')
        name, _, rhs = chunk.partition("=")
        pieces[name.strip()] = _parse_expr(rhs.strip())
    if set(pieces) != {"z", "w"}:
        raise UsageError('map must define exactly z and w')
    try:
        return transform.PointTransformation(pieces["z"], pieces["w"])
    except (transform.SingularMap, ValueError) as err:
        raise UsageError(str(err)) from err


def _reject_solution_symbols(q_text, *exprs):
    if q_text is None:
        return
    solutions = set(SOL_U) | set(SOL_V)
    for e in exprs:
        if e is not None and sp.sympify(e).free_symbols & solutions:
            raise UsageError("--q fixes a concrete coefficient; inputs must not use u or v")


def _object_report(case, objects) -> dict:
    claims = [
        {
            "id": name,
            "status": "verified",
            "residual": render(expr),
            "paper_ref": "",
            "millis": 0.0,
        }
        for name, expr in objects
    ]
    return {"case": case, "claims": claims}


def emit_report(report: dict, fmt: str = "text") -> str:
    """Serialize a report; field order is fixed for byte-stable output."""
    if fmt == "json":
        return json.dumps(report, indent=2)
    lines = []
    case = report.get("case")
    if case:
        lines.append(f"case {case}")
    for claim in report.get("claims", []):
        status = claim["status"]
        line = f"  {claim['id']}: {status}"
        if status == "refuted-witness" and claim["residual"] not in ("0", ""):
            line += f"  residual = {claim['residual']}"
        elif case is None or status != "verified":
            pass
        if claim.get("paper_ref"):
            line += f"  [{claim['paper_ref']}]"
        lines.append(line)
    if not report.get("claims"):
        lines.append("  (no claims)")
    return "\n".join(lines)


def _deliver(report, args) -> None:
    path = getattr(args, "json", None)
    if path:
        payload = emit_report(report, "json")
        if path == "-":
            print(payload)
        else:
            with open(path, "w") as fh:
                fh.write(payload + "\n")
            print(f"wrote {path}")
    else:
        print(emit_report(report, "text"))


def _cmd_generators(args) -> int:
    gens = maxsym.generators(args.n)
    objects = []
    for name, vf in gens.by_name().items():
        objects.append((f"{name}.xi", canon(vf.xi)))
        objects.append((f"{name}.psi", canon(vf.psi)))
    report = _object_report(None, objects)
    if args.json:
        _deliver(report, args)
    else:
        for name, vf in gens.by_name().items():
            print(f"{name} = ({render(canon(vf.xi))}) d/dx + ({render(canon(vf.psi))}) d/dy")
    return 0


def _cmd_build_lode(args) -> int:
    eq = maxsym.build_lode(args.n)
    delta = eq.delta
    if args.q is not None:
        delta = canon(casebook._specialize_q(delta, _parse_expr(args.q)))
    report = _object_report(None, [(f"Delta{args.n}", delta)])
    if args.json:
        _deliver(report, args)
    else:
        print(render(delta))
    return 0


def _cmd_lagrangian(args) -> int:
    ctx = maxsym.SourceContext.make_symbolic()
    builders = {
        "canonical": maxsym.canonical_lagrangian,
        "transformed": lambda n: maxsym.transformed_lagrangian(n, ctx),
        "natural": lambda n: maxsym.natural_lagrangian(n, ctx),
    }
    lag = builders[args.kind](args.n)
    report = _object_report(None, [(f"L{args.n}.{args.kind}", canon(lag.density))])
    if args.json:
        _deliver(report, args)
    else:
        print(render(canon(lag.density)))
    return 0


def _cmd_check(args) -> int:
    vf = _parse_vf(args.vf)
    q_expr = _parse_expr(args.q) if args.q is not None else None
    if args.order is None:
        raise UsageError("check needs an explicit --order matching the input")
    if args.kind == "variational":
        if args.lagrangian is None:
            raise UsageError("variational checks need --lagrangian <expr> --order m")
        density = _parse_expr(args.lagrangian)
        _reject_solution_symbols(args.q, density, vf.xi, vf.psi)
        if q_expr is not None:
            density = casebook._specialize_q(density, q_expr)
            ctx = None
        else:
            ctx = maxsym.SourceContext.make_symbolic()
        try:
            lag = Lagrangian(density, args.order)
        except ValueError as err:
            raise UsageError(str(err)) from err
        verdict = noether.variational_check(vf, lag, ctx)
    else:
        if args.eq is None:
            raise UsageError(f"{args.kind} checks need --eq <expr> --order n")
        delta = _parse_expr(args.eq)
        _reject_solution_symbols(args.q, delta, vf.xi, vf.psi)
        if q_expr is not None:
            delta = casebook._specialize_q(delta, q_expr)
            ctx = None
        else:
            ctx = maxsym.SourceContext.make_symbolic()
        try:
            eq = DiffEq(sp.sympify(delta), args.order)
        except ValueError as err:
            raise UsageError(str(err)) from err
        checker = noether.lie_symmetry_check if args.kind == "lie" else noether.divergence_check
        verdict = checker(vf, eq, ctx)
    status = "verified" if verdict.holds else "refuted-witness"
    report = {
        "case": None,
        "claims": [
            {
                "id": f"{args.kind}-symmetry",
                "status": status,
                "residual": render(canon(verdict.witness)),
                "paper_ref": "",
                "millis": 0.0,
            }
        ],
    }
    _deliver(report, args)
    return 0 if verdict.holds else 1


def _cmd_first_integral(args) -> int:
    vf = _parse_vf(args.vf)
    ctx = maxsym.SourceContext.make_symbolic()
    eq = maxsym.build_lode(args.n, ctx)
    q_expr = _parse_expr(args.q) if args.q is not None else None
    if q_expr is not None:
        _reject_solution_symbols(args.q, vf.xi, vf.psi)
        eq = DiffEq(canon(casebook._specialize_q(eq.delta, q_expr)), args.n)
        ctx = None
    try:
        result = noether.first_integral(vf, eq, ctx)
    except noether.NotADivergenceSymmetry as err:
        print(f"not a divergence symmetry: {err}", file=sys.stderr)
        return 1
    if args.json:
        _deliver(_object_report(None, [("F", result.expr), ("Q", result.q)]), args)
    else:
        print(render(sp.expand(result.expr)))
    return 0


def _cmd_transform(args) -> int:
    sigma = _parse_map(args.map)
    given = [opt for opt in (args.eq, args.lagrangian, args.vf, args.integral) if opt is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --eq, --lagrangian, --vf, --integral")
    try:
        if args.eq is not None:
            if args.order is None:
                raise UsageError("--eq needs --order n")
            eq = DiffEq(_parse_expr(args.eq), args.order)
            out = transform.transform_equation(eq, sigma)
            objects = [("Delta", out.delta)]
        elif args.lagrangian is not None:
            if args.order is None:
                raise UsageError("--lagrangian needs --order m")
            lag = Lagrangian(_parse_expr(args.lagrangian), args.order)
            out = transform.transform_lagrangian(lag, sigma)
            objects = [("L", out.density)]
        elif args.vf is not None:
            vf = transform.pushforward(_parse_vf(args.vf), sigma)
            objects = [("xi", vf.xi), ("psi", vf.psi)]
        else:
            objects = [("F", transform.transform_first_integral(_parse_expr(args.integral), sigma))]
    except (transform.SingularMap, transform.MissingInverse, ValueError) as err:
        if isinstance(err, UsageError):
            raise
        raise UsageError(str(err)) from err
    if args.json:
        _deliver(_object_report(None, objects), args)
    else:
        for name, expr in objects:
            print(f"{name} = {render(canon(expr))}")
    return 0


def _cmd_reproduce(args) -> int:
    if args.case == "all":
        reports = casebook.run_all()
    else:
        try:
            reports = [casebook.run_case(args.case)]
        except KeyError as err:
            raise UsageError(str(err)) from err
    ok = all(r.verified for r in reports)
    merged = (
        reports[0].as_dict()
        if len(reports) == 1
        else {"case": "all", "claims": [c for r in reports for c in r.as_dict()["claims"]]}
    )
    _deliver(merged, args)
    summary = "all claims verified" if ok else "refutations found"
    print(summary, file=sys.stderr)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odesym",
        description="Symmetries, Lagrangians and first integrals of ODEs of maximal symmetry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generators", help="the n+4 point-symmetry generators")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_generators)

    p = sub.add_parser("build-lode", help="monic normal-form equation of maximal symmetry")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", metavar="EXPR")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_build_lode)

    p = sub.add_parser("lagrangian", help="canonical, transformed or natural Lagrangian")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("canonical", "transformed", "natural"), required=True)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_lagrangian)

    p = sub.add_parser("check", help="Lie point / variational / divergence symmetry check")
    p.add_argument("--kind", choices=("lie", "variational", "divergence"), required=True)
    p.add_argument("--vf", required=True, metavar='"XI;PSI"')
    p.add_argument("--eq", metavar="EXPR")
    p.add_argument("--lagrangian", metavar="EXPR")
    p.add_argument("--order", type=int)
    p.add_argument("--q", metavar="EXPR")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("first-integral", help="Noether first integral of a divergence symmetry")
    p.add_argument("--vf", required=True, metavar='"XI;PSI"')
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", metavar="EXPR")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_first_integral)

    p = sub.add_parser("transform", help="apply a point transformation")
    p.add_argument("--map", required=True, metavar='"z=EXPR; w=EXPR"')
    p.add_argument("--eq", metavar="EXPR")
    p.add_argument("--lagrangian", metavar="EXPR")
    p.add_argument("--vf", metavar='"XI;PSI"')
    p.add_argument("--integral", metavar="EXPR")
    p.add_argument("--order", type=int)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("reproduce", help="run a verification case (C1..C7) or all")
    p.add_argument("case", choices=(*casebook.CASE_IDS, "all"))
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (maxsym.BadOrder, maxsym.OddOrder) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
