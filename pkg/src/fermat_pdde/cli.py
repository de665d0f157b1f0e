"""Command-line front-end.

Subcommands::

    verify <file>          check the candidate in a problem file
    construct --theorem .. build a solution family member and verify it
    order <file|expr>      estimate the growth order exponent
    fermat --kind ..       build an f^m + g^m = 1 pair and verify it

Exit codes: 0 verification passed, 1 verification failed (or estimation
impossible), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .backends import default_backend
from .construct import (
    construct_cor1,
    construct_cor2,
    construct_fermat_pair,
    construct_legacy_xw,
    construct_t1,
    construct_t2,
    T1Params,
    T2Params,
)
from .errors import EstimationError, PDDEError, ParseError
from .expr import Const, Expr, Wp, to_string
from .operators import PDDEProblem, residual, scale_terms
from .parser import parse
from .periodic import make_periodic, make_polynomial_quasi_periodic
from .problemfile import load_problem, policy_from_dict
from .verify import SamplingPolicy, check_residual, estimate_order

__all__ = ["main"]

_THEOREMS = ("t1-i", "t1-ii", "t2-i", "t2-ii", "cor1", "cor2", "equ1", "equ2")
_FERMAT_KINDS = {"cos-sin": "cos_sin", "mobius": "mobius", "cubic": "cubic"}


def _add_policy_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--samples", type=int, default=None, help="sample count (default 200)")
    sp.add_argument("--radius", type=float, default=None, help="polydisc radius (default 2)")
    sp.add_argument("--tol", type=float, default=None, help="relative tolerance (default 1e-8)")
    sp.add_argument("--seed", type=int, default=None, help="sampling seed (default 42)")
    sp.add_argument("--pole-eps", type=float, default=None, help="pole-avoidance threshold (default 1e-8)")


def _add_format_flag(sp: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps the top-level value when the flag is not repeated here
    sp.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS,
                    help="text report or one JSON document")


def _policy_with_overrides(base: SamplingPolicy, args) -> SamplingPolicy:
    fields = {
        "samples": args.samples,
        "radius": args.radius,
        "tol": args.tol,
        "seed": args.seed,
        "pole_eps": args.pole_eps,
    }
    kwargs = {k: (v if v is not None else getattr(base, k)) for k, v in fields.items()}
    return SamplingPolicy(**kwargs)


def _parse_constant(text: str, what: str) -> complex:
    e = parse(text, 1)
    if not isinstance(e, Const):
        raise ParseError(f"{what} must be a constant expression, got {text!r}", 0)
    return e.value


def _parse_c(text: str) -> tuple[complex, ...]:
    parts = [p for p in text.split(",")]
    if not parts:
        raise ParseError("empty shift vector", 0)
    return tuple(_parse_constant(p.strip(), "shift component") for p in parts)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "machine":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _report_lines(report) -> list[str]:
    return report.to_text().splitlines()


def cmd_verify(args) -> int:
    loaded = load_problem(args.file)
    policy = _policy_with_overrides(loaded.policy, args)
    rep = check_residual(
        residual(loaded.problem, loaded.f),
        scale_terms(loaded.problem, loaded.f),
        policy,
        loaded.problem.n,
    )
    payload = {"file": loaded.path, "report": rep.to_dict()}
    if loaded.expected_status is not None:
        payload["expected_status"] = loaded.expected_status
    lines = [f"file: {loaded.path}"]
    if loaded.expected_status is not None:
        lines.append(f"expected_status: {loaded.expected_status}")
    lines += _report_lines(rep)
    _emit(args, payload, lines)
    return 0 if rep.passed else 1


def _generated_g(theorem: str, n: int, c, seed: int, terms: int) -> Expr:
    c1 = c[0]
    if theorem in ("t1-i",):
        return make_polynomial_quasi_periodic(c[1:], c1, seed=seed, basis="t1")
    if theorem in ("t1-ii", "cor1"):
        return make_periodic(c[1:], terms, seed=seed, basis="t1")
    cprime_t2 = (c[1] - c[0],) + tuple(c[2:])
    if theorem == "t2-i":
        return make_polynomial_quasi_periodic(cprime_t2, c1, seed=seed, basis="t2")
    if theorem in ("t2-ii", "cor2"):
        return make_periodic(cprime_t2, terms, seed=seed, basis="t2")
    if theorem == "equ1":
        return make_periodic((c[1],), terms, seed=seed, basis="t1")
    return make_periodic((c[1] - c[0],), terms, seed=seed, basis="t2")


def cmd_construct(args) -> int:
    theorem = args.theorem
    c = _parse_c(args.c)
    n = args.n if args.n is not None else (2 if theorem in ("equ1", "equ2") else len(c))
    if len(c) != n:
        raise ParseError(f"--c has {len(c)} components but n = {n}", 0)
    if args.g is not None:
        g = parse(args.g, n)
    else:
        g = _generated_g(theorem, n, c, args.gen_seed, args.gen_terms)
    phi = parse(args.phi, n)

    if theorem == "t1-i":
        f, problem = construct_t1(T1Params(n=n, c=c, form="I", g_part=g, phi=phi))
    elif theorem == "t1-ii":
        f, problem = construct_t1(T1Params(n=n, c=c, form="II", g_part=g, phi=phi))
    elif theorem == "t2-i":
        f, problem = construct_t2(T2Params(n=n, c=c, form="I", g_part=g, phi=phi))
    elif theorem == "t2-ii":
        f, problem = construct_t2(T2Params(n=n, c=c, form="II", g_part=g, phi=phi))
    elif theorem == "cor1":
        f, problem = construct_cor1(n, c, g)
    elif theorem == "cor2":
        f, problem = construct_cor2(n, c, g)
    else:
        f, problem = construct_legacy_xw(theorem, g, c)

    policy = _policy_with_overrides(SamplingPolicy(), args)
    rep = check_residual(residual(problem, f), scale_terms(problem, f), policy, problem.n)
    payload = {
        "theorem": theorem,
        "n": n,
        "f": to_string(f),
        "g_part": to_string(g),
        "report": rep.to_dict(),
    }
    lines = [
        f"theorem: {theorem}",
        f"g_part: {to_string(g)}",
        f"f = {to_string(f)}",
    ] + _report_lines(rep)
    _emit(args, payload, lines)
    return 0 if rep.passed else 1


def cmd_order(args) -> int:
    target = args.target
    if os.path.isfile(target):
        loaded = load_problem(target)
        f, n = loaded.f, loaded.problem.n
        label = loaded.path
    else:
        if args.n is None:
            raise ParseError("--n is required when the target is an expression", 0)
        f, n = parse(target, args.n), args.n
        label = target
    radii = None
    if args.radii:
        radii = tuple(float(r) for r in args.radii.split(","))
    est = estimate_order(f, n, radii=radii, directions=args.directions, seed=args.seed)
    payload = {"target": label, "estimate": est.to_dict()}
    _emit(args, payload, [f"target: {label}"] + est.to_text().splitlines())
    return 0


def cmd_fermat(args) -> int:
    kind = _FERMAT_KINDS[args.kind]
    h = parse(args.h, args.n)
    f, g = construct_fermat_pair(kind, h)
    m = 3 if kind == "cubic" else 2
    problem = PDDEProblem(kind="fermat", n=args.n, m1=m, g=g)
    default_tol = 1e-7 if kind == "cubic" else 1e-12
    base = SamplingPolicy(tol=default_tol)
    policy = _policy_with_overrides(base, args)
    guards = None
    if kind == "mobius":
        guards = [(Const(1.0) + h**2, 0.5)]
    elif kind == "cubic":
        guards = [(Wp(h), 0.1)]
    rep = check_residual(residual(problem, f), scale_terms(problem, f), policy, args.n, guards=guards)
    payload = {
        "kind": args.kind,
        "m": m,
        "f": to_string(f),
        "g": to_string(g),
        "report": rep.to_dict(),
    }
    lines = [
        f"kind: {args.kind} (power m = {m})",
        f"f = {to_string(f)}",
        f"g = {to_string(g)}",
    ] + _report_lines(rep)
    _emit(args, payload, lines)
    return 0 if rep.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fermat-pdde",
        description="Construct and verify solution families of Fermat-type "
        "partial differential-difference equations on C^n.",
    )
    ap.add_argument("--format", choices=("text", "machine"), default="text",
                    help="text report or one JSON document")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="verify the candidate in a problem file")
    sp.add_argument("file")
    _add_policy_flags(sp)
    _add_format_flag(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("construct", help="build a family member and verify it")
    sp.add_argument("--theorem", choices=_THEOREMS, required=True)
    sp.add_argument("--n", type=int, default=None, help="dimension (default: length of --c)")
    sp.add_argument("--c", required=True, help="shift vector: comma-separated constants, e.g. '0,pi*i,pi*i'")
    sp.add_argument("--g", default=None, help="periodic/polynomial part (generated when omitted)")
    sp.add_argument("--phi", default="1", help="right side for t1-*/t2-* (default 1)")
    sp.add_argument("--gen-seed", type=int, default=0, help="seed for the generated g part")
    sp.add_argument("--gen-terms", type=int, default=2, help="terms in the generated g part")
    _add_policy_flags(sp)
    _add_format_flag(sp)
    sp.set_defaults(fn=cmd_construct)

    sp = sub.add_parser("order", help="estimate the growth order exponent")
    sp.add_argument("target", help="problem file or expression string")
    sp.add_argument("--n", type=int, default=None, help="dimension (for expression targets)")
    sp.add_argument("--radii", default=None, help="comma-separated radius ladder")
    sp.add_argument("--directions", type=int, default=200)
    sp.add_argument("--seed", type=int, default=42)
    _add_format_flag(sp)
    sp.set_defaults(fn=cmd_order)

    sp = sub.add_parser("fermat", help="build an f^m + g^m = 1 pair and verify it")
    sp.add_argument("--kind", choices=tuple(_FERMAT_KINDS), required=True)
    sp.add_argument("--h", required=True, help="parametrizing expression")
    sp.add_argument("--n", type=int, required=True, help="dimension")
    _add_policy_flags(sp)
    _add_format_flag(sp)
    sp.set_defaults(fn=cmd_fermat)
    return ap


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except EstimationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except PDDEError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
