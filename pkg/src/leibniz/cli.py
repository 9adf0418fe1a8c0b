"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for usage, parse and I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from .expansions import (
    MissingHypothesis,
    general_leibniz_noncommutative,
    iterate_expand,
    leibniz_commutative,
)
from .models import UnboundSymbol, brute_force_power, eval_pairpoly
from .op_algebra import format_pairpoly, normalize_commutative
from .parsing import ParseError, parse_model_file, parse_spec_file
from .verification import DEFAULT_CONCRETE_N, run_selftest, run_verify

N_CAP = 20
MODES = ("iterate", "commutative", "noncommutative", "all")


class UsageError(Exception):
    pass


def _check_n(n: int, allow_large: bool, flag: str = "--n") -> None:
    if n < 0:
        raise UsageError(f"{flag} must be non-negative")
    if n > N_CAP and not allow_large:
        raise UsageError(f"{flag} {n} exceeds the cap of {N_CAP}; pass --allow-large to override")


def cmd_expand(args, out) -> int:
    _check_n(args.n, args.allow_large)
    spec = parse_spec_file(args.spec)
    if args.mode == "iterate":
        print(format_pairpoly(iterate_expand(spec, args.n).poly), file=out)
        return 0
    if args.mode == "noncommutative":
        print(format_pairpoly(general_leibniz_noncommutative(spec, args.n)), file=out)
        return 0
    if args.mode == "commutative":
        try:
            poly = leibniz_commutative(spec, args.n)
        except MissingHypothesis as exc:
            raise UsageError(str(exc)) from exc
        print(format_pairpoly(poly), file=out)
        return 0

    expansion = iterate_expand(spec, args.n)
    noncomm = general_leibniz_noncommutative(spec, args.n)
    equal = expansion.poly == noncomm
    print(f"== iterate (raw terms: {expansion.raw_terms})", file=out)
    print(format_pairpoly(expansion.poly), file=out)
    print("== noncommutative", file=out)
    print(format_pairpoly(noncomm), file=out)
    print("== commutative", file=out)
    if spec.missing_hypotheses():
        missing = ", ".join(f"[{s},{t}]" for s, t in spec.missing_hypotheses())
        print(f"not applicable: undeclared {missing}", file=out)
    else:
        comm = leibniz_commutative(spec, args.n)
        print(format_pairpoly(comm), file=out)
        equal = equal and normalize_commutative(expansion.poly, spec.hyp) == comm
    print(f"verdict {'EQUAL' if equal else 'UNEQUAL'}", file=out)
    return 0 if equal else 1


def cmd_verify(args, out) -> int:
    _check_n(args.n_max, args.allow_large, "--n-max")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    spec = parse_spec_file(args.spec)
    model = parse_model_file(args.model)
    env = model.env_for(spec)
    report = run_verify(spec, env, model.hyp, args.n_max, args.trials, args.seed, args.exhaustive)
    print(report.render(), file=out)
    if args.timing:
        print(report.render_timings(), file=sys.stderr)
    return 0 if report.passed else 1


def cmd_eval(args, out) -> int:
    _check_n(args.n, args.allow_large)
    spec = parse_spec_file(args.spec)
    model = parse_model_file(args.model)
    env = model.env_for(spec)
    try:
        a, b = model.element(args.a), model.element(args.b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    brute = brute_force_power(env, args.n, a, b)
    values = [
        ("iterate", eval_pairpoly(iterate_expand(spec, args.n).poly, env, a, b)),
        ("noncommutative", eval_pairpoly(general_leibniz_noncommutative(spec, args.n), env, a, b)),
    ]
    if not spec.missing_hypotheses():
        values.append(("commutative", eval_pairpoly(leibniz_commutative(spec, args.n), env, a, b)))
    print(f"brute force = {brute}", file=out)
    for label, value in values:
        print(f"{label} = {value}", file=out)
    equal = all(value == brute for _, value in values)
    print(f"verdict {'EQUAL' if equal else 'UNEQUAL'}", file=out)
    return 0 if equal else 1


def cmd_selftest(args, out) -> int:
    if args.n_max is not None and args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    report = run_selftest(args.seed, args.n_max)
    print(report.render(), file=out)
    if args.timing:
        print(report.render_timings(), file=sys.stderr)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leibniz", description="Exact powers of generalized derivations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="print the expansion of f^n(ab)")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="noncommutative")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="check a spec against a concrete model")
    p.add_argument("--spec", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--n-max", type=int, default=DEFAULT_CONCRETE_N)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true", help="check identities on basis elements instead of samples")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--timing", action="store_true", help="print suite timings to stderr")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="evaluate f^n(ab) on concrete elements")
    p.add_argument("--spec", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("selftest", help="run every identity suite on seeded random inputs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--timing", action="store_true", help="print suite timings to stderr")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ParseError, UnboundSymbol, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
