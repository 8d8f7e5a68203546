"""Command-line interface.

Exit codes: 0 success (a `false` verdict included), 1 failed check,
2 usage, parse or input errors, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import automaton as fa
from .interp import (InvariantError, Interpretation, base_square_transform, build_interpretation,
                     digit_embed_transform, interleave_transform, refute_pairing)
from .logic import compile_formula, decide, parse, track_order
from .oracle import check_interpretation


class UsageError(Exception):
    pass


def _load(path: str) -> fa.Dfa:
    try:
        return fa.from_json(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(a: fa.Dfa, fmt: str, out: Optional[str]) -> None:
    text = fa.to_dot(a) if fmt == "dot" else fa.to_json(a)
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from exc


def cmd_decide(args) -> int:
    print("true" if decide(parse(args.formula), args.base) else "false")
    return 0


def cmd_compile(args) -> int:
    f = parse(args.formula)
    a = compile_formula(f, args.base)
    info = sys.stdout if args.out else sys.stderr
    print(f"states: {a.n_states}", file=info)
    print(f"tracks: [{', '.join(track_order(f))}]", file=info)
    _emit(a, args.format, args.out)
    return 0


def cmd_transform(args) -> int:
    a = _load(args.input)
    try:
        if args.kind == "interleave":
            b = interleave_transform(a, args.m, args.r, close_padding=not args.verbatim)
        elif args.kind == "square":
            b = base_square_transform(a, close_padding=not args.verbatim)
        else:
            b = digit_embed_transform(a)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.minimize:
        b = fa.minimize(b)
    info = sys.stdout if args.out else sys.stderr
    print(f"states: {a.n_states} -> {b.n_states}", file=info)
    _emit(b, args.format, args.out)
    return 0


def cmd_interpret(args) -> int:
    interp = build_interpretation(args.source, args.target)
    plan = "; ".join(str(s) for s in interp.plan) or "identity"
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "interpretation.json").write_text(interp.to_json())
    except OSError as exc:
        raise UsageError(f"cannot write bundle to {out}: {exc.strerror}") from exc
    print(f"plan: {plan}")
    for name, a in interp.automata().items():
        print(f"{name}: {a.n_states} states")
    return 0


def cmd_check(args) -> int:
    path = Path(args.bundle)
    if path.is_dir():
        path = path / "interpretation.json"
    try:
        interp = Interpretation.from_json(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read bundle {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    if args.bound <= 0:
        print("PASS vacuous: bound 0")
        return 0
    reports = check_interpretation(interp, args.bound)
    for r in reports:
        print(r)
    return 0 if all(r.ok for r in reports) else 1


def cmd_refute(args) -> int:
    a = _load(args.input)
    try:
        witness = refute_pairing(a)
    except fa.AlphabetMismatchError as exc:
        raise UsageError(str(exc)) from exc
    print(witness)
    return 0


def cmd_equiv(args) -> int:
    a, b = _load(args.first), _load(args.second)
    try:
        word = fa.find_counterexample(a, b)
    except fa.AlphabetMismatchError as exc:
        raise UsageError(str(exc)) from exc
    if word is None:
        print("true")
    else:
        print(f"false {[list(s) for s in word]}")
    return 0


def _base(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("base must be >= 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="buchi", description="Decision procedure and interpretations for Buchi arithmetic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide a sentence")
    p.add_argument("formula")
    p.add_argument("--base", type=_base, default=2)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("compile", help="compile a formula to a minimal automaton")
    p.add_argument("formula")
    p.add_argument("--base", type=_base, default=2)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("transform", help="apply an interpretation transform to an automaton")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--minimize", action="store_true")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("interleave")
    k.add_argument("--m", type=int, required=True)
    k.add_argument("--r", type=int, default=1)
    k.add_argument("--verbatim", action="store_true", help="leave chain states non-final")
    k = kinds.add_parser("square")
    k.add_argument("--verbatim", action="store_true", help="leave intermediate states non-final")
    kinds.add_parser("embed")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("interpret", help="build an interpretation of BA_k in BA_l")
    p.add_argument("--source", type=_base, required=True)
    p.add_argument("--target", type=_base, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("check", help="verify an interpretation bundle against arithmetic")
    p.add_argument("--bundle", required=True)
    p.add_argument("--bound", type=int, default=100)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("refute", help="find a pair misclassified against {(2^k, 2^2k)}")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("equiv", help="compare the languages of two automata")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equiv)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
