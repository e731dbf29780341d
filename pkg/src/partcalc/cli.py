"""Command-line front end: ``partcalc <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import closure as cl
from . import linear as lm
from .errors import (
    BoundExceeded,
    LengthMismatch,
    ParseError,
    PartitionError,
    PreconditionError,
    ShapeError,
    Unsupported,
    VerificationFailed,
)
from .expr import evaluate
from .partition import format_partition

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_UNSUPPORTED = 4
EXIT_BOUND = 5
EXIT_INTERNAL = 70

# most specific first
_ERROR_CODES: list[tuple[type[BaseException], int]] = [
    (VerificationFailed, EXIT_INTERNAL),
    (Unsupported, EXIT_UNSUPPORTED),
    (BoundExceeded, EXIT_BOUND),
    (ParseError, EXIT_INPUT),
    (PartitionError, EXIT_INPUT),
    (PreconditionError, EXIT_INPUT),
    (ShapeError, EXIT_INPUT),
    (LengthMismatch, EXIT_INPUT),
    (OSError, EXIT_INPUT),
    (ValueError, EXIT_INPUT),
]


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside parentheses or braces."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _emit(args: argparse.Namespace, text: str, data: dict) -> None:
    if args.format == "structured":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def _read_matrix(path: str) -> lm.RationalMatrix:
    return lm.RationalMatrix.from_text(Path(path).read_text())


def cmd_eval(args) -> int:
    v = evaluate(args.expr)
    lit = format_partition(v.p)
    _emit(args, f"{lit} loops={v.loops}", {"partition": lit, "loops": v.loops})
    return EXIT_OK


def cmd_classify(args) -> int:
    c = cl.classify_orthogonality(evaluate(args.expr).p)
    _emit(args, f"{c.to_text()}\nclause: {c.citation}", c.to_dict())
    return EXIT_OK


def cmd_closure(args) -> int:
    gens = [evaluate(g).p for item in args.gen for g in split_top_level(item)]
    rules = cl.BASE_RULES | ({cl.INVOLUTE} if args.bs else set())
    cfg = cl.ClosureConfig(args.max_points, args.max_elements, frozenset(rules), args.semantic)
    result = cl.semantic_closure(gens, cfg) if args.semantic else cl.closure(gens, cfg)
    if args.output:
        Path(args.output).write_text(result.to_json())
    lines = [
        f"members={len(result)} saturated={str(result.saturated).lower()} bound_hit={str(result.bound_hit).lower()}",
    ]
    lines += [format_partition(p) for p in result.sorted_members()]
    lines += [f"rule {c.rule}: {c.lemma} -> {', '.join(map(format_partition, c.added)) or 'involution enabled'}" for c in result.citations]
    lines += [f"note: {n}" for n in result.notes]
    _emit(args, "\n".join(lines), result.to_dict())
    return EXIT_OK


def cmd_member(args) -> int:
    report = cl.ClosureResult.from_json(Path(args.report).read_text())
    p = evaluate(args.expr).p
    m = cl.membership(p, report)
    if m.found:
        text = f"Member {format_partition(p)}\n{m.trace.to_text()}"
        data = {"verdict": m.verdict, "partition": format_partition(p), "trace": m.trace.to_dict()}
    else:
        text = f"NotFoundWithinBounds {format_partition(p)}"
        data = {"verdict": m.verdict, "partition": format_partition(p)}
    _emit(args, text, data)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    pred = cl.Predicate.parse(args.pred)
    try:
        k, l = (int(x) for x in args.points.split(","))
    except ValueError:
        raise ParseError(f"bad --points {args.points!r}", 0, "k,l") from None
    found = cl.enumerate_partitions(pred, k, l, args.max_elements)
    lits = [format_partition(p) for p in found]
    text = f"count={len(found)}" + ("".join("\n" + x for x in lits) if args.list else "")
    _emit(args, text, {"predicate": str(pred), "k": k, "l": l, "count": len(found), "partitions": lits})
    return EXIT_OK


def cmd_check(args) -> int:
    p = evaluate(args.p).p
    u = _read_matrix(args.matrix)
    if args.both:
        verdict, _ = lm.check_both(p, u)
        route = "both"
    elif args.intertwiner:
        verdict, route = lm.check_intertwiner(p, u), "intertwiner"
    else:
        verdict, route = lm.check_relation(p, u), "relation"
    _emit(args, verdict.to_text(), {"partition": format_partition(p), "route": route, **verdict.to_dict()})
    return EXIT_OK if verdict.holds else EXIT_FAILS


def cmd_tmap(args) -> int:
    t = lm.t_map(evaluate(args.p).p, args.n)
    rows, cols = t.shape
    _emit(
        args,
        t.to_text(),
        {"partition": format_partition(t.p), "n": t.n, "shape": [rows, cols], "triplets": [list(x) for x in t.triplets()]},
    )
    return EXIT_OK


def cmd_witness_inverse(args) -> int:
    t = lm.right_inverse_witness(evaluate(args.p).p, _read_matrix(args.matrix))
    _emit(args, t.to_text().rstrip("\n"), {"t": [[str(x) for x in row] for row in t.rows]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")

    parser = argparse.ArgumentParser(prog="partcalc", description="Partition calculus and exact relation checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("eval", cmd_eval, "evaluate an expression to a canonical partition")
    sp.add_argument("expr")

    sp = add("classify", cmd_classify, "orthogonality classification of p in P(0,l)")
    sp.add_argument("expr")

    sp = add("closure", cmd_closure, "bounded closure of generators")
    sp.add_argument("--gen", action="append", default=[], help="generator expressions, comma separated or repeated")
    sp.add_argument("--max-points", type=int, default=6)
    sp.add_argument("--max-elements", type=int, default=100_000)
    sp.add_argument("--bs", action="store_true", help="also close under involution and seed pair, copair")
    sp.add_argument("--semantic", action="store_true", help="apply the orthogonality rule pack")
    sp.add_argument("--output", "-o", help="write the structured report to this file")

    sp = add("member", cmd_member, "look up an expression in a saved closure report")
    sp.add_argument("expr")
    sp.add_argument("--in", dest="report", required=True)

    sp = add("enumerate", cmd_enumerate, "brute-force enumeration of P(k,l)")
    sp.add_argument("--pred", default="all", help="all, nc or ncm:<m>")
    sp.add_argument("--points", required=True, help="k,l")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--max-elements", type=int, default=1_000_000)

    sp = add("check", cmd_check, "check R(p) for a rational matrix")
    sp.add_argument("--p", required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--intertwiner", action="store_true", help="use the T_p route")
    sp.add_argument("--both", action="store_true", help="run both routes and cross-check")

    sp = add("tmap", cmd_tmap, "sparse triplets of T_p")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("witness-inverse", cmd_witness_inverse, "right inverse of u from p in P(0,l)")
    sp.add_argument("--p", required=True)
    sp.add_argument("--matrix", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        for kind, code in _ERROR_CODES:
            if isinstance(exc, kind):
                name = "Unsupported" if kind is Unsupported else type(exc).__name__
                print(f"error: {name}: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
