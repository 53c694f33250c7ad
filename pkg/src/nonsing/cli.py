"""Command line front end.

Exit codes: 0 success, 1 a check or suite failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .constructors import coproduct, poset_nerve, product, quotient, standard_simplex
from .io import ParseError, emit_smap, emit_smap_list, emit_sset, parse_pairs, parse_poset, parse_sset
from .mapping import BudgetExceeded, CapOverflow, count_maps, enumerate_maps, exponential
from .nonsingular import desingularize, is_nonsingular
from .sset import SSetError


class UsageError(Exception):
    pass


def threads() -> int:
    """Worker cap from NONSING_THREADS (default 1)."""
    raw = os.environ.get("NONSING_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"NONSING_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"NONSING_THREADS must be a positive integer, got {raw!r}")
    return n


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    try:
        return parse_sset(_read(path), name=os.path.basename(path))
    except SSetError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _json(obj):
    print(json.dumps(obj, indent=2, ensure_ascii=False))


# -- subcommands -------------------------------------------------------------------


def cmd_check(args) -> int:
    X = _load(args.file)
    chk = is_nonsingular(X)
    if chk:
        _json({"nonsingular": True, "cells": len(X)})
        return 0
    w = chk.witness
    _json({"nonsingular": False, "witness": {"cell": w.cell, "k": w.k, "l": w.l}})
    return 1


def cmd_desingularize(args) -> int:
    X = _load(args.file)
    res = desingularize(X)
    _write(args.output, emit_sset(res.reflection))
    if args.output not in (None, "-"):
        _write(args.output + ".unit", emit_smap(res.unit))
    if args.trace:
        _json({"steps": [{"cell": c, "k": k, "l": l} for c, k, l in res.steps]})
    return 0


def cmd_product(args) -> int:
    _write(args.output, emit_sset(product(_load(args.a), _load(args.b))))
    return 0


def cmd_coproduct(args) -> int:
    _write(args.output, emit_sset(coproduct([_load(p) for p in args.files])))
    return 0


def cmd_quotient(args) -> int:
    X = _load(args.file)
    try:
        pairs = parse_pairs(_read(args.pairs))
    except ParseError as exc:
        raise UsageError(f"{args.pairs}: {exc}") from None
    for a, b in pairs:
        for x in (a, b):
            if x.cell not in X.cells:
                raise SSetError(f"{args.pairs}: unknown cell {x.cell!r}")
            if x.deg and max(x.deg) != X.cells[x.cell].dim:
                raise SSetError(f"{args.pairs}: {x!r} is not a simplex of {X.cells[x.cell].id!r}")
    Q, _ = quotient(X, pairs)
    _write(args.output, emit_sset(Q))
    return 0


def cmd_exp(args) -> int:
    X, K = _load(args.x), _load(args.k)
    try:
        E = exponential(X, K, cap=args.cap, budget=args.budget)
    except CapOverflow as exc:
        print(f"cap overflow: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1
    _write(args.output, emit_sset(E))
    return 0


def cmd_maps(args) -> int:
    A, X = _load(args.a), _load(args.x)
    if args.count:
        print(count_maps(A, X))
    else:
        _write(args.output, emit_smap_list(enumerate_maps(A, X)))
    return 0


def cmd_nerve(args) -> int:
    try:
        P = parse_poset(_read(args.file))
    except ParseError as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    _write(args.output, emit_sset(poset_nerve(P, os.path.basename(args.file))))
    return 0


def cmd_simplex(args) -> int:
    if args.n < 0:
        raise UsageError("simplex needs N >= 0")
    _write(args.output, emit_sset(standard_simplex(args.n)))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite

    try:
        report = run_suite(args.suite)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonsing", description="Finite simplicial sets and desingularization.")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--output", help="output file ('-' or omitted: standard output)")

    sp = sub.add_parser("check", help="test non-singularity; exit 1 with a witness if singular")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("desingularize", help="write DX (and OUT.unit with the unit map)")
    sp.add_argument("file")
    out(sp)
    sp.add_argument("--trace", action="store_true", help="print the collapse steps as JSON")
    sp.set_defaults(func=cmd_desingularize)

    sp = sub.add_parser("product", help="the product A x B")
    sp.add_argument("a")
    sp.add_argument("b")
    out(sp)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("coproduct", help="the disjoint union of the inputs")
    sp.add_argument("files", nargs="+")
    out(sp)
    sp.set_defaults(func=cmd_coproduct)

    sp = sub.add_parser("quotient", help="the quotient by the identifications in a pairs file")
    sp.add_argument("file")
    sp.add_argument("--pairs", required=True)
    out(sp)
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("exp", help="the mapping set X^K")
    sp.add_argument("x")
    sp.add_argument("k")
    sp.add_argument("--cap", type=int, help="top degree; degree cap+1 is checked to be degenerate")
    sp.add_argument("--budget", type=int, help="give up after this many enumerated maps")
    out(sp)
    sp.set_defaults(func=cmd_exp)

    sp = sub.add_parser("maps", help="all maps A -> X")
    sp.add_argument("a")
    sp.add_argument("x")
    sp.add_argument("--count", action="store_true", help="print only the number of maps")
    out(sp)
    sp.set_defaults(func=cmd_maps)

    sp = sub.add_parser("nerve", help="the nerve of a poset file")
    sp.add_argument("file")
    out(sp)
    sp.set_defaults(func=cmd_nerve)

    sp = sub.add_parser("simplex", help="the standard simplex Delta[N]")
    sp.add_argument("n", type=int)
    out(sp)
    sp.set_defaults(func=cmd_simplex)

    sp = sub.add_parser("verify", help="run the verification suites")
    sp.add_argument("--suite", default="all", help="'all' or a suite name")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        threads()
        return args.func(args)
    except (UsageError, ParseError, SSetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
