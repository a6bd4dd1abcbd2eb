"""Command-line front end: ``pathart {gen,bench,oracle,validcells}``.

Exit codes: 0 ok, 2 input/parse error, 3 unsatisfiable or search exhausted,
4 acceptance cap hit, 5 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import expr as ex
from .bench import METHODS, Knobs, bench_matrix, format_rows, run_method
from .errors import AcceptanceTooLow, DegenerateDomain, Exhausted, ParseError, UnsatProven
from .grid import cell_label, parse_domain
from .oracle import DEFAULT_POINT_LIMIT, OracleRefused, run_oracle
from .search import find_valid_region

EXIT_OK, EXIT_INPUT, EXIT_UNSAT, EXIT_CAP, EXIT_INTERNAL = 0, 2, 3, 4, 5


class InvariantViolation(RuntimeError):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_problem(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--condition", help="path condition text")
    src.add_argument("--condition-file", type=Path, help="file holding the path condition")
    p.add_argument("--domain", required=True, help='e.g. "x:int:0..15;y:int:0..15"')


def _add_knobs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples-per-cell", type=int, default=8,
                   help="expansion probes per neighbour band (default 8)")
    p.add_argument("--beta", type=float, default=0.25, help="band fraction (default 0.25)")
    p.add_argument("--n-max", type=int, default=None,
                   help="refine up to this resolution; default: stay at n and restart")
    p.add_argument("--cap-factor", type=float, default=1000)
    p.add_argument("--no-retest", action="store_true",
                   help="never re-probe a cell already found invalid")
    p.add_argument("--probe-budget", type=int, default=10**6)


def _knobs(args) -> Knobs:
    return Knobs(args.samples_per_cell, args.beta, args.n_max, args.cap_factor,
                 not args.no_retest, args.probe_budget)


def _condition_text(args) -> str:
    if args.condition is not None:
        return args.condition
    return args.condition_file.read_text(encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathart",
        description="Path-oriented random test data generation (RT, PRT, grid-search ART).",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate one test suite")
    _add_problem(gen)
    gen.add_argument("--method", choices=METHODS, required=True)
    gen.add_argument("--n", "--k", dest="n", type=int, default=4,
                     help="grid resolution (prt k / art n)")
    gen.add_argument("--requested", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="write accepted points, one per line")
    gen.add_argument("--dump-rejects", type=Path, help="write rejected points here")
    _add_knobs(gen)

    bench = sub.add_parser("bench", help="run a benchmark matrix")
    _add_problem(bench)
    bench.add_argument("--methods", default="rt,prt,art")
    bench.add_argument("--n", "--k", dest="n", type=_int_list, default=[4, 5, 6])
    bench.add_argument("--requested", type=_int_list,
                       default=[100, 500, 1000, 2000, 5000, 10000])
    bench.add_argument("--trials", type=int, default=30)
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", type=Path)
    bench.add_argument("--format", choices=("csv", "tsv", "markdown"), default="csv")
    _add_knobs(bench)

    oracle = sub.add_parser("oracle", help="brute-force satisfying fraction and cell map")
    _add_problem(oracle)
    oracle.add_argument("--n", type=int, default=None)
    oracle.add_argument("--montecarlo", type=int, default=None, metavar="N")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--point-limit", type=int, default=DEFAULT_POINT_LIMIT)

    vc = sub.add_parser("validcells", help="run the grid search once and list valid cells")
    _add_problem(vc)
    vc.add_argument("--n", type=int, default=4)
    vc.add_argument("--seed", type=int, default=0)
    _add_knobs(vc)
    return parser


def _fmt_point(p) -> str:
    return ",".join(str(x) if isinstance(x, int) else repr(x) for x in p)


def cmd_gen(args) -> int:
    pc, box = ex.parse_condition(_condition_text(args)), parse_domain(args.domain)
    knobs = _knobs(args)
    reject_file = open(args.dump_rejects, "w") if args.dump_rejects else None
    try:
        on_reject = (lambda p: reject_file.write(_fmt_point(p) + "\n")) if reject_file else None
        n = None if args.method == "rt" else args.n
        report = run_method(args.method, pc, box, n, args.requested, args.seed, knobs, on_reject)
    finally:
        if reject_file:
            reject_file.close()
    for p in report.accepted:
        if not ex.eval_condition(pc, box.valuation(p)):
            raise InvariantViolation(f"accepted point {p} does not satisfy the condition")
    print(report.summary())
    if args.out:
        args.out.write_text("".join(_fmt_point(p) + "\n" for p in report.accepted))
    return EXIT_OK


def cmd_bench(args) -> int:
    cond = _condition_text(args)
    ex.parse_condition(cond)
    parse_domain(args.domain)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ParseError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if args.trials < 1 or any(q < 1 for q in args.requested):
        raise ParseError("trials and requested values must be >= 1")
    rows = bench_matrix(cond, args.domain, methods, args.n, args.requested, args.trials,
                        args.seed, _knobs(args), args.jobs)
    for r in rows:
        if r.note:
            print(f"note: method={r.method} n={r.n} requested={r.requested}: {r.note}",
                  file=sys.stderr)
    table = format_rows(rows, args.format)
    if args.out:
        args.out.write_text(table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def cmd_oracle(args) -> int:
    pc, box = ex.parse_condition(_condition_text(args)), parse_domain(args.domain)
    rep = run_oracle(pc, box, args.n, args.montecarlo, args.seed, args.point_limit)
    print(f"mode={rep.mode} total={rep.total} satisfying={rep.count} "
          f"fraction={rep.fraction:.4f} rejection={1 - rep.fraction:.4f}")
    if rep.mode == "montecarlo":
        lo, hi = rep.wilson()
        print(f"wilson95=[{lo:.4f}, {hi:.4f}]")
    if rep.grid is not None:
        print(f"n={rep.n} valid_cells={len(rep.valid_cells)}/{rep.grid.cell_count}")
        for c in sorted(rep.valid_map, key=lambda c: _label_key(rep.grid, c)):
            state = "valid" if rep.valid_map[c] else "invalid"
            print(f"{_label(rep.grid, c)}{c} {state}")
    return EXIT_OK


def _label(grid, c) -> str:
    return f"{cell_label(grid, c)} " if grid.d == 2 else ""


def _label_key(grid, c):
    if grid.d == 2:
        return int(cell_label(grid, c)[2:])
    return c


def cmd_validcells(args) -> int:
    pc, box = ex.parse_condition(_condition_text(args)), parse_domain(args.domain)
    cfg = _knobs(args).search_config(args.n)
    region = find_valid_region(pc, box, cfg, random.Random(args.seed))
    grid = region.grid
    print(f"n={grid.n} seed={args.seed} valid={len(region.valid)}/{grid.cell_count} "
          f"probes={region.probes_used}{' truncated' if region.truncated else ''}")
    for c in sorted(region.valid, key=lambda c: _label_key(grid, c)):
        print(f"{_label(grid, c)}{c} witness=({_fmt_point(region.witnesses[c])})")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "bench": cmd_bench, "oracle": cmd_oracle,
            "validcells": cmd_validcells}


def _fail(exc: BaseException, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "exit": code, "message": str(exc)}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, DegenerateDomain, OracleRefused, ex.UnboundVariable,
            OSError, ValueError) as exc:
        return _fail(exc, EXIT_INPUT)
    except (Exhausted, UnsatProven) as exc:
        return _fail(exc, EXIT_UNSAT)
    except AcceptanceTooLow as exc:
        return _fail(exc, EXIT_CAP)
    except InvariantViolation as exc:
        return _fail(exc, EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
