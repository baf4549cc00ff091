"""Command-line interface: ``gen``, ``solve`` and ``bench``.

Exit codes: 0 on success, 1 when a solver component fails, 2 on usage or
input-parsing errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

from .errors import ContractError, InstanceFormatError, InstanceValidationError, PreconditionError
from .generate import CLASSES, COST_REGIMES, GenSpec, generate
from .instance import Params, dumps, load
from .pipeline import solve, solve_exact

EXIT_OK, EXIT_COMPONENT, EXIT_USAGE = 0, 1, 2
CSV_FIELDS = ("seed", "n", "m", "class", "approx", "exact", "ratio")


def _add_gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="number of agents")
    p.add_argument("--m", type=int, required=True, help="number of projects")
    p.add_argument("--class", dest="function_class", choices=CLASSES, default="xos")
    p.add_argument("--costs", choices=COST_REGIMES, default="random")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicontract", description="Multi-project contract design solver")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a seeded random instance")
    _add_gen_flags(gen)
    gen.add_argument("--out", required=True, help="instance JSON path, or - for stdout")

    sol = sub.add_parser("solve", help="solve an instance and print the contract report")
    sol.add_argument("file")
    sol.add_argument("--exact", action="store_true", help="use exhaustive search instead")
    sol.add_argument("--delta", type=float, default=None)
    sol.add_argument("--epsilon", type=float, default=None)
    sol.add_argument("--debug-lp", action="store_true", help="dump the final restricted LP tableau to stderr")

    bench = sub.add_parser("bench", help="compare the solver against exhaustive search on seeded instances")
    bench.add_argument("--count", type=int, required=True)
    _add_gen_flags(bench)
    bench.add_argument("--out", required=True, help="CSV path, or - for stdout")
    return parser


def cmd_gen(spec: GenSpec, out_path) -> None:
    text = dumps(generate(spec))
    if str(out_path) == "-":
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def cmd_solve(path, params: Params, exact: bool = False, debug_lp: bool = False) -> str:
    instance = load(path)
    if exact:
        report = solve_exact(instance, params)
    else:
        report = solve(instance, params, debug=sys.stderr if debug_lp else None)
    return report.dumps()


def bench_rows(count: int, n: int, m: int, function_class: str, costs: str, seed: int) -> list:
    rows = []
    for s in range(seed, seed + count):
        instance = generate(GenSpec(n, m, function_class, costs, s))
        approx = solve(instance).total_revenue
        exact = solve_exact(instance).total_revenue
        ratio = approx / exact if exact > 0 else 1.0
        rows.append({"seed": s, "n": n, "m": m, "class": function_class, "approx": approx, "exact": exact, "ratio": ratio})
    return rows


def cmd_bench(count: int, n: int, m: int, function_class: str, costs: str, seed: int, out_path) -> list:
    rows = bench_rows(count, n, m, function_class, costs, seed)
    handle = sys.stdout if str(out_path) == "-" else open(out_path, "w", newline="")
    try:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if handle is not sys.stdout:
            handle.close()
    return rows


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "gen":
            cmd_gen(GenSpec(args.n, args.m, args.function_class, args.costs, args.seed), args.out)
        elif args.command == "solve":
            overrides = {k: v for k, v in (("delta", args.delta), ("epsilon", args.epsilon)) if v is not None}
            print(cmd_solve(args.file, Params(**overrides), exact=args.exact, debug_lp=args.debug_lp))
        else:
            if args.count < 0:
                raise ValueError("--count must be non-negative")
            rows = cmd_bench(args.count, args.n, args.m, args.function_class, args.costs, args.seed, args.out)
            ratios = [r["ratio"] for r in rows]
            summary = sys.stderr if args.out == "-" else sys.stdout
            if ratios:
                print(
                    f"instances: {len(ratios)}  min ratio: {min(ratios):.6g}  median ratio: {statistics.median(ratios):.6g}",
                    file=summary,
                )
            else:
                print("instances: 0", file=summary)
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPONENT
    except (InstanceFormatError, InstanceValidationError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPONENT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
