"""Command-line front end: detect, inspect, lift, bench.

Exit codes: 0 exchangeable / success, 1 not exchangeable, 2 budget
exhausted, 64 usage error, 65 parse error.  Reports go to stdout,
diagnostics to stderr.  All randomness flows from --master-seed (a fixed
default, never wall-clock entropy).
"""

from __future__ import annotations

import argparse
import sys

from . import benchgen, textfmt
from .buckets import (
    dof_bucket,
    dof_factor,
    enumerate_buckets,
    ordered_potentials,
    partition_args_by_range,
    rows_in_bucket,
)
from .colour import colour_pass
from .detect import BUDGET_EXHAUSTED, DETECTORS, EXCHANGEABLE, Budget
from .errors import DetectionBudgetExceeded, FgError, ParseError

EXIT_OK = 0
EXIT_NOT_EXCHANGEABLE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_PARSE = 65


class _UsageError(Exception):
    def __init__(self, message, prog="fgsym"):
        super().__init__(message)
        self.prog = prog


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message, self.prog)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _add_budget_flags(parser):
    parser.add_argument("--budget-comparisons", type=int, default=None,
                        help="stop after this many full-table comparisons")
    parser.add_argument("--deadline-secs", type=float, default=None,
                        help="cooperative wall-clock deadline per detection")


def _budget(args) -> Budget:
    return Budget(max_comparisons=args.budget_comparisons, deadline_s=args.deadline_secs)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fgsym", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="decide whether two factors are exchangeable")
    p.add_argument("file")
    p.add_argument("factor_a")
    p.add_argument("factor_b")
    p.add_argument("--algo", choices=sorted(DETECTORS), default="deft")
    p.add_argument("--tolerance", default=None, help="intern potentials to multiples of this epsilon")
    _add_budget_flags(p)

    p = sub.add_parser("inspect", help="show argument groups, buckets, and degrees of freedom")
    p.add_argument("file")
    p.add_argument("factor")
    p.add_argument("--tolerance", default=None)

    p = sub.add_parser("lift", help="emit colour classes of variables and factors")
    p.add_argument("file")
    p.add_argument("--algo", choices=sorted(DETECTORS), default="deft")
    p.add_argument("--tolerance", default=None)
    _add_budget_flags(p)

    p = sub.add_parser("bench", help="run the generator/benchmark grid and write CSVs")
    p.add_argument("--n-list", required=True, help="comma-separated arities, e.g. 2,4,6")
    p.add_argument("--p-list", required=True, help="comma-separated shared-potential proportions")
    p.add_argument("--kinds", default="exchangeable,non-exchangeable")
    p.add_argument("--seeds", type=int, default=10, help="replicates per cell")
    p.add_argument("--algos", default="naive,acp,deft")
    p.add_argument("--out", required=True, help="records CSV path; <stem>.agg.csv is written next to it")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--master-seed", type=int, default=benchgen.DEFAULT_MASTER_SEED)
    _add_budget_flags(p)
    return parser


def _load(path, tolerance):
    return textfmt.load(path, tolerance)


def _perm_display(factor_b, perm) -> tuple[str, str]:
    order = [""] * len(perm)
    for i, j in enumerate(perm):
        order[j] = factor_b.args[i].name
    mapping = " ".join(f"{i + 1}->{j + 1}" for i, j in enumerate(perm))
    return " ".join(order), mapping


def cmd_detect(args) -> int:
    fg, _ = _load(args.file, args.tolerance)
    for name in (args.factor_a, args.factor_b):
        if name not in fg.factors:
            return _usage_error(f"no factor named {name!r} in {args.file}")
    f1 = fg.factors[args.factor_a]
    f2 = fg.factors[args.factor_b]
    result = DETECTORS[args.algo](f1, f2, _budget(args))
    print(f"verdict: {result.verdict}")
    if result.witness is not None:
        order, mapping = _perm_display(f2, result.witness)
        print(f"witness: {order}")
        print(f"mapping: {mapping}")
    print(f"table_comparisons: {result.counters.table_comparisons}")
    print(f"bucket_comparisons: {result.counters.bucket_comparisons}")
    print(f"candidates: {result.counters.candidates}")
    print(f"time_ns: {result.elapsed_ns}")
    if result.verdict == EXCHANGEABLE:
        return EXIT_OK
    if result.verdict == BUDGET_EXHAUSTED:
        return EXIT_BUDGET
    return EXIT_NOT_EXCHANGEABLE


def cmd_inspect(args) -> int:
    fg, _ = _load(args.file, args.tolerance)
    if args.factor not in fg.factors:
        return _usage_error(f"no factor named {args.factor!r} in {args.file}")
    f = fg.factors[args.factor]
    print(f"factor {f.name}(" + " ".join(a.name for a in f.args) + ")")
    qualifying = False
    for gi, group in enumerate(partition_args_by_range(f), start=1):
        positions = " ".join(str(p + 1) for p in group.positions)
        values = " ".join(group.range.values)
        print(f"group {gi}: positions {positions}, range {group.range.name} ({values})")
        for bucket in enumerate_buckets(group):
            rows = rows_in_bucket(f, group, bucket)
            pots = ", ".join(f.pool.canonical(int(t)) for t in f.table[rows])
            dof = dof_bucket(f, group, bucket)
            if len(rows) > 1:
                qualifying = True
            print(f"  bucket [{','.join(map(str, bucket))}]: F(b)={dof}, potentials <{pots}>")
    if qualifying:
        print(f"F({f.name}) = {dof_factor(f)}")
    else:
        print(f"no bucket with more than one row; F({f.name}) = 1")
    return EXIT_OK


def cmd_lift(args) -> int:
    fg, evidence = _load(args.file, args.tolerance)
    try:
        colouring = colour_pass(fg, evidence, DETECTORS[args.algo], _budget(args))
    except DetectionBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    for line in colouring.as_lines():
        print(line)
    rv_classes = colouring.rv_classes()
    factor_classes = colouring.factor_classes()
    print(
        f"lifted summary: {len(rv_classes)} rv classes over {len(fg.rvs)} rvs, "
        f"{len(factor_classes)} factor classes over {len(fg.factors)} factors",
        file=sys.stderr,
    )
    return EXIT_OK


def _parse_list(text, conv, flag):
    items = [tok for tok in text.replace(",", " ").split() if tok]
    if not items:
        raise _UsageError(f"{flag} must not be empty", "fgsym bench")
    return tuple(conv(tok) for tok in items)


def cmd_bench(args) -> int:
    try:
        config = benchgen.BenchConfig(
            n_list=_parse_list(args.n_list, int, "--n-list"),
            p_list=_parse_list(args.p_list, float, "--p-list"),
            kinds=_parse_list(args.kinds, str, "--kinds"),
            seeds_per_cell=args.seeds,
            algorithms=_parse_list(args.algos, str, "--algos"),
            max_comparisons=args.budget_comparisons,
            deadline_s=args.deadline_secs,
            jobs=args.jobs,
            master_seed=args.master_seed,
        )
    except ValueError as exc:
        return _usage_error(str(exc))
    records = benchgen.run_benchmark_to_csv(config, args.out)
    print(
        f"wrote {len(records)} records to {args.out} "
        f"and aggregates to {benchgen.aggregate_path(args.out)}",
        file=sys.stderr,
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"{exc.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "detect": cmd_detect,
        "inspect": cmd_inspect,
        "lift": cmd_lift,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"{exc.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
