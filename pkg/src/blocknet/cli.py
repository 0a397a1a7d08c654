"""Command-line front end.

Subcommands: dump-network, verify, sort, bench, kernel-bench.
Exit codes: 0 pass, 1 verification/benchmark-validation failure, 2 usage or
I/O error.
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import io
import os
import sys
from pathlib import Path

from . import kernels
from .bench import ALGORITHMS, BenchConfig, BenchError, kernel_bench, run_bench, speedup_table
from .blocks import KeyDomainError, merge_split, naive_swap
from .engine import read_lane_file, run_distributed, write_lane_file
from .hybrid import INNER_SORTERS, HybridPlan, hybrid_sort, inner_sorter
from .network import (
    NETWORK_BUILDERS,
    Network,
    NetworkFormatError,
    dump_network,
    parse_network,
    validate_network,
)
from .verify import check_lemma1_relations, find_counterexample, verify_agglomeration, verify_zero_one


def _resolve_network(args) -> Network:
    if getattr(args, "network_file", None):
        network = parse_network(Path(args.network_file).read_text())
        issue = validate_network(network)
        if issue is not None:
            raise NetworkFormatError(f"{args.network_file}: {issue.problem}")
        return network
    return NETWORK_BUILDERS[args.network](args.order)


def cmd_dump_network(args) -> int:
    text = dump_network(_resolve_network(args))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv_mod.writer(buf, lineterminator="\n")
    writer.writerow(["case_id", "verdict", "clause", "witness"])
    for report in reports:
        prefix = report.subject
        if report.ok:
            writer.writerow([f"{prefix}:all", "pass", "", f"{report.cases} cases"])
        for f in report.failures:
            writer.writerow([f"{prefix}:{f.case_id}", "fail", f.clause, f.witness_text()])
    return buf.getvalue()


def cmd_verify(args) -> int:
    network = _resolve_network(args)
    reports = [verify_zero_one(network)]
    witness = None
    if args.comparator == "naive-swap":
        witness = find_counterexample(
            network, naive_swap, domain=args.domain, max_block=args.max_block,
            budget=args.budget, samples=args.samples, seed=args.seed,
        )
    else:
        reports.append(
            verify_agglomeration(
                network, domain=args.domain, max_block=args.max_block,
                budget=args.budget, samples=args.samples, seed=args.seed,
            )
        )
        reports.append(check_lemma1_relations(samples=args.samples, seed=args.seed))
    for report in reports:
        print(report.to_text())
    if witness is not None:
        print(f"counterexample found ({witness.clause}): {witness.detail}")
        print(f"  input:  {witness.frame!r}")
        print(f"  output: {witness.output!r}")
    elif args.comparator == "naive-swap":
        print("no counterexample found in the searched frame space")
    if args.csv:
        Path(args.csv).write_text(_reports_to_csv(reports))
    return 0 if all(r.ok for r in reports) and witness is None else 1


def cmd_sort(args) -> int:
    kind = args.network
    if args.distributed:
        lanes = len(args.inputs)
        if lanes & (lanes - 1):
            raise ValueError(f"distributed mode needs a power-of-two lane count, got {lanes}")
        network = NETWORK_BUILDERS[kind](lanes.bit_length() - 1)
        out_paths = [f"{p}.sorted" for p in args.inputs]
        # Same rule as plain mode: the input extension decides the format for
        # reading and writing, so ".sorted" outputs never flip to binary.
        fmt = args.format or ("txt" if str(args.inputs[0]).endswith(".txt") else "bin")
        run_distributed(
            network, merge_split, args.inputs, args.workers,
            inner=inner_sorter(args.inner), out_paths=out_paths, fmt=fmt,
        )
        for p in out_paths:
            print(p)
        return 0
    if len(args.inputs) != 1:
        raise ValueError("plain sort takes exactly one input file (use --distributed for lanes)")
    path = args.inputs[0]
    fmt = args.format or ("txt" if str(path).endswith(".txt") else "bin")
    arr = read_lane_file(path, fmt)
    plan = HybridPlan(lanes=args.lanes, inner=args.inner, network=kind, workers=args.workers)
    out = hybrid_sort(arr, plan)
    out_path = args.out or f"{path}.sorted"
    write_lane_file(out_path, out, fmt)
    print(out_path)
    return 0


def cmd_bench(args) -> int:
    config = BenchConfig(
        algorithms=tuple(args.algorithms),
        sizes=tuple(args.sizes),
        lanes=tuple(args.lanes),
        workers=tuple(args.workers),
        reps=args.reps,
        seed=args.seed,
        inner=args.inner,
        distributed=args.distributed,
        csv_path=args.csv,
    )
    records = run_bench(config, log=lambda msg: print(msg, file=sys.stderr))
    print(speedup_table(records))
    if args.csv:
        print(f"records written to {args.csv}", file=sys.stderr)
    return 0


def cmd_kernel_bench(args) -> int:
    text = kernel_bench(sizes=tuple(args.sizes), reps=args.reps, seed=args.seed)
    if args.csv:
        Path(args.csv).write_text(text)
        print(f"records written to {args.csv}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    backends = ", ".join(sorted(kernels.available_backends()))
    print(f"active kernel backend: {kernels.backend_name()} (available: {backends})",
          file=sys.stderr)
    return 0


def _add_network_flags(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    p.add_argument("--network", choices=sorted(NETWORK_BUILDERS), default="bitonic",
                   help="network family (default: bitonic)")
    p.add_argument("--order", type=int, default=3,
                   help="network order l; width is 2^l (default: 3)")
    if with_file:
        p.add_argument("--network-file", default=None,
                       help="load the network from a file instead of generating it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocknet",
        description="Block sorting networks: generate, verify, sort, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dump-network", help="print a network in the text format")
    _add_network_flags(p)
    p.add_argument("--out", default=None, help="write to a file instead of stdout")
    p.set_defaults(func=cmd_dump_network)

    p = sub.add_parser("verify", help="run verification suites against a network")
    _add_network_flags(p)
    p.add_argument("--comparator", choices=["merge-split", "naive-swap"],
                   default="merge-split",
                   help="block comparison element to check (naive-swap searches for "
                        "a counterexample and fails when one exists)")
    p.add_argument("--domain", type=int, default=3, help="keys drawn from {0..domain-1}")
    p.add_argument("--max-block", type=int, default=2, help="largest block size in frames")
    p.add_argument("--budget", type=int, default=200_000,
                   help="frame-space size up to which enumeration is exhaustive")
    p.add_argument("--samples", type=int, default=10_000,
                   help="randomized samples beyond the exhaustive budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="write the reports as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sort", help="sort a key file (or one file per lane with --distributed)")
    p.add_argument("inputs", nargs="+", help="input key file(s)")
    p.add_argument("--out", default=None, help="output path (default: INPUT.sorted)")
    p.add_argument("--network", choices=sorted(NETWORK_BUILDERS), default="bitonic")
    p.add_argument("--lanes", type=int, default=4, help="lane count (power of two)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--inner", choices=sorted(INNER_SORTERS), default="builtin")
    p.add_argument("--format", choices=["bin", "txt"], default=None,
                   help="key file format (default: by extension, .txt=text else binary)")
    p.add_argument("--distributed", action="store_true",
                   help="treat each input as one lane; write one sorted file per lane")
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("bench", help="run the benchmark grid and print a speedup table")
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS,
                   default=["hybrid-bitonic", "sequential"])
    p.add_argument("--sizes", nargs="+", type=int, default=[2 ** 18, 2 ** 20, 2 ** 22])
    p.add_argument("--lanes", nargs="+", type=int, default=[4, 8])
    p.add_argument("--workers", nargs="+", type=int, default=None)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inner", choices=sorted(INNER_SORTERS), default="builtin")
    p.add_argument("--distributed", action="store_true",
                   help="run the hybrid algorithms through per-lane files")
    p.add_argument("--csv", default=None, help="write per-repetition records as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("kernel-bench", help="compare merge kernel backends")
    p.add_argument("--sizes", nargs="+", type=int, default=[2 ** 16, 2 ** 20])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_kernel_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.workers is None:
        cores = os.cpu_count() or 1
        args.workers = sorted({1, 2, 4, cores})
    try:
        return args.func(args)
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NetworkFormatError, KeyDomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
