"""Benchmark harness: a grid of (algorithm, n, lanes, workers) points, CSV
records per repetition, and a speedup table per input size.

Every run's output is validated against the cached reference sort before its
timing is recorded — a wrong sort never produces a number.  The headline
statistic is the minimum over repetitions; mean and standard deviation are
reported alongside.
"""

from __future__ import annotations

import os
import statistics
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .blocks import merge_split
from .engine import run_distributed, write_lane_file
from .hybrid import (
    HybridPlan,
    hybrid_sort_timed,
    inner_sorter,
    parallel_mergesort_timed,
    psrs_baseline,
)
from .network import NETWORK_BUILDERS

ALGORITHMS = ("hybrid-bitonic", "hybrid-oddeven", "par-mergesort", "psrs", "sequential")
_NETWORK_ALGOS = ("hybrid-bitonic", "hybrid-oddeven", "par-mergesort")

CSV_HEADER = "algorithm,n,lanes,workers,repetition,local_sort_ns,merge_ns,total_ns,keys_exchanged"


class BenchError(RuntimeError):
    """A benchmark produced a wrong sort (never recorded) or failed to run."""


def _default_workers() -> tuple[int, ...]:
    cores = os.cpu_count() or 1
    return tuple(sorted({1, 2, 4, cores}))


@dataclass(frozen=True)
class BenchConfig:
    algorithms: tuple[str, ...] = ("hybrid-bitonic", "sequential")
    sizes: tuple[int, ...] = (2 ** 18, 2 ** 20, 2 ** 22)
    lanes: tuple[int, ...] = (4, 8)
    workers: tuple[int, ...] = field(default_factory=_default_workers)
    reps: int = 3
    seed: int = 0
    inner: str = "builtin"
    distributed: bool = False
    csv_path: str | None = None

    def __post_init__(self):
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}; known: {ALGORITHMS}")
        if any(n < 0 for n in self.sizes):
            raise ValueError("sizes must be >= 0")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if any(k < 1 for k in self.lanes) or any(w < 1 for w in self.workers):
            raise ValueError("lanes and workers must be >= 1")
        if any(a in _NETWORK_ALGOS for a in self.algorithms):
            for k in self.lanes:
                if k & (k - 1):
                    raise ValueError(f"lanes must be powers of two for {_NETWORK_ALGOS}")
        inner_sorter(self.inner)  # fail early on unknown sorter names


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    lanes: int
    workers: int
    repetition: int
    local_sort_ns: int
    merge_ns: int
    total_ns: int
    keys_exchanged: int

    def to_csv_row(self) -> str:
        return (
            f"{self.algorithm},{self.n},{self.lanes},{self.workers},{self.repetition},"
            f"{self.local_sort_ns},{self.merge_ns},{self.total_ns},{self.keys_exchanged}"
        )


def records_to_csv(records) -> str:
    return "\n".join([CSV_HEADER, *(r.to_csv_row() for r in records)]) + "\n"


def _dataset(seed: int, n: int) -> np.ndarray:
    # One dataset per (seed, n): every algorithm at a grid point sees the same keys.
    rng = np.random.default_rng([seed, n])
    return rng.integers(-(2 ** 62), 2 ** 62, size=n, dtype=np.int64)


def _run_hybrid(data, kind, lanes, workers, inner, distributed):
    if not distributed:
        plan = HybridPlan(lanes=lanes, inner=inner, network=kind, workers=workers)
        t0 = time.monotonic_ns()
        out, m = hybrid_sort_timed(data, plan)
        total = time.monotonic_ns() - t0
        return out, m.local_sort_ns, m.merge_ns, total, m.run.total_keys_crossed
    network = NETWORK_BUILDERS[kind](lanes.bit_length() - 1)
    chunks = np.array_split(data, lanes)
    with tempfile.TemporaryDirectory(prefix="blocknet-bench-") as tmp:
        paths = []
        for i, chunk in enumerate(chunks):
            path = Path(tmp) / f"lane{i}.bin"
            write_lane_file(path, chunk)
            paths.append(path)
        t0 = time.monotonic_ns()
        lanes_out, dm = run_distributed(
            network, merge_split, paths, workers, inner=inner_sorter(inner)
        )
        total = time.monotonic_ns() - t0
        out = np.concatenate([b.keys for b in lanes_out]) if lanes_out else data[:0]
        return out, dm.local_sort_ns, dm.merge_ns, total, dm.run.total_keys_crossed


def _run_point(algo, data, lanes, workers, inner, distributed):
    """One measured run; returns (output, local_ns, merge_ns, total_ns, exchanged)."""
    if algo == "sequential":
        t0 = time.monotonic_ns()
        out = np.sort(data)
        total = time.monotonic_ns() - t0
        return out, total, 0, total, 0
    if algo in ("hybrid-bitonic", "hybrid-oddeven"):
        kind = algo.removeprefix("hybrid-")
        return _run_hybrid(data, kind, lanes, workers, inner, distributed)
    if algo == "par-mergesort":
        depth = lanes.bit_length() - 1
        t0 = time.monotonic_ns()
        out, local_ns, merge_ns = parallel_mergesort_timed(data, depth, workers, inner)
        total = time.monotonic_ns() - t0
        return out, local_ns, merge_ns, total, 0
    if algo == "psrs":
        lane_inputs = np.array_split(data, lanes)
        t0 = time.monotonic_ns()
        outputs, m = psrs_baseline(lane_inputs, workers, inner)
        total = time.monotonic_ns() - t0
        out = np.concatenate(outputs) if outputs else data[:0]
        return out, m.local_sort_ns, m.merge_ns, total, m.keys_exchanged
    raise BenchError(f"unknown algorithm {algo!r}")


def run_bench(config: BenchConfig, log=None) -> list[BenchRecord]:
    """Run the whole grid; one grid point at a time, outputs validated first."""
    emit = log or (lambda _msg: None)
    records: list[BenchRecord] = []
    for n in config.sizes:
        data = _dataset(config.seed, n)
        reference = np.sort(data)
        for algo in config.algorithms:
            # sequential ignores the lanes/workers axes — one point per n
            grid = [(1, 1)] if algo == "sequential" else [
                (k, w) for k in config.lanes for w in config.workers
            ]
            for lanes, workers in grid:
                for rep in range(config.reps):
                    out, local_ns, merge_ns, total_ns, exchanged = _run_point(
                        algo, data, lanes, workers, config.inner, config.distributed
                    )
                    if not np.array_equal(np.asarray(out), reference):
                        raise BenchError(
                            f"{algo} n={n} lanes={lanes} workers={workers}: wrong sort; "
                            "timing discarded"
                        )
                    records.append(
                        BenchRecord(algo, n, lanes, workers, rep,
                                    local_ns, merge_ns, total_ns, exchanged)
                    )
                best = min(r.total_ns for r in records[-config.reps:])
                emit(f"{algo} n={n} lanes={lanes} workers={workers}: min {best / 1e6:.2f} ms")
    if config.csv_path:
        Path(config.csv_path).write_text(records_to_csv(records))
    return records


def speedup_table(records: list[BenchRecord]) -> str:
    """Per input size: min/mean/stddev per grid point and absolute speedup.

    Speedup basis is the best sequential time at that n when a sequential
    run exists; otherwise each algorithm's own workers=1 minimum (noted).
    """
    lines = []
    sizes = sorted({r.n for r in records})
    for n in sizes:
        at_n = [r for r in records if r.n == n]
        seq = [r.total_ns for r in at_n if r.algorithm == "sequential"]
        basis = min(seq) if seq else None
        lines.append(
            f"# n={n} speedup basis: "
            + (f"sequential min {basis} ns" if basis else "each algorithm's own workers=1 minimum")
        )
        lines.append("algorithm,lanes,workers,min_total_ns,mean_total_ns,stddev_total_ns,speedup")
        points = sorted({(r.algorithm, r.lanes, r.workers) for r in at_n})
        for algo, lanes, workers in points:
            totals = [r.total_ns for r in at_n
                      if (r.algorithm, r.lanes, r.workers) == (algo, lanes, workers)]
            mn = min(totals)
            mean = statistics.fmean(totals)
            sd = statistics.stdev(totals) if len(totals) > 1 else 0.0
            if basis is not None:
                base = basis
            else:
                own = [r.total_ns for r in at_n
                       if r.algorithm == algo and r.lanes == lanes and r.workers == 1]
                base = min(own) if own else mn
            lines.append(f"{algo},{lanes},{workers},{mn},{mean:.0f},{sd:.0f},{base / mn:.3f}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Kernel backend comparison (compiled core vs the array fallback)
# ---------------------------------------------------------------------------


def kernel_bench(sizes=(2 ** 16, 2 ** 20), reps: int = 5, seed: int = 0) -> str:
    """Time the two-way merge kernel on every available backend; returns CSV."""
    lines = ["backend,n,repetition,merge_ns"]
    rng = np.random.default_rng(seed)
    for n in sizes:
        a = np.sort(rng.integers(-(2 ** 62), 2 ** 62, size=n, dtype=np.int64))
        b = np.sort(rng.integers(-(2 ** 62), 2 ** 62, size=n, dtype=np.int64))
        expected = None
        for name, mod in sorted(kernels.available_backends().items()):
            for rep in range(reps):
                t0 = time.monotonic_ns()
                merged = mod.merge(a, b)
                dt = time.monotonic_ns() - t0
                if expected is None:
                    expected = merged
                elif not np.array_equal(merged, expected):
                    raise BenchError(f"backend {name} produced a different merge")
                lines.append(f"{name},{n},{rep},{dt}")
    return "\n".join(lines) + "\n"
