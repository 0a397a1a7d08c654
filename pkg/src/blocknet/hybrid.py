"""Network-backed hybrid sorting plus the two comparison baselines.

The hybrid algorithm splits the input into contiguous lanes, sorts each lane
with a pluggable inner sorter, then lets a block sorting network do all the
merging; concatenating the lanes afterwards yields the sorted sequence.  The
baselines — a divide-and-conquer mergesort and PSRS — exist so benchmarks can
contrast the network's fixed point-to-point transfers with tree merges and
with PSRS's all-to-all exchange.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .blocks import Block, as_keys, merge_split
from .engine import BlockFrame, RunMetrics, _pool_map, run_parallel
from .network import NETWORK_BUILDERS

_MERGESORT_LEAF = 2048


@dataclass(frozen=True)
class InnerSorter:
    """A named total-order sort over a 1-D key array (returns a new array)."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, arr: np.ndarray) -> np.ndarray:
        return self.fn(arr)


def _mergesort(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] <= _MERGESORT_LEAF:
        return np.sort(arr)
    mid = arr.shape[0] // 2
    return kernels.merge(_mergesort(arr[:mid]), _mergesort(arr[mid:]))


def _insertion_sort(arr: np.ndarray) -> np.ndarray:
    # Quadratic; exists to demonstrate inner-sorter pluggability at test scale.
    out = np.asarray(arr).copy()
    for i in range(1, out.shape[0]):
        v = out[i]
        j = i - 1
        while j >= 0 and out[j] > v:
            out[j + 1] = out[j]
            j -= 1
        out[j + 1] = v
    return out


INNER_SORTERS: dict[str, InnerSorter] = {
    "builtin": InnerSorter("builtin", np.sort),
    "mergesort": InnerSorter("mergesort", _mergesort),
    "insertion": InnerSorter("insertion", _insertion_sort),
}


def inner_sorter(which) -> InnerSorter:
    """Resolve a sorter name (or pass an InnerSorter/callable through)."""
    if isinstance(which, InnerSorter):
        return which
    if callable(which):
        return InnerSorter(getattr(which, "__name__", "custom"), which)
    try:
        return INNER_SORTERS[which]
    except KeyError:
        raise ValueError(
            f"unknown inner sorter {which!r}; known: {sorted(INNER_SORTERS)}"
        ) from None


@dataclass(frozen=True)
class HybridPlan:
    """How to run a hybrid sort: lane count, inner sorter, network kind, workers."""

    lanes: int = 4
    inner: object = "builtin"
    network: str = "bitonic"
    workers: int = 1

    def __post_init__(self):
        if self.lanes < 1 or (self.lanes & (self.lanes - 1)) != 0:
            raise ValueError(f"lanes must be a power of two, got {self.lanes}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.network not in NETWORK_BUILDERS:
            raise ValueError(
                f"unknown network kind {self.network!r}; known: {sorted(NETWORK_BUILDERS)}"
            )
        object.__setattr__(self, "inner", inner_sorter(self.inner))

    @property
    def order(self) -> int:
        return self.lanes.bit_length() - 1


@dataclass(frozen=True)
class HybridMetrics:
    local_sort_ns: int
    merge_ns: int
    run: RunMetrics


def hybrid_sort_timed(xs, plan: HybridPlan) -> tuple[np.ndarray, HybridMetrics]:
    """hybrid_sort plus a phase-timing breakdown (local sorts vs network merge)."""
    in_dtype = xs.dtype if isinstance(xs, np.ndarray) else None
    arr = as_keys(xs)
    chunks = np.array_split(arr, plan.lanes)  # contiguous, sizes differ by <= 1

    t0 = time.monotonic_ns()
    sorted_chunks = _pool_map(plan.inner, chunks, plan.workers)
    local_sort_ns = time.monotonic_ns() - t0

    frame = BlockFrame([Block.from_sorted(as_keys(c)) for c in sorted_chunks])
    network = NETWORK_BUILDERS[plan.network](plan.order)
    t0 = time.monotonic_ns()
    out_frame, run_metrics = run_parallel(network, merge_split, frame, plan.workers)
    merge_ns = time.monotonic_ns() - t0

    out = out_frame.concat()
    # hand back the caller's array dtype; list inputs get the canonical one
    want = in_dtype if in_dtype is not None else arr.dtype
    if out.dtype != want:
        out = out.astype(want)
    return out, HybridMetrics(local_sort_ns, merge_ns, run_metrics)


def hybrid_sort(xs, plan: HybridPlan | None = None, **plan_kwargs) -> np.ndarray:
    """Sort an arbitrary key sequence: lane-wise inner sorts + network merge.

    Accepts a ready plan or plan fields as keyword arguments
    (``hybrid_sort(xs, lanes=8, workers=4)``).
    """
    if plan is None:
        plan = HybridPlan(**plan_kwargs)
    elif plan_kwargs:
        raise TypeError("pass either a plan or plan fields, not both")
    out, _ = hybrid_sort_timed(xs, plan)
    return out


def parallel_mergesort_timed(
    xs, depth: int, workers: int = 1, inner="builtin"
) -> tuple[np.ndarray, int, int]:
    """parallel_mergesort_baseline plus (leaf-sort ns, merge-ladder ns)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    sorter = inner_sorter(inner)
    arr = as_keys(xs)
    if depth == 0:
        t0 = time.monotonic_ns()
        out = sorter(arr)
        return out, time.monotonic_ns() - t0, 0
    chunks = np.array_split(arr, 2 ** depth)
    t0 = time.monotonic_ns()
    runs = _pool_map(sorter, chunks, workers)
    local_sort_ns = time.monotonic_ns() - t0
    t0 = time.monotonic_ns()
    while len(runs) > 1:
        pairs = [(runs[i], runs[i + 1]) for i in range(0, len(runs), 2)]
        runs = _pool_map(lambda ab: kernels.merge(ab[0], ab[1]), pairs, workers)
    merge_ns = time.monotonic_ns() - t0
    return runs[0], local_sort_ns, merge_ns


def parallel_mergesort_baseline(xs, depth: int, workers: int = 1, inner="builtin") -> np.ndarray:
    """Divide-and-conquer mergesort with 2^depth leaf tasks.

    Leaves are sorted with the same inner sorter hybrid_sort uses; binary
    merges combine them level by level (merges of disjoint subtrees run on
    the pool, each merge itself is a plain two-way merge).
    """
    out, _, _ = parallel_mergesort_timed(xs, depth, workers, inner)
    return out


@dataclass(frozen=True)
class PsrsMetrics:
    keys_exchanged: int
    local_sort_ns: int
    merge_ns: int
    lane_sizes: tuple[int, ...]


def psrs_baseline(
    lane_inputs: Sequence, workers: int = 1, inner="builtin"
) -> tuple[list[np.ndarray], PsrsMetrics]:
    """Parallel Sorting by Regular Sampling over p = len(lane_inputs) lanes.

    Local sorts, p regular samples per lane, p-1 pivots from the sorted
    sample pool, pivot partition, all-to-all exchange, per-lane merges.
    Returns the per-lane outputs (concatenation is sorted) and metrics whose
    ``keys_exchanged`` counts every key that changed lanes.
    """
    p = len(lane_inputs)
    if p == 0:
        raise ValueError("PSRS needs at least one lane")
    sorter = inner_sorter(inner)
    arrays = [as_keys(lane) for lane in lane_inputs]
    common = np.result_type(*[a.dtype for a in arrays]) if arrays else np.int64
    arrays = [a.astype(common, copy=False) for a in arrays]

    t0 = time.monotonic_ns()
    runs = _pool_map(sorter, arrays, workers)
    local_sort_ns = time.monotonic_ns() - t0

    if p == 1:
        sizes = (runs[0].shape[0],)
        return [runs[0]], PsrsMetrics(0, local_sort_ns, 0, sizes)

    # Regular samples: positions floor(i*len/p) within each sorted run.
    samples = [run[[(i * run.shape[0]) // p for i in range(p)]] for run in runs if run.shape[0]]
    sample_pool = np.sort(np.concatenate(samples)) if samples else np.empty(0, dtype=common)
    step = sample_pool.shape[0] // p
    if step:
        pivots = sample_pool[[i * step + step // 2 - 1 for i in range(1, p)]]
    else:
        pivots = sample_pool[:0]

    # Partition every run by the pivots and exchange: part j goes to lane j.
    parts_per_lane = []
    for run in runs:
        cuts = np.searchsorted(run, pivots, side="right")
        parts = np.split(run, cuts)
        parts += [run[:0]] * (p - len(parts))
        parts_per_lane.append(parts)
    keys_exchanged = sum(
        parts_per_lane[i][j].shape[0] for i in range(p) for j in range(p) if i != j
    )

    def merge_lane(j: int) -> np.ndarray:
        received = [parts_per_lane[i][j] for i in range(p) if parts_per_lane[i][j].shape[0]]
        if not received:
            return np.empty(0, dtype=common)
        acc = received[0]
        for run in received[1:]:
            acc = kernels.merge(acc, run)
        return acc

    t0 = time.monotonic_ns()
    outputs = _pool_map(merge_lane, range(p), workers)
    merge_ns = time.monotonic_ns() - t0
    sizes = tuple(o.shape[0] for o in outputs)
    return outputs, PsrsMetrics(keys_exchanged, local_sort_ns, merge_ns, sizes)
