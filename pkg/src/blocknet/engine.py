"""Engines that drive a Network over a frame of blocks.

Three entry points share one execution semantics:

* ``run_sequential`` — single-threaded reference engine.
* ``run_parallel``  — worker-per-wire engine with direct point-to-point
  channels between comparator applications; bit-exact with sequential.
* ``run_distributed`` — lanes live in files (or per-lane sources); each lane
  is sorted locally, the network merges them, outputs stay per-lane.

Scalar execution is just block execution with singleton blocks.
"""

from __future__ import annotations

import os
import queue
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .blocks import Block, KeyDomainError, as_keys
from .network import Comparator, Direction, Network

ComparisonElement = Callable[[Block, Block, Direction], tuple[Block, Block]]


class EngineError(RuntimeError):
    """A worker failed or an internal execution invariant broke."""


def _debug_checks() -> bool:
    return os.environ.get("BLOCKNET_DEBUG_CHECKS") == "1"


class BlockFrame:
    """One Block per network wire."""

    __slots__ = ("lanes",)

    def __init__(self, lanes: Iterable):
        self.lanes: tuple[Block, ...] = tuple(
            lane if isinstance(lane, Block) else Block(lane) for lane in lanes
        )

    @property
    def width(self) -> int:
        return len(self.lanes)

    @property
    def total_keys(self) -> int:
        return sum(len(b) for b in self.lanes)

    def concat(self) -> np.ndarray:
        """Lane contents joined in wire order."""
        arrays = [b.keys for b in self.lanes if len(b)]
        if not arrays:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(arrays)

    def __len__(self) -> int:
        return len(self.lanes)

    def __iter__(self):
        return iter(self.lanes)

    def __getitem__(self, i) -> Block:
        return self.lanes[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockFrame):
            return NotImplemented
        return self.lanes == other.lanes

    def __repr__(self) -> str:
        return f"BlockFrame({[b.keys.tolist() for b in self.lanes]})"


def as_frame(lanes) -> BlockFrame:
    return lanes if isinstance(lanes, BlockFrame) else BlockFrame(lanes)


def scalar_frame(values: Iterable) -> BlockFrame:
    """One singleton block per value — runs a block network on plain keys."""
    return BlockFrame([[v] for v in values])


@dataclass(frozen=True)
class StageMetrics:
    stage: int
    comparators: int
    wall_ns: int
    keys_crossed: int
    max_block: int


@dataclass(frozen=True)
class RunMetrics:
    stages: tuple[StageMetrics, ...]
    peak_residency: int = 0

    @property
    def total_comparators(self) -> int:
        return sum(s.comparators for s in self.stages)

    @property
    def total_wall_ns(self) -> int:
        return sum(s.wall_ns for s in self.stages)

    @property
    def total_keys_crossed(self) -> int:
        return sum(s.keys_crossed for s in self.stages)

    @property
    def max_block(self) -> int:
        return max((s.max_block for s in self.stages), default=0)

    def to_csv(self) -> str:
        lines = ["stage,comparators,wall_ns,keys_crossed,max_block"]
        for s in self.stages:
            lines.append(f"{s.stage},{s.comparators},{s.wall_ns},{s.keys_crossed},{s.max_block}")
        return "\n".join(lines) + "\n"


class _StageAccumulator:
    """Mutable per-stage tallies folded into StageMetrics afterwards."""

    __slots__ = ("comparators", "wall_ns", "keys_crossed", "max_block")

    def __init__(self):
        self.comparators = 0
        self.wall_ns = 0
        self.keys_crossed = 0
        self.max_block = 0

    def fold(self, other: "_StageAccumulator") -> None:
        self.comparators += other.comparators
        self.wall_ns += other.wall_ns
        self.keys_crossed += other.keys_crossed
        self.max_block = max(self.max_block, other.max_block)


def _crossed(old: Block, new: Block) -> int:
    """Keys that left this lane: occupancy before minus multiset overlap after."""
    a, b = old.keys, new.keys
    if a.dtype != b.dtype:
        common = np.result_type(a.dtype, b.dtype)
        a, b = a.astype(common), b.astype(common)
    return len(old) - kernels.overlap(a, b)


def _check_conservation(a: Block, b: Block, out1: Block, out2: Block) -> None:
    ins = np.sort(np.concatenate([a.keys, b.keys]))
    outs = np.sort(np.concatenate([out1.keys, out2.keys]))
    if not np.array_equal(ins, outs):
        raise EngineError(
            f"comparison element broke key conservation: {a!r}, {b!r} -> {out1!r}, {out2!r}"
        )


def _apply(
    ce: ComparisonElement,
    comp: Comparator,
    a: Block,
    b: Block,
    acc: _StageAccumulator,
) -> tuple[Block, Block, int]:
    t0 = time.monotonic_ns()
    out1, out2 = ce(a, b, comp.direction)
    dt = time.monotonic_ns() - t0
    if _debug_checks():
        _check_conservation(a, b, out1, out2)
    acc.comparators += 1
    acc.wall_ns += dt
    acc.keys_crossed += _crossed(a, out1) + _crossed(b, out2)
    acc.max_block = max(acc.max_block, len(a), len(b), len(out1), len(out2))
    return out1, out2, len(a) + len(b)


def _require_width(network: Network, frame: BlockFrame) -> None:
    if frame.width != network.width:
        raise ValueError(
            f"frame has {frame.width} lanes but the network is {network.width} wires wide"
        )


def run_sequential(
    network: Network,
    ce: ComparisonElement,
    frame,
    *,
    trace: list | None = None,
) -> tuple[BlockFrame, RunMetrics]:
    """Apply every stage in order, comparators in canonical order within a stage.

    ``trace``, when given, collects (stage_index, comparator) applications —
    the sequence is the same for every input of a given width.
    """
    frame = as_frame(frame)
    _require_width(network, frame)
    lanes = list(frame.lanes)
    stage_metrics = []
    peak = 0
    for si, stage in enumerate(network.stages):
        acc = _StageAccumulator()
        for comp in stage:
            if trace is not None:
                trace.append((si, comp))
            out1, out2, residency = _apply(ce, comp, lanes[comp.lo], lanes[comp.hi], acc)
            peak = max(peak, residency)
            lanes[comp.lo], lanes[comp.hi] = out1, out2
        stage_metrics.append(
            StageMetrics(si, acc.comparators, acc.wall_ns, acc.keys_crossed, acc.max_block)
        )
    return BlockFrame(lanes), RunMetrics(tuple(stage_metrics), peak)


# ---------------------------------------------------------------------------
# Parallel engine
# ---------------------------------------------------------------------------

_POISON = object()


class _Wiring:
    """Point-to-point channel plan for one (network, workers) pair.

    Each (stage, wire) input slot and each final wire slot is a capacity-1
    queue that receives exactly one put over the whole run, so producers
    never block; consumers' gets are ordered by stage, so the dataflow is a
    DAG and the run cannot deadlock.
    """

    def __init__(self, network: Network):
        self.network = network
        width = network.width
        # first_touch[w] = earliest stage using wire w; next_touch[(s, w)] =
        # next stage after s using w (None -> final slot).
        touches: dict[int, list[int]] = {w: [] for w in range(width)}
        for si, stage in enumerate(network.stages):
            for comp in stage:
                touches[comp.lo].append(si)
                touches[comp.hi].append(si)
        self.first_touch = {w: (ts[0] if ts else None) for w, ts in touches.items()}
        self.next_touch: dict[tuple[int, int], int | None] = {}
        for w, ts in touches.items():
            for i, s in enumerate(ts):
                self.next_touch[(s, w)] = ts[i + 1] if i + 1 < len(ts) else None
        self.slots: dict[tuple[int, int], queue.Queue] = {
            (s, w): queue.Queue(maxsize=1) for w, ts in touches.items() for s in ts
        }
        self.finals: dict[int, queue.Queue] = {w: queue.Queue(maxsize=1) for w in range(width)}

    def all_queues(self) -> Iterable[queue.Queue]:
        yield from self.slots.values()
        yield from self.finals.values()

    def route(self, stage: int, wire: int, block, stop: threading.Event) -> None:
        nxt = self.next_touch[(stage, wire)]
        target = self.finals[wire] if nxt is None else self.slots[(nxt, wire)]
        # Exactly one real put per slot, so Full can only mean a poison pill
        # landed there first (stop is set before pills are sent); drop then.
        try:
            target.put_nowait(block)
        except queue.Full:
            if not stop.is_set():
                raise EngineError("channel slot written twice") from None

    def prefill(self, frame: BlockFrame) -> None:
        for w, block in enumerate(frame.lanes):
            first = self.first_touch[w]
            target = self.finals[w] if first is None else self.slots[(first, w)]
            target.put(block)


class _Worker(threading.Thread):
    def __init__(self, idx, events, wiring, ce, failure, stop):
        super().__init__(name=f"blocknet-worker-{idx}", daemon=True)
        self.events = events  # [(stage_index, Comparator)] in stage order
        self.wiring = wiring
        self.ce = ce
        self.failure = failure  # shared single-slot list
        self.stop = stop  # threading.Event
        self.stage_acc: dict[int, _StageAccumulator] = {}
        self.peak = 0

    def _poison_everything(self) -> None:
        for q in self.wiring.all_queues():
            try:
                q.put_nowait(_POISON)
            except queue.Full:
                pass

    def run(self) -> None:
        try:
            for si, comp in self.events:
                a = self.wiring.slots[(si, comp.lo)].get()
                b = self.wiring.slots[(si, comp.hi)].get()
                if a is _POISON or b is _POISON or self.stop.is_set():
                    return
                acc = self.stage_acc.setdefault(si, _StageAccumulator())
                out1, out2, residency = _apply(self.ce, comp, a, b, acc)
                self.peak = max(self.peak, residency)
                self.wiring.route(si, comp.lo, out1, self.stop)
                self.wiring.route(si, comp.hi, out2, self.stop)
        except Exception as exc:  # propagate, never hang the run
            if not self.failure:
                self.failure.append(exc)
            self.stop.set()
            self._poison_everything()


def run_parallel(
    network: Network,
    ce: ComparisonElement,
    frame,
    workers: int = 1,
) -> tuple[BlockFrame, RunMetrics]:
    """Worker-per-wire execution with direct stage-to-stage channels.

    Wire w belongs to worker ``w % workers``; a comparator runs on the owner
    of its low wire and its outputs travel straight to the next users of the
    two wires over single-slot queues (pipelining across stages happens
    naturally — a worker starts a stage-s comparator as soon as both inputs
    arrived).  Output is bit-exact with ``run_sequential``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    frame = as_frame(frame)
    _require_width(network, frame)

    wiring = _Wiring(network)
    per_worker_events: list[list] = [[] for _ in range(workers)]
    for si, stage in enumerate(network.stages):
        for comp in stage:
            per_worker_events[comp.lo % workers].append((si, comp))
    # stage order already holds per worker; canonical stage layout keeps it
    # deterministic for equal-lo folds too.
    failure: list = []
    stop = threading.Event()
    threads = [
        _Worker(i, events, wiring, ce, failure, stop)
        for i, events in enumerate(per_worker_events)
        if events
    ]
    wiring.prefill(frame)
    for t in threads:
        t.start()
    out_lanes = []
    for w in range(network.width):
        out_lanes.append(wiring.finals[w].get())
    for t in threads:
        t.join()
    if failure:
        raise EngineError("parallel run failed") from failure[0]
    if any(lane is _POISON for lane in out_lanes):
        raise EngineError("parallel run lost a lane without a recorded failure")

    stage_metrics = []
    folded: dict[int, _StageAccumulator] = {}
    for t in threads:
        for si, acc in t.stage_acc.items():
            folded.setdefault(si, _StageAccumulator()).fold(acc)
    for si in range(network.depth):
        acc = folded.get(si, _StageAccumulator())
        stage_metrics.append(
            StageMetrics(si, acc.comparators, acc.wall_ns, acc.keys_crossed, acc.max_block)
        )
    peak = max((t.peak for t in threads), default=0)
    return BlockFrame(out_lanes), RunMetrics(tuple(stage_metrics), peak)


# ---------------------------------------------------------------------------
# Lane files and distributed mode
# ---------------------------------------------------------------------------

_COUNT_HEADER = struct.Struct("<Q")


def _lane_format(path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("bin", "txt"):
            raise ValueError(f"unknown lane file format {fmt!r}")
        return fmt
    return "txt" if str(path).endswith(".txt") else "bin"


def write_lane_file(path, keys, fmt: str | None = None) -> None:
    """Write keys to a lane file: binary (count header + int64 LE) or text."""
    arr = as_keys(keys)
    fmt = _lane_format(path, fmt)
    if fmt == "bin":
        if arr.dtype.kind != "i":
            raise KeyDomainError("binary lane files hold 64-bit integer keys only")
        with open(path, "wb") as fh:
            fh.write(_COUNT_HEADER.pack(arr.shape[0]))
            fh.write(arr.astype("<i8", copy=False).tobytes())
    else:
        with open(path, "w") as fh:
            for v in arr.tolist():
                fh.write(f"{v}\n")


def read_lane_file(path, fmt: str | None = None) -> np.ndarray:
    fmt = _lane_format(path, fmt)
    if fmt == "bin":
        with open(path, "rb") as fh:
            header = fh.read(_COUNT_HEADER.size)
            if len(header) < _COUNT_HEADER.size:
                raise KeyDomainError(f"{path}: truncated lane file header")
            (count,) = _COUNT_HEADER.unpack(header)
            payload = fh.read()
        arr = np.frombuffer(payload, dtype="<i8")
        if arr.shape[0] != count:
            raise KeyDomainError(
                f"{path}: header promises {count} keys, file holds {arr.shape[0]}"
            )
        return arr.astype(np.int64, copy=False)
    values: list = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(int(text))
            except ValueError:
                try:
                    values.append(float(text))
                except ValueError as exc:
                    raise KeyDomainError(f"{path}:{lineno}: bad key {text!r}") from exc
    return as_keys(values)


def _pool_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DistributedMetrics:
    """Phase split for a distributed run: I/O vs local sorts vs network merge."""

    io_ns: int
    local_sort_ns: int
    merge_ns: int
    run: RunMetrics = field(default_factory=lambda: RunMetrics(()))

    @property
    def peak_residency(self) -> int:
        return self.run.peak_residency


def _load_lane(source, inner, fmt: str | None = None) -> tuple[Block, int, int]:
    """Resolve one lane source to a sorted Block; returns (block, io_ns, sort_ns)."""
    io_ns = 0
    if isinstance(source, Block):
        return source, 0, 0
    if isinstance(source, (str, Path, os.PathLike)):
        t0 = time.monotonic_ns()
        arr = read_lane_file(source, fmt)
        io_ns = time.monotonic_ns() - t0
    else:
        arr = as_keys(source, copy=True)
    t0 = time.monotonic_ns()
    if inner is not None:
        arr = inner(arr)
        block = Block.from_sorted(as_keys(arr))
    else:
        block = Block(arr)  # validates sortedness; unsorted input needs an inner sorter
    sort_ns = time.monotonic_ns() - t0
    return block, io_ns, sort_ns


def run_distributed(
    network: Network,
    ce: ComparisonElement,
    lane_inputs: Sequence,
    workers: int = 1,
    *,
    inner: Callable | None = None,
    out_paths: Sequence | None = None,
    fmt: str | None = None,
) -> tuple[list, DistributedMetrics]:
    """Per-lane sources in, per-lane outputs out; the network does the merging.

    Sources may be Blocks, raw key sequences, or lane file paths.  Unsorted
    sources need ``inner`` (a local sort function).  No step materializes the
    full dataset: only two blocks ever meet inside one comparator.  With
    ``out_paths`` the sorted lanes are written out and the paths returned;
    otherwise the Blocks are returned.  ``fmt`` pins the lane file format for
    every read and write; ``None`` infers it from each path's extension.
    """
    if len(lane_inputs) != network.width:
        raise ValueError(
            f"{len(lane_inputs)} lane sources for a {network.width}-wire network"
        )
    if out_paths is not None and len(out_paths) != network.width:
        raise ValueError("out_paths length must equal the network width")

    loaded = _pool_map(lambda src: _load_lane(src, inner, fmt), lane_inputs, workers)
    blocks = [b for b, _, _ in loaded]
    io_ns = sum(io for _, io, _ in loaded)
    local_sort_ns = sum(s for _, _, s in loaded)

    t0 = time.monotonic_ns()
    out_frame, run_metrics = run_parallel(network, ce, BlockFrame(blocks), workers)
    merge_ns = time.monotonic_ns() - t0

    outputs: list = list(out_frame.lanes)
    if out_paths is not None:
        t0 = time.monotonic_ns()
        for block, path in zip(outputs, out_paths):
            write_lane_file(path, block.keys, fmt)
        io_ns += time.monotonic_ns() - t0
        outputs = list(out_paths)
    return outputs, DistributedMetrics(io_ns, local_sort_ns, merge_ns, run_metrics)
