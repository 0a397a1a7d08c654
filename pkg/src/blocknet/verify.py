"""Executable checks: zero-one certification, the block agglomeration law,
counterexample search for invalid comparators, and the six direct-relation
clauses for merge-split.

Everything here is empirical verification with explicit coverage reporting:
exhaustive where the case space fits a budget, fixed-seed randomized beyond.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .blocks import Block, merge_split, precedes
from .engine import BlockFrame, run_sequential
from .network import ASCENDING, Network

_WITNESS_CAP = 20  # listed failures per report; failed_cases counts them all


@dataclass(frozen=True)
class CheckFailure:
    case_id: str
    clause: str
    input_frame: object
    output_frame: object
    detail: str = ""

    def witness_text(self) -> str:
        return f"in={self.input_frame!r} out={self.output_frame!r}"


@dataclass
class CheckReport:
    subject: str
    cases: int
    failures: list[CheckFailure] = field(default_factory=list)
    failed_cases: int = 0
    exhaustive: bool = True
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.failed_cases == 0

    def __bool__(self) -> bool:
        return self.ok

    def add_failure(self, failure: CheckFailure) -> None:
        self.failed_cases += 1
        if len(self.failures) < _WITNESS_CAP:
            self.failures.append(failure)

    def to_text(self) -> str:
        mode = "exhaustive" if self.exhaustive else "randomized"
        head = (
            f"{self.subject}: {'PASS' if self.ok else 'FAIL'} "
            f"({self.cases} cases, {mode}"
            f"{', ' + self.notes if self.notes else ''})"
        )
        lines = [head]
        for f in self.failures:
            lines.append(f"  {f.case_id}: {f.clause}: {f.witness_text()}")
            if f.detail:
                lines.append(f"    {f.detail}")
        if self.failed_cases > len(self.failures):
            lines.append(f"  ... and {self.failed_cases - len(self.failures)} more failures")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["case_id", "verdict", "clause", "witness"])
        if self.ok:
            writer.writerow(["all", "pass", "", f"{self.cases} cases"])
        for f in self.failures:
            writer.writerow([f.case_id, "fail", f.clause, f.witness_text()])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Zero-one verification
# ---------------------------------------------------------------------------


def _simulate_scalar(network: Network, values) -> list:
    """Plain one-input network simulation with the scalar comparator."""
    wires = list(values)
    for stage in network.stages:
        for comp in stage:
            a, b = wires[comp.lo], wires[comp.hi]
            lo, hi = (a, b) if a <= b else (b, a)
            if comp.direction is not ASCENDING:
                lo, hi = hi, lo
            wires[comp.lo], wires[comp.hi] = lo, hi
    return wires


def _initial_bit_columns(width: int) -> list[int]:
    """Mask per wire over all 2^width binary inputs: bit c of column i = bit i of c."""
    total = 1 << width
    columns = []
    for i in range(width):
        period = 1 << (i + 1)
        block = ((1 << (1 << i)) - 1) << (1 << i)  # 2^i zeros then 2^i ones
        mask = block
        span = period
        while span < total:
            mask |= mask << span
            span *= 2
        columns.append(mask & ((1 << total) - 1))
    return columns


def verify_zero_one(network: Network, max_witnesses: int = _WITNESS_CAP) -> CheckReport:
    """Exhaustively run all 2^width binary inputs through the network.

    Passing certifies the network sorts every totally ordered input.  All
    inputs are simulated at once: each wire carries one bit per input packed
    into a big integer, a comparator is (AND, OR).
    """
    if network.width > 24:
        raise ValueError(
            f"width {network.width} needs 2^{network.width} cases; exhaustive mode caps at 24"
        )
    width = network.width
    total = 1 << width
    report = CheckReport(subject=f"zero-one[{network.describe()}]", cases=total)
    columns = _initial_bit_columns(width)
    for stage in network.stages:
        for comp in stage:
            a, b = columns[comp.lo], columns[comp.hi]
            lo, hi = a & b, a | b
            if comp.direction is not ASCENDING:
                lo, hi = hi, lo
            columns[comp.lo], columns[comp.hi] = lo, hi
    violating = 0
    for i in range(width - 1):
        violating |= columns[i] & ~columns[i + 1]  # a 1 sitting above a 0
    report.failed_cases = violating.bit_count()
    while violating and len(report.failures) < max_witnesses:
        case = (violating & -violating).bit_length() - 1
        bits = [(case >> i) & 1 for i in range(width)]
        report.failures.append(
            CheckFailure(
                case_id=f"input-{case}",
                clause="sorted-output",
                input_frame=bits,
                output_frame=_simulate_scalar(network, bits),
            )
        )
        violating &= violating - 1
    return report


# ---------------------------------------------------------------------------
# Agglomeration law and counterexample search
# ---------------------------------------------------------------------------


def sorted_block_space(domain: int, max_block: int, min_block: int = 0) -> list[Block]:
    """Every sorted block with keys in {0..domain-1} and size in [min_block, max_block]."""
    if domain < 1 or max_block < min_block or min_block < 0:
        raise ValueError("need domain >= 1 and 0 <= min_block <= max_block")
    blocks = []
    for size in range(min_block, max_block + 1):
        for combo in itertools.combinations_with_replacement(range(domain), size):
            blocks.append(Block(combo))
    return blocks


def _frame_violation(in_frame: BlockFrame, out_frame: BlockFrame) -> tuple[str, str] | None:
    """First violated output clause, or None: lane order / conservation / sortedness."""
    lanes = out_frame.lanes
    for i in range(len(lanes) - 1):
        if not precedes(lanes[i], lanes[i + 1]):
            return "adjacent-order", f"lane {i} does not precede lane {i + 1}"
    ins = np.sort(in_frame.concat())
    outs = np.sort(out_frame.concat())
    if ins.shape != outs.shape or not np.array_equal(ins, outs):
        return "conservation", "output keys are not a permutation of input keys"
    for i, lane in enumerate(lanes):
        k = lane.keys
        if k.shape[0] > 1 and not np.all(k[1:] >= k[:-1]):
            return "block-sorted", f"lane {i} is not internally sorted"
    return None


def _random_frame(blocks: list[Block], width: int, rng: np.random.Generator) -> BlockFrame:
    picks = rng.integers(0, len(blocks), size=width)
    return BlockFrame([blocks[int(i)] for i in picks])


def verify_agglomeration(
    network: Network,
    domain: int = 3,
    max_block: int = 2,
    budget: int = 200_000,
    samples: int = 10_000,
    seed: int = 0,
) -> CheckReport:
    """Run block frames through the network with merge-split and check that
    lanes come out pairwise ordered, keys conserved, and blocks sorted.

    Exhaustive over the whole frame space when it fits ``budget``; otherwise
    ``samples`` fixed-seed random frames (reported as non-exhaustive).
    """
    blocks = sorted_block_space(domain, max_block)
    space = len(blocks) ** network.width
    exhaustive = space <= budget
    subject = f"agglomeration[{network.describe()} domain={domain} max_block={max_block}]"
    if exhaustive:
        frames = (BlockFrame(combo) for combo in itertools.product(blocks, repeat=network.width))
        cases = space
        notes = ""
    else:
        rng = np.random.default_rng(seed)
        frames = (_random_frame(blocks, network.width, rng) for _ in range(samples))
        cases = samples
        notes = f"seed={seed}, space={space}"
    report = CheckReport(subject=subject, cases=cases, exhaustive=exhaustive, notes=notes)
    for idx, frame in enumerate(frames):
        out, _ = run_sequential(network, merge_split, frame)
        violation = _frame_violation(frame, out)
        if violation:
            clause, detail = violation
            report.add_failure(CheckFailure(f"frame-{idx}", clause, frame, out, detail))
    return report


@dataclass(frozen=True)
class Counterexample:
    """A concrete frame on which a comparison element breaks the network."""

    frame: BlockFrame
    output: BlockFrame
    clause: str
    detail: str = ""

    def __repr__(self) -> str:
        return f"Counterexample(clause={self.clause!r}, frame={self.frame!r})"


def find_counterexample(
    network: Network,
    ce,
    domain: int = 4,
    max_block: int = 2,
    min_block: int = 0,
    budget: int = 200_000,
    samples: int = 10_000,
    seed: int = 0,
) -> Counterexample | None:
    """Search the frame space for an input the element mis-sorts.

    Exhaustive search visits frames in increasing total-key-count order, so
    a returned witness is minimal in total keys.  Beyond ``budget`` frames
    the search falls back to fixed-seed sampling (witness not minimized).
    """
    blocks = sorted_block_space(domain, max_block, min_block)
    space = len(blocks) ** network.width
    if space <= budget:
        combos = sorted(
            itertools.product(blocks, repeat=network.width),
            key=lambda combo: (sum(len(b) for b in combo), tuple(tuple(b) for b in combo)),
        )
        frames = (BlockFrame(c) for c in combos)
    else:
        rng = np.random.default_rng(seed)
        frames = (_random_frame(blocks, network.width, rng) for _ in range(samples))
    for frame in frames:
        out, _ = run_sequential(network, ce, frame)
        violation = _frame_violation(frame, out)
        if violation:
            clause, detail = violation
            return Counterexample(frame, out, clause, detail)
    return None


# ---------------------------------------------------------------------------
# Direct-relation clauses for merge-split
# ---------------------------------------------------------------------------


def _random_block(rng: np.random.Generator, lo: int, hi: int, max_size: int = 6) -> Block:
    size = int(rng.integers(1, max_size + 1))
    return Block(np.sort(rng.integers(lo, hi, size=size)))


def check_lemma1_relations(samples: int = 10_000, seed: int = 0) -> CheckReport:
    """Randomized constructed-premise suites for the six direct relations.

    For a merge-split application (A1, A2) -> (O1, O2) with bound blocks
    built to satisfy each premise:

      1. O1 precedes O2 (definitional).
      2. Ai precedes B  =>  O1 precedes B          (B above one input)
      3. B precedes Ai  =>  B precedes O2          (B below one input)
      4. B precedes A1 and B precedes A2  =>  B precedes O1
      5. A1 precedes B and A2 precedes B  =>  O2 precedes B
      6. L precedes Ai precedes Aj precedes U  =>  L precedes O1 and O2 precedes U
    """
    rng = np.random.default_rng(seed)
    report = CheckReport(
        subject="merge-split direct relations (clauses 1-6)",
        cases=6 * samples,
        exhaustive=False,
        notes=f"seed={seed}",
    )

    def fail(clause: str, inputs, outputs, detail: str) -> None:
        report.add_failure(CheckFailure(f"{clause}-sample", clause, inputs, outputs, detail))

    for _ in range(samples):
        a1 = _random_block(rng, 0, 100)
        a2 = _random_block(rng, 0, 100)
        o1, o2 = merge_split(a1, a2)

        if not precedes(o1, o2):
            fail("clause-1", (a1, a2), (o1, o2), "O1 must precede O2")

        i = int(rng.integers(1, 3))
        picked = a1 if i == 1 else a2
        above = _random_block(rng, int(picked.keys[-1]), int(picked.keys[-1]) + 10)
        if not precedes(o1, above):
            fail("clause-2", (a1, a2, above), (o1, o2), f"O1 must precede the block above A{i}")
        below = _random_block(rng, int(picked.keys[0]) - 10, int(picked.keys[0]) + 1)
        if not precedes(below, o2):
            fail("clause-3", (a1, a2, below), (o1, o2), f"the block below A{i} must precede O2")

        floor = int(min(a1.keys[0], a2.keys[0]))
        below_both = _random_block(rng, floor - 10, floor + 1)
        if not precedes(below_both, o1):
            fail("clause-4", (a1, a2, below_both), (o1, o2), "a block below both inputs must precede O1")

        ceil = int(max(a1.keys[-1], a2.keys[-1]))
        above_both = _random_block(rng, ceil, ceil + 10)
        if not precedes(o2, above_both):
            fail("clause-5", (a1, a2, above_both), (o1, o2), "O2 must precede a block above both inputs")

        # clause 6: inputs already ordered, with bound blocks on both ends
        lo_block = _random_block(rng, 0, 40)
        hi_block = _random_block(rng, int(lo_block.keys[-1]), int(lo_block.keys[-1]) + 40)
        lower = _random_block(rng, int(lo_block.keys[0]) - 10, int(lo_block.keys[0]) + 1)
        upper = _random_block(rng, int(hi_block.keys[-1]), int(hi_block.keys[-1]) + 10)
        if int(rng.integers(0, 2)):
            b1, b2 = lo_block, hi_block
        else:
            b1, b2 = hi_block, lo_block
        p1, p2 = merge_split(b1, b2)
        if not (precedes(lower, p1) and precedes(p2, upper)):
            fail(
                "clause-6",
                (b1, b2, lower, upper),
                (p1, p2),
                "ordered inputs must keep both outputs inside the outer bounds",
            )
    return report
