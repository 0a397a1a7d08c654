"""Comparator networks as data, plus the recursive Batcher generators.

A network is a fixed, data-independent arrangement of two-input comparison
elements.  It is stored stage-major: each stage holds comparators touching
pairwise-disjoint wires, so everything inside one stage may run in parallel.
The structure depends only on the wire count, never on the data.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence


class Direction(enum.Enum):
    """Orientation of a comparison element.

    ASCENDING sends the minimum to the lower output; DESCENDING is the same
    element with its outputs exchanged.
    """

    ASCENDING = "A"
    DESCENDING = "D"

    def flipped(self) -> "Direction":
        return Direction.DESCENDING if self is Direction.ASCENDING else Direction.ASCENDING


ASCENDING = Direction.ASCENDING
DESCENDING = Direction.DESCENDING


@dataclass(frozen=True)
class Comparator:
    """One comparison element: wires ``lo < hi`` plus an orientation.

    A plain record; range and disjointness constraints are enforced by
    :func:`validate_network` so that malformed networks can be represented
    (and reported) rather than being unconstructible.
    """

    lo: int
    hi: int
    direction: Direction = ASCENDING


# One parallel step of a network: comparators on pairwise-disjoint wires.
Stage = tuple[Comparator, ...]


@dataclass(frozen=True)
class Network:
    width: int
    stages: tuple[Stage, ...]

    @property
    def depth(self) -> int:
        return len(self.stages)

    @property
    def comparator_count(self) -> int:
        return sum(len(stage) for stage in self.stages)

    def describe(self) -> str:
        return f"width={self.width} depth={self.depth} comparators={self.comparator_count}"


@dataclass(frozen=True)
class NetworkIssue:
    """First invariant violation found by :func:`validate_network`."""

    stage: int
    comparator: Comparator | None
    problem: str

    def __str__(self) -> str:
        where = f"stage {self.stage}" if self.stage >= 0 else "network"
        return f"{where}: {self.problem}"


class NetworkFormatError(ValueError):
    """Raised for malformed serialized networks."""


def validate_network(network: Network) -> NetworkIssue | None:
    """Check all structural invariants; return the first violation or None."""
    if network.width < 1:
        return NetworkIssue(-1, None, f"width must be >= 1, got {network.width}")
    for s, stage in enumerate(network.stages):
        used: set[int] = set()
        for comp in stage:
            if comp.lo >= comp.hi:
                return NetworkIssue(s, comp, f"lo >= hi in {comp.lo}:{comp.hi}")
            if comp.lo < 0 or comp.hi >= network.width:
                return NetworkIssue(
                    s, comp, f"wire out of range in {comp.lo}:{comp.hi} (width {network.width})"
                )
            if comp.lo in used or comp.hi in used:
                return NetworkIssue(s, comp, f"wire used twice in stage ({comp.lo}:{comp.hi})")
            used.add(comp.lo)
            used.add(comp.hi)
    return None


def _canonical(stages: Iterable[list[Comparator]]) -> tuple[Stage, ...]:
    # Canonical form: comparators sorted by lower wire within each stage.
    return tuple(tuple(sorted(stage, key=lambda c: c.lo)) for stage in stages)


def _overlay(a: list[list[Comparator]], b: list[list[Comparator]]) -> list[list[Comparator]]:
    # The two operands act on disjoint wire ranges and have equal depth, so
    # their stages can share stage slots.
    assert len(a) == len(b)
    return [x + y for x, y in zip(a, b)]


def _bitonic_merge(wires: Sequence[int], direction: Direction) -> list[list[Comparator]]:
    # Sorts a bitonic sequence: compare wire i with wire i + half, recurse on
    # both halves.  All comparators share the caller's direction.
    n = len(wires)
    if n <= 1:
        return []
    half = n // 2
    head = [Comparator(wires[i], wires[i + half], direction) for i in range(half)]
    rest = _overlay(
        _bitonic_merge(wires[:half], direction),
        _bitonic_merge(wires[half:], direction),
    )
    return [head] + rest


def _bitonic_sort(wires: Sequence[int], direction: Direction) -> list[list[Comparator]]:
    # Sort each half in opposite directions (their juxtaposition is bitonic),
    # then merge.
    n = len(wires)
    if n <= 1:
        return []
    half = n // 2
    stages = _overlay(
        _bitonic_sort(wires[:half], direction),
        _bitonic_sort(wires[half:], direction.flipped()),
    )
    return stages + _bitonic_merge(wires, direction)


def bitonic_network(order: int) -> Network:
    """Batcher's bitonic sorter over ``2**order`` wires, ascending output.

    Descending comparators appear only inside the recursion (the half that is
    sorted downward); their orientation is baked into each comparator, so an
    executor needs no recursion context.  The result has ``order*(order+1)/2``
    stages and every stage uses all wires.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    width = 1 << order
    return Network(width, _canonical(_bitonic_sort(range(width), ASCENDING)))


def _odd_even_merge(wires: Sequence[int]) -> list[list[Comparator]]:
    # Batcher's odd-even merge of two sorted halves: merge the even- and
    # odd-indexed subsequences, then clean up with adjacent comparators.
    n = len(wires)
    if n <= 1:
        return []
    if n == 2:
        return [[Comparator(wires[0], wires[1])]]
    evens, odds = unshuffle(2, list(wires))
    stages = _overlay(_odd_even_merge(evens), _odd_even_merge(odds))
    tail = [Comparator(wires[i], wires[i + 1]) for i in range(1, n - 1, 2)]
    return stages + [tail]


def _odd_even_sort(wires: Sequence[int]) -> list[list[Comparator]]:
    n = len(wires)
    if n <= 1:
        return []
    half = n // 2
    stages = _overlay(_odd_even_sort(wires[:half]), _odd_even_sort(wires[half:]))
    return stages + _odd_even_merge(wires)


def odd_even_merge_network(order: int) -> Network:
    """Batcher's odd-even mergesort network over ``2**order`` wires.

    Same depth as the bitonic sorter but fewer comparators; all ascending.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    width = 1 << order
    return Network(width, _canonical(_odd_even_sort(range(width))))


def fig2_network() -> Network:
    """The classic 4-wire, 5-comparator sorting network.

    Two independent comparators, two more, then one final comparator on the
    middle wires.  Small fixed test subject; also shipped as a golden file.
    """
    stages = [
        [Comparator(0, 1), Comparator(2, 3)],
        [Comparator(0, 2), Comparator(1, 3)],
        [Comparator(1, 2)],
    ]
    return Network(4, _canonical(stages))


NETWORK_BUILDERS = {
    "bitonic": bitonic_network,
    "oddeven": odd_even_merge_network,
}


def unshuffle(k: int, xs: Sequence) -> list[list]:
    """Round-robin distribution into ``k`` sublists, order preserved.

    unshuffle(3, [1..10]) == [[1,4,7,10],[2,5,8],[3,6,9]]
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return [list(xs[i::k]) for i in range(k)]


_MISSING = object()


def shuffle(xss: Sequence[Sequence]) -> list:
    """Round-robin interleaving; exact inverse of :func:`unshuffle`."""
    out = []
    for group in itertools.zip_longest(*xss, fillvalue=_MISSING):
        out.extend(x for x in group if x is not _MISSING)
    return out


def dump_network(network: Network) -> str:
    """Serialize to the line-oriented text format.

    Header ``width=<w> stages=<s>``, then one line per stage of
    space-separated ``lo:hi:A|D`` triples.
    """
    lines = [f"width={network.width} stages={len(network.stages)}"]
    for stage in network.stages:
        lines.append(" ".join(f"{c.lo}:{c.hi}:{c.direction.value}" for c in stage))
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> Network:
    """Parse the :func:`dump_network` format; stages are canonicalized."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise NetworkFormatError("empty network file")
    header = lines[0].split()
    try:
        fields = dict(part.split("=", 1) for part in header)
        width = int(fields["width"])
        n_stages = int(fields["stages"])
    except (ValueError, KeyError) as exc:
        raise NetworkFormatError(f"bad header {lines[0]!r}") from exc
    if len(lines) - 1 != n_stages:
        raise NetworkFormatError(
            f"header promises {n_stages} stages, found {len(lines) - 1}"
        )
    stages = []
    for line in lines[1:]:
        stage = []
        for triple in line.split():
            parts = triple.split(":")
            if len(parts) != 3:
                raise NetworkFormatError(f"bad comparator {triple!r}")
            try:
                lo, hi = int(parts[0]), int(parts[1])
                direction = Direction(parts[2])
            except ValueError as exc:
                raise NetworkFormatError(f"bad comparator {triple!r}") from exc
            stage.append(Comparator(lo, hi, direction))
        stages.append(stage)
    network = Network(width, _canonical(stages))
    issue = validate_network(network)
    if issue is not None:
        raise NetworkFormatError(str(issue))
    return network
