"""Comparison elements: scalar, block merge-split, and the validity checker.

A Block is an internally sorted run of keys occupying one network wire.  The
merge-split element merges two such runs and splits the result as evenly as
its placement limits allow, so a comparator network built for single keys
sorts whole blocks:
after the final stage the lanes are pairwise ordered and concatenating them
yields the fully sorted sequence.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .network import ASCENDING, DESCENDING, Direction


class KeyDomainError(ValueError):
    """Raised for keys outside the supported total order (e.g. NaN)."""


def as_keys(values, *, copy: bool = False) -> np.ndarray:
    """Coerce a key sequence to a 1-D int64 or float64 array.

    Integers map to int64, anything fractional to float64; non-finite floats
    are rejected because they would break the total order.
    """
    was_array = isinstance(values, np.ndarray)
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise KeyDomainError(f"keys must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        # Empty lists/tuples default to int64; only a real float array keeps float64.
        keep = arr.dtype if was_array and arr.dtype in (np.int64, np.float64) else np.int64
        return np.empty(0, dtype=keep)
    kind = arr.dtype.kind
    if kind in "ib":
        out = arr.astype(np.int64, copy=copy)
    elif kind == "u":
        if arr.max() > np.iinfo(np.int64).max:
            raise KeyDomainError("unsigned keys exceed the int64 range")
        out = arr.astype(np.int64, copy=copy)
    elif kind == "f":
        out = arr.astype(np.float64, copy=copy)
        if not np.isfinite(out).all():
            raise KeyDomainError("non-finite keys are not allowed")
    elif kind == "O":
        try:
            out = arr.astype(np.int64)
        except (OverflowError, ValueError, TypeError):
            try:
                out = arr.astype(np.float64)
            except (ValueError, TypeError) as exc:
                raise KeyDomainError(f"unsupported key values: {exc}") from exc
            if not np.isfinite(out).all():
                raise KeyDomainError("non-finite keys are not allowed")
    else:
        raise KeyDomainError(f"unsupported key dtype {arr.dtype}")
    return out


def _debug_checks() -> bool:
    return os.environ.get("BLOCKNET_DEBUG_CHECKS") == "1"


class Block:
    """An immutable, internally sorted run of keys on one wire."""

    __slots__ = ("keys",)

    def __init__(self, values: Iterable = ()):
        arr = as_keys(values, copy=True)
        if arr.size > 1 and not np.all(arr[1:] >= arr[:-1]):
            raise ValueError("block keys must be non-decreasing")
        arr.flags.writeable = False
        self.keys = arr

    @classmethod
    def from_sorted(cls, arr: np.ndarray) -> "Block":
        """Wrap an already-sorted int64/float64 array without copying."""
        if _debug_checks():
            assert arr.ndim == 1 and arr.dtype in (np.int64, np.float64)
            assert arr.size <= 1 or bool(np.all(arr[1:] >= arr[:-1]))
        block = cls.__new__(cls)
        if arr.flags.writeable:
            arr = arr.view()
            arr.flags.writeable = False
        block.keys = arr
        return block

    def __len__(self) -> int:
        return self.keys.shape[0]

    def __iter__(self):
        return iter(self.keys.tolist())

    def __getitem__(self, i):
        return self.keys[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Block):
            return NotImplemented
        # dtype is part of identity, keeping __eq__ consistent with __hash__
        return self.keys.dtype == other.keys.dtype and np.array_equal(self.keys, other.keys)

    def __hash__(self):
        return hash((self.keys.shape[0], self.keys.tobytes()))

    def __repr__(self) -> str:
        return f"Block({self.keys.tolist()})"

    @property
    def is_empty(self) -> bool:
        return self.keys.shape[0] == 0


@dataclass(frozen=True)
class BlockBounds:
    """Validity limits of one block comparison step.

    ``lb`` is the larger of the two block minima, ``ub`` the smaller of the
    two maxima.  Keys below ``lb`` must end up in the lower output, keys
    above ``ub`` in the upper one; keys in between may land in either side.
    """

    lb: float
    ub: float


def block_bounds(a1: Block, a2: Block) -> BlockBounds:
    """Bounds of the (a1, a2) comparison step; both blocks must be non-empty."""
    if a1.is_empty or a2.is_empty:
        raise ValueError("block bounds are undefined for empty blocks")
    return BlockBounds(
        lb=max(a1.keys[0], a2.keys[0]),
        ub=min(a1.keys[-1], a2.keys[-1]),
    )


def scalar_compare(a1, a2, direction: Direction = ASCENDING):
    """The original two-key comparison element: (min, max), exchanged for DESCENDING."""
    lo, hi = (a1, a2) if a1 <= a2 else (a2, a1)
    return (lo, hi) if direction is ASCENDING else (hi, lo)


def precedes(a: Block, b: Block) -> bool:
    """Block order: every key of ``a`` <= every key of ``b`` (vacuous on empties)."""
    if a.is_empty or b.is_empty:
        return True
    return bool(a.keys[-1] <= b.keys[0])


def _common_dtype(x: np.ndarray, y: np.ndarray):
    if x.dtype == y.dtype:
        return x, y
    common = np.result_type(x.dtype, y.dtype)
    return x.astype(common), y.astype(common)


def merge_split(a1: Block, a2: Block, direction: Direction = ASCENDING) -> tuple[Block, Block]:
    """Valid block comparison element: merge both runs, split them near-evenly.

    The merged run of t keys is cut at the point closest to ceil(t/2) that
    still honours the placement limits: every key below lb (the larger of the
    two minima) stays in the low output and every key above ub (the smaller
    of the two maxima) goes to the high output.  For equal-size inputs the
    limits never bind, so the cut is exactly ceil(t/2) and the largest block
    across a whole network run stays bounded by the largest initial block.
    ASCENDING returns (lower, upper); DESCENDING exchanges the outputs.
    Linear in t.

    The placement limits need both blocks non-empty.  An empty operand is
    treated like a run larger than every key: all keys go to the low output
    and the empty block moves up.  That keeps a network run correct on frames
    with empty lanes, which matter when there are fewer keys than wires.
    """
    ka, kb = _common_dtype(a1.keys, a2.keys)
    if ka.shape[0] == 0 or kb.shape[0] == 0:
        low = Block.from_sorted(kb if ka.shape[0] == 0 else ka)
        high = Block.from_sorted(np.empty(0, dtype=ka.dtype))
        return (low, high) if direction is ASCENDING else (high, low)
    merged = kernels.merge(ka, kb)
    merged.flags.writeable = False
    t = merged.shape[0]
    lb = max(ka[0], kb[0])
    ub = min(ka[-1], kb[-1])
    n_low = int(np.searchsorted(merged, lb, side="left"))
    n_high = t - int(np.searchsorted(merged, ub, side="right"))
    # The forced sections never overlap, so n_low <= t - n_high always holds.
    half = max(n_low, min((t + 1) // 2, t - n_high))
    low = Block.from_sorted(merged[:half])
    high = Block.from_sorted(merged[half:])
    return (low, high) if direction is ASCENDING else (high, low)


def naive_swap(a1: Block, a2: Block, direction: Direction = ASCENDING) -> tuple[Block, Block]:
    """Deliberately invalid block comparison element for counterexample runs.

    Orders whole blocks by their minimum and never mixes keys, which breaks
    the placement limits whenever blocks overlap.  Empty operands pass
    through unswapped.
    """
    if a1.is_empty or a2.is_empty:
        out = (a1, a2)
    else:
        out = (a2, a1) if a2.keys[0] < a1.keys[0] else (a1, a2)
    return out if direction is ASCENDING else (out[1], out[0])


@dataclass
class BlockStepReport:
    """Outcome of checking one block comparison step against the validity limits."""

    ok: bool
    violations: list[str]
    bounds: BlockBounds | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_block_step(a1: Block, a2: Block, out1: Block, out2: Block) -> BlockStepReport:
    """Check a (a1, a2) -> (out1, out2) step against all four validity clauses.

    (i) key conservation as multisets, (ii) out1 precedes out2, (iii) all
    input keys below lb are in out1, (iv) all input keys above ub are in
    out2.  Inputs must be non-empty (the limits are undefined otherwise).
    """
    if a1.is_empty or a2.is_empty:
        raise ValueError("validity is defined for non-empty input blocks only")
    bounds = block_bounds(a1, a2)
    violations = []

    ins = np.sort(np.concatenate([a1.keys, a2.keys]))
    outs = np.sort(np.concatenate([out1.keys, out2.keys]))
    if not np.array_equal(ins, outs):
        violations.append("conservation: outputs are not a permutation of the inputs")

    if not precedes(out1, out2):
        violations.append("order: out1 does not precede out2")

    below = Counter(x for x in ins.tolist() if x < bounds.lb)
    out1_below = Counter(x for x in out1.keys.tolist() if x < bounds.lb)
    if below - out1_below:
        missing = sorted((below - out1_below).elements())
        violations.append(f"low-section: keys below lb={bounds.lb} missing from out1: {missing}")

    above = Counter(x for x in ins.tolist() if x > bounds.ub)
    out2_above = Counter(x for x in out2.keys.tolist() if x > bounds.ub)
    if above - out2_above:
        missing = sorted((above - out2_above).elements())
        violations.append(f"high-section: keys above ub={bounds.ub} missing from out2: {missing}")

    return BlockStepReport(ok=not violations, violations=violations, bounds=bounds)


def is_valid_block_step(a1: Block, a2: Block, out1: Block, out2: Block) -> bool:
    return check_block_step(a1, a2, out1, out2).ok


def blocks_from_values(columns: Sequence[Iterable]) -> list[Block]:
    """Build one Block per column of keys (each column must be sorted)."""
    return [Block(col) for col in columns]
