"""Sorting networks over blocks of data.

A sorting network is data: a wire count plus stages of comparators.  Swap the
two-key comparator for a merge-split element over sorted blocks and the same
network merges pre-sorted runs — which turns any inner sorting algorithm into
a parallel one with fixed point-to-point communication.
"""

from .blocks import (
    Block,
    BlockBounds,
    BlockStepReport,
    KeyDomainError,
    as_keys,
    block_bounds,
    check_block_step,
    is_valid_block_step,
    merge_split,
    naive_swap,
    precedes,
    scalar_compare,
)
from .engine import (
    BlockFrame,
    DistributedMetrics,
    EngineError,
    RunMetrics,
    StageMetrics,
    as_frame,
    read_lane_file,
    run_distributed,
    run_parallel,
    run_sequential,
    scalar_frame,
    write_lane_file,
)
from .hybrid import (
    INNER_SORTERS,
    HybridMetrics,
    HybridPlan,
    InnerSorter,
    PsrsMetrics,
    hybrid_sort,
    hybrid_sort_timed,
    inner_sorter,
    parallel_mergesort_baseline,
    psrs_baseline,
)
from .network import (
    ASCENDING,
    DESCENDING,
    NETWORK_BUILDERS,
    Comparator,
    Direction,
    Network,
    NetworkFormatError,
    NetworkIssue,
    bitonic_network,
    dump_network,
    fig2_network,
    odd_even_merge_network,
    parse_network,
    shuffle,
    unshuffle,
    validate_network,
)
from .verify import (
    CheckFailure,
    CheckReport,
    Counterexample,
    check_lemma1_relations,
    find_counterexample,
    sorted_block_space,
    verify_agglomeration,
    verify_zero_one,
)

__version__ = "0.1.0"

__all__ = [
    "ASCENDING",
    "DESCENDING",
    "Block",
    "BlockBounds",
    "BlockFrame",
    "BlockStepReport",
    "CheckFailure",
    "CheckReport",
    "Comparator",
    "Counterexample",
    "Direction",
    "DistributedMetrics",
    "EngineError",
    "HybridMetrics",
    "HybridPlan",
    "INNER_SORTERS",
    "InnerSorter",
    "KeyDomainError",
    "NETWORK_BUILDERS",
    "Network",
    "NetworkFormatError",
    "NetworkIssue",
    "PsrsMetrics",
    "RunMetrics",
    "StageMetrics",
    "as_frame",
    "as_keys",
    "bitonic_network",
    "block_bounds",
    "check_block_step",
    "check_lemma1_relations",
    "dump_network",
    "fig2_network",
    "find_counterexample",
    "hybrid_sort",
    "hybrid_sort_timed",
    "inner_sorter",
    "is_valid_block_step",
    "merge_split",
    "naive_swap",
    "odd_even_merge_network",
    "parallel_mergesort_baseline",
    "parse_network",
    "precedes",
    "psrs_baseline",
    "read_lane_file",
    "run_distributed",
    "run_parallel",
    "run_sequential",
    "scalar_compare",
    "scalar_frame",
    "shuffle",
    "sorted_block_space",
    "unshuffle",
    "validate_network",
    "verify_agglomeration",
    "verify_zero_one",
    "write_lane_file",
]
