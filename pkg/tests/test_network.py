"""Networks as data: construction, structural invariants, and the text format."""

import itertools
from pathlib import Path

import pytest

from blocknet.network import (
    ASCENDING,
    DESCENDING,
    NETWORK_BUILDERS,
    Comparator,
    Network,
    NetworkFormatError,
    bitonic_network,
    dump_network,
    fig2_network,
    odd_even_merge_network,
    parse_network,
    shuffle,
    unshuffle,
    validate_network,
)

DATA = Path(__file__).parent / "data"


def scalar_run(network, xs):
    """Reference interpreter: apply each comparator to a plain list of keys."""
    xs = list(xs)
    for stage in network.stages:
        for c in stage:
            lo, hi = sorted((xs[c.lo], xs[c.hi]))
            if c.direction is DESCENDING:
                lo, hi = hi, lo
            xs[c.lo], xs[c.hi] = lo, hi
    return xs


@pytest.mark.parametrize("order", range(5))
def test_bitonic_counts(order):
    net = bitonic_network(order)
    assert net.width == 2**order
    assert net.depth == order * (order + 1) // 2
    if order == 0:
        assert net.comparator_count == 0
    else:
        # every stage compares all wires in pairs
        assert net.comparator_count == net.depth * 2 ** (order - 1)


def test_bitonic_3_shape():
    net = bitonic_network(3)
    assert (net.width, net.depth, net.comparator_count) == (8, 6, 24)
    assert net.describe() == "width=8 depth=6 comparators=24"


def test_odd_even_merge_width4_shape():
    net = odd_even_merge_network(2)
    assert (net.width, net.depth, net.comparator_count) == (4, 3, 5)


def test_order_one_builders_coincide():
    assert bitonic_network(1).stages == odd_even_merge_network(1).stages


@pytest.mark.parametrize("builder", [bitonic_network, odd_even_merge_network])
@pytest.mark.parametrize("order", range(5))
def test_structural_invariants(builder, order):
    net = builder(order)
    for stage in net.stages:
        touched = [w for c in stage for w in (c.lo, c.hi)]
        assert len(touched) == len(set(touched))  # one comparator per wire per stage
        for c in stage:
            assert 0 <= c.lo < c.hi < net.width
    assert validate_network(net) is None


def test_fig2_network_transcription():
    net = fig2_network()
    got = [[(c.lo, c.hi) for c in stage] for stage in net.stages]
    assert got == [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(1, 2)]]
    assert all(c.direction is ASCENDING for stage in net.stages for c in stage)
    # it is the width-4 odd-even merge network under another name
    assert net.stages == odd_even_merge_network(2).stages


def test_width4_networks_sort_all_permutations():
    for net in (fig2_network(), bitonic_network(2)):
        for perm in itertools.permutations(range(4)):
            assert scalar_run(net, perm) == [0, 1, 2, 3]


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("builder", [bitonic_network, odd_even_merge_network])
def test_networks_sort_random_scalar_inputs(builder, order, rng):
    net = builder(order)
    for _ in range(25):
        xs = rng.integers(0, 50, net.width).tolist()
        assert scalar_run(net, xs) == sorted(xs)


def test_bitonic_uses_descending_comparators():
    dirs = {c.direction for st in bitonic_network(2).stages for c in st}
    assert dirs == {ASCENDING, DESCENDING}


def test_unshuffle_round_robin():
    assert unshuffle(3, list(range(1, 11))) == [[1, 4, 7, 10], [2, 5, 8], [3, 6, 9]]
    assert unshuffle(1, [5, 6]) == [[5, 6]]
    with pytest.raises(ValueError):
        unshuffle(0, [1])


def test_shuffle_inverts_unshuffle():
    assert shuffle([[1, 4, 7, 10], [2, 5, 8], [3, 6, 9]]) == list(range(1, 11))
    assert shuffle([[]]) == []
    assert shuffle([["a"], ["b"]]) == ["a", "b"]
    for k in (1, 2, 3, 5, 9):
        xs = list(range(17))
        assert shuffle(unshuffle(k, xs)) == xs


def test_dump_matches_golden():
    assert dump_network(fig2_network()).rstrip("\n") == (DATA / "fig2.net").read_text().rstrip("\n")


@pytest.mark.parametrize("builder,order", [
    (bitonic_network, 0),
    (bitonic_network, 3),
    (odd_even_merge_network, 2),
    (odd_even_merge_network, 4),
])
def test_parse_dump_roundtrip(builder, order):
    net = builder(order)
    again = parse_network(dump_network(net))
    assert again.width == net.width
    assert again.stages == net.stages


def test_parse_golden_file():
    net = parse_network((DATA / "fig2.net").read_text())
    assert net.stages == fig2_network().stages


@pytest.mark.parametrize("text", [
    "",
    "width=x stages=1\n0:1:A",
    "width=2 stages=1",                # missing stage line
    "width=2 stages=1\n0:2:A",         # wire out of range
    "width=4 stages=1\n0:1:A 1:2:A",   # wire reused within a stage
    "width=2 stages=1\n0:1:Z",         # bad direction
    "width=2 stages=1\n0:0:A",         # degenerate comparator
])
def test_parse_rejects_malformed(text):
    with pytest.raises(NetworkFormatError):
        parse_network(text)


def test_validate_flags_bad_wires():
    bad = Network(width=2, stages=((Comparator(0, 5, ASCENDING),),))
    issue = validate_network(bad)
    assert issue is not None
    assert "wire" in str(issue).lower() or issue.stage == 0


def test_builders_registry():
    assert set(NETWORK_BUILDERS) == {"bitonic", "oddeven"}
    assert NETWORK_BUILDERS["bitonic"](2).stages == bitonic_network(2).stages
    assert NETWORK_BUILDERS["oddeven"](2).stages == odd_even_merge_network(2).stages


def test_negative_order_rejected():
    for builder in (bitonic_network, odd_even_merge_network):
        with pytest.raises(ValueError):
            builder(-1)
