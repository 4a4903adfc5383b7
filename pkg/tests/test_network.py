import random

import pytest
from hypothesis import given, settings, strategies as st

from tempnet.cps import is_full_tcs_for, is_tree_child_sequence, nontemporal_count, tcs_weight
from tempnet.network import (
    Network,
    NetworkError,
    check_semi_temporal,
    check_temporal,
    displays,
    displays_all,
    distance_of_labeling,
    is_temporal,
    is_tree_child,
    network_from_cps,
    network_from_cps_nonbinary,
    network_from_tcs,
    reticulation_number,
    signature,
    tcs_from_network,
)
from tempnet.newick import parse_forest, parse_network
from tempnet.nonbinary import min_temporal_nb
from tempnet.semitemporal import min_semitemporal
from tempnet.temporal import min_temporal
from tempnet.tree import TreeSet
from conftest import (
    EXAMPLE_NETWORK,
    NON_TEMPORAL_NETWORK,
    contract,
    forests,
    names,
    random_binary,
)


def naive_reticulations(net):
    arcs = len(net.arcs())
    with_parent = sum(1 for v in net.vertices() if net.parents[v])
    return arcs - with_parent


def test_tree_network_has_no_reticulation():
    net = parse_network("((a,b),(c,d));")
    net.validate()
    assert reticulation_number(net) == 0 and is_tree_child(net)
    assert is_temporal(net) is not None


def test_example_network(example):
    net = parse_network(EXAMPLE_NETWORK)
    net.validate()
    assert reticulation_number(net) == 2
    times = is_temporal(net)
    assert times is not None and check_temporal(net, times)
    assert displays_all(net, example)


def test_non_temporal_network_has_no_labeling():
    net = parse_network(NON_TEMPORAL_NETWORK)
    net.validate()
    assert is_tree_child(net)
    assert is_temporal(net) is None


def test_network_not_tree_child():
    # both children of the lower tree vertex are reticulations
    net = parse_network("(((a)#H1,(b)#H2),(#H1,(#H2,c)));")
    net.validate()
    assert not is_tree_child(net)


def test_validate_rejects_cycle_and_bad_degrees():
    net = Network()
    r, u, v = net.add_vertex(), net.add_vertex(), net.add_vertex("a")
    net.root = r
    net.add_arc(r, u)
    net.add_arc(u, v)
    with pytest.raises(NetworkError):
        net.validate()


def test_display_rejects_foreign_tree(example):
    net = parse_network(EXAMPLE_NETWORK)
    other = parse_forest("((a,e),((b,c),d));", example.labels)
    assert not displays(net, other.trees[0], example.labels)


def test_example_sequence_construction(example):
    s = tuple(example.labels.lookup(x) for x in "b,e,c,d,a".split(","))
    net, times = network_from_cps(example, s)
    assert reticulation_number(net) == 2
    assert is_tree_child(net) and check_temporal(net, times)
    assert displays_all(net, example)


def test_weight_zero_sequence_gives_the_tree():
    nested = random_binary(names(6), random.Random(1))
    ts = TreeSet.from_nested([nested, nested])
    sol = min_temporal(ts)
    net, _ = network_from_cps(ts, sol.sequence)
    assert reticulation_number(net) == 0
    assert displays(net, ts.trees[0], ts.labels)


@settings(max_examples=60, deadline=None)
@given(forests(min_n=2, max_n=8, min_m=2, max_m=3))
def test_temporal_solution_network(ts):
    sol = min_temporal(ts)
    if sol.k is None:
        return
    net, times = network_from_cps(ts, sol.sequence)
    net.validate()
    assert reticulation_number(net) == sol.k == naive_reticulations(net)
    assert is_tree_child(net)
    assert check_temporal(net, times)
    assert displays_all(net, ts)


def test_identical_stars_build_a_star():
    star = ("w", "x", "y", "z")
    ts = TreeSet.from_nested([star, star])
    for order in ((0, 1, 2, 3), (3, 1, 0, 2)):
        net, _ = network_from_cps_nonbinary(ts, order)
        # a binary refinement of the star
        assert reticulation_number(net) == 0
        assert displays_all(net, ts)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_nonbinary_network_displays_both_trees(n, seed):
    rng = random.Random(seed)
    leaves = names(n)
    ts = TreeSet.from_nested([contract(random_binary(leaves, rng), rng, 0.35) for _ in range(2)], leaves)
    sol = min_temporal_nb(ts)
    if sol.k is None:
        return
    net, times = network_from_cps_nonbinary(ts, sol.sequence)
    assert reticulation_number(net) == sol.k
    assert check_temporal(net, times)
    assert displays_all(net, ts)


@settings(max_examples=30, deadline=None)
@given(forests(min_n=2, max_n=7, min_m=2, max_m=2))
def test_binary_pair_constructions_agree(ts):
    sol = min_temporal(ts)
    if sol.k is None:
        return
    a, _ = network_from_cps(ts, sol.sequence)
    b, _ = network_from_cps_nonbinary(ts, sol.sequence)
    assert signature(a) == signature(b)


@settings(max_examples=40, deadline=None)
@given(forests(min_n=3, max_n=6, min_m=2, max_m=3), st.integers(0, 3))
def test_tree_child_sequence_network(ts, p):
    sol = min_semitemporal(ts, p)
    if sol.k is None:
        return
    s = sol.sequence
    net, times = network_from_tcs(s, ts.labels)
    net.validate()
    assert is_tree_child(net)
    assert check_semi_temporal(net, times)
    assert reticulation_number(net) <= tcs_weight(ts, s)
    assert displays_all(net, ts)
    d = distance_of_labeling(net, times)
    assert d <= nontemporal_count(s) <= p
    if d == 0:
        assert is_temporal(net) is not None


@settings(max_examples=40, deadline=None)
@given(forests(min_n=3, max_n=6, min_m=2, max_m=3), st.integers(0, 3))
def test_extracted_sequence_is_full_and_weight_bounded(ts, p):
    sol = min_semitemporal(ts, p)
    if sol.k is None:
        return
    net, times = network_from_tcs(sol.sequence, ts.labels)
    back = tcs_from_network(net, times, ts.labels)
    assert is_tree_child_sequence(back)
    assert is_full_tcs_for(ts, back)
    assert tcs_weight(ts, back) <= reticulation_number(net)
    # never worse than the sequence the network came from
    assert nontemporal_count(back) <= nontemporal_count(sol.sequence)


def test_temporal_network_extracts_temporal_sequence(example):
    net = parse_network(EXAMPLE_NETWORK)
    times = is_temporal(net)
    s = tcs_from_network(net, times, example.labels)
    assert nontemporal_count(s) == 0 and is_full_tcs_for(example, s)


def test_tree_extracts_weight_zero():
    ts = parse_forest("((a,b),(c,(d,e)));")
    net = parse_network("((a,b),(c,(d,e)));")
    s = tcs_from_network(net, is_temporal(net), ts.labels)
    assert tcs_weight(ts, s) == 0 and nontemporal_count(s) == 0


def test_tcs_builder_rejects_bad_sequences(example):
    with pytest.raises(ValueError):
        network_from_tcs(((0, 1), (1, 0), (1, None)), example.labels)
