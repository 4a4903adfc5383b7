import random

import pytest
from hypothesis import given, settings, strategies as st

from tempnet.tree import (
    EmptyTreeError,
    LabelTable,
    TreeSet,
    cherries,
    clusters,
    h_set,
    minimal_clusters,
    neighbors,
    terminals,
    trivial_cherries,
    weight,
)
from conftest import forests, names, random_forest


def ids(ts, *leaves):
    return frozenset(ts.labels.lookup(x) for x in leaves)


def test_label_table_roundtrip():
    table = LabelTable(["x", "y", "z"])
    assert [table.lookup(table.name(i)) for i in range(3)] == [0, 1, 2]
    assert table.add("y") == 1
    assert len(table) == 3


def test_removal_suppresses_degree_two_vertex():
    ts = TreeSet.from_nested([(("a", "b"), "c")])
    out = ts.remove_leaves(ids(ts, "a"))
    assert out.key() == TreeSet.from_nested([("b", "c")], ["a", "b", "c"]).key()


def test_removing_all_leaves_is_strict_error():
    ts = TreeSet.from_nested([("a", "b")])
    with pytest.raises(EmptyTreeError):
        ts.remove_leaves(ids(ts, "a", "b"))


def test_tree_child_mode_drops_emptied_trees():
    ts = TreeSet.from_nested([("a", "b"), ("a", "c")])
    out = ts.remove_leaves(ids(ts, "a", "b"), tree_child=True)
    assert len(out.trees) == 1 and out.dropped == 1


@settings(max_examples=50, deadline=None)
@given(forests(min_n=3, max_n=10, max_m=2), st.data())
def test_removal_is_order_independent(ts, data):
    leaves = sorted(ts.leaves)
    x, y = data.draw(st.lists(st.sampled_from(leaves), min_size=2, max_size=2, unique=True))
    one = ts.remove_leaves({x}).remove_leaves({y})
    two = ts.remove_leaves({y}).remove_leaves({x})
    both = ts.remove_leaves({x, y})
    assert one.key() == two.key() == both.key()


def test_example_cherries_and_neighbors(example):
    per_tree = [cherries(t) for t in example.trees]
    assert ids(example, "a", "b") in per_tree[0]
    assert ids(example, "b", "d") in per_tree[1]
    assert neighbors(example, example.labels.lookup("b")) == ids(example, "a", "d")
    assert weight(example, example.labels.lookup("b")) == 1
    assert example.labels.lookup("b") in h_set(example)
    # b has different mates in the two trees
    assert trivial_cherries(example) == set()


def test_single_leaf_and_star_cherries():
    single = TreeSet.from_nested(["a"])
    assert cherries(single.trees[0]) == set()
    star = TreeSet.from_nested([("x", "y", "z")])
    assert cherries(star.trees[0]) == {frozenset({0, 1, 2})}


def test_leaf_outside_every_cherry_has_no_neighbors():
    ts = TreeSet.from_nested([("a", ("b", "c"))])
    assert neighbors(ts, ts.labels.lookup("a")) == frozenset()


@settings(max_examples=60, deadline=None)
@given(forests(min_n=2, max_n=8))
def test_neighbors_match_brute_scan(ts):
    for x in ts.leaves:
        scan = set()
        for t in ts.trees:
            for c in cherries(t):
                if x in c:
                    scan |= c - {x}
        assert neighbors(ts, x) == scan


def test_nonbinary_weight_uses_minimum_cover():
    # x has mates {a,b} in one tree and {b} in the other: cover {b}
    ts = TreeSet.from_nested([(("x", "a", "b"), "c"), ((("x", "b"), "a"), "c")])
    x = ts.labels.lookup("x")
    assert weight(ts, x, nonbinary=True) == 0
    assert weight(ts, x) == 1


def test_h_set_modes():
    ts = TreeSet.from_nested([(("a", "b"), "c"), (("a", "c"), "b")])
    a, b, c = (ts.labels.lookup(s) for s in "abc")
    assert h_set(ts) == {a}
    partial = TreeSet(ts.trees[:1] + (ts.trees[1].remove_leaves({b}),), ts.labels)
    assert b in h_set(partial, "tree-child")
    assert b not in h_set(partial, "binary")
    with pytest.raises(ValueError):
        h_set(ts, "bogus")


def test_minimal_clusters_and_terminals():
    ts = TreeSet.from_nested([((("a", "b"), "c"), ("d", "e")), ((("a", "c"), "b"), ("d", "e"))])
    a, b, c, d, e = (ts.labels.lookup(s) for s in "abcde")
    assert minimal_clusters(ts) == {frozenset({a, b}), frozenset({a, c}), frozenset({d, e})}
    # every minimal cluster holds a terminal
    term = terminals(ts)
    for cl in minimal_clusters(ts):
        assert cl & term
    # b and c never leave a, while d and e are interchangeable
    assert term == {a, d}


@settings(max_examples=60, deadline=None)
@given(forests(min_n=2, max_n=8, max_m=2))
def test_every_minimal_cluster_holds_a_terminal(ts):
    term = terminals(ts)
    for cl in minimal_clusters(ts):
        assert cl & term
    assert all(len(cl) > 1 for cl in minimal_clusters(ts))
    assert minimal_clusters(ts) <= clusters(ts)


def test_clusters_include_root_and_leaves():
    ts = random_forest(6, 1, random.Random(3))
    cl = ts.trees[0].clusters()
    assert ts.leaves in cl
    assert all(frozenset({x}) in cl for x in ts.leaves)
