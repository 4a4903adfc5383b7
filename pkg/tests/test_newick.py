import random

import pytest
from hypothesis import given, settings, strategies as st

from tempnet.network import displays, is_temporal, reticulation_number
from tempnet.newick import (
    NewickError,
    parse_forest,
    parse_network,
    parse_tree,
    write_forest,
    write_network,
    write_tree,
)
from tempnet.tree import LabelTable, TreeSet
from conftest import EXAMPLE_NETWORK, MALFORMED, NON_TEMPORAL_NETWORK, forests, nested_trees


def test_lengths_internal_labels_and_comments_are_dropped():
    ts = parse_forest("# header\n((a:1.5,b:2)ab:0.1,[note]c);\n")
    assert write_forest(ts) == "((a,b),c);\n"


def test_quoted_labels_roundtrip():
    ts = parse_forest("(('it''s',\"q\"),'two words');")
    out = write_forest(ts)
    assert parse_forest(out).key() == ts.key()
    assert "'two words'" in out and "'it''s'" in out


def test_forest_shares_one_label_table():
    ts = parse_forest("((a,b),c);\n(a,(b,c));\n")
    assert len(ts.labels) == 3 and len(ts.trees) == 2


def test_deep_caterpillar_does_not_recurse():
    n = 5000
    text = "(" * (n - 1) + "x0," + ",".join(f"x{i})" for i in range(1, n)) + ";"
    t = parse_tree(text)
    assert len(t) == n


@pytest.mark.parametrize("text", MALFORMED)
def test_malformed_input_reports_offset(text):
    with pytest.raises(NewickError) as info:
        parse_forest(text)
    err = info.value
    assert 0 <= err.offset <= len(text.encode())
    assert f"at byte {err.offset}" in str(err)


def test_offset_counts_bytes_not_characters():
    with pytest.raises(NewickError) as info:
        parse_forest("(é,é);")
    assert info.value.offset == 4


@settings(max_examples=100, deadline=None)
@given(forests(min_n=1, max_n=12, max_m=3))
def test_forest_write_parse_roundtrip(ts):
    again = parse_forest(write_forest(ts), LabelTable(ts.labels))
    assert again.key() == ts.key()
    assert write_forest(again) == write_forest(ts)


@settings(max_examples=100, deadline=None)
@given(nested_trees(min_n=1, max_n=10, rate=0.4))
def test_nonbinary_tree_roundtrip(nested):
    ts = TreeSet.from_nested([nested])
    text = write_tree(ts.trees[0], ts.labels)
    assert parse_tree(text, LabelTable(ts.labels)) == ts.trees[0]


def test_network_roundtrip():
    net = parse_network(EXAMPLE_NETWORK)
    assert reticulation_number(net) == 2
    assert write_network(net).count("#H") == 4
    again = parse_network(write_network(net))
    assert write_network(again) == write_network(net)


def test_network_reference_before_definition():
    net = parse_network(NON_TEMPORAL_NETWORK)
    assert reticulation_number(net) == 1
    assert is_temporal(net) is None
    tree = parse_forest("((a,b),c);")
    assert displays(net, tree.trees[0], tree.labels)


@pytest.mark.parametrize("text", ["((a)#H1,(b)#H1);", "(#H1,b);", "((a,b)#,c);"])
def test_bad_hybrid_tags(text):
    with pytest.raises(NewickError):
        parse_network(text)


def test_dot_output_marks_hybrid_arcs_and_times():
    from tempnet.network import network_from_cps
    ts = parse_forest("((a,b),c);\n((a,c),b);\n")
    net, times = network_from_cps(ts, [0, 1, 2])
    dot = write_network(net, "dot", times)
    assert dot.startswith("digraph") and "dashed" in dot and "@" in dot
