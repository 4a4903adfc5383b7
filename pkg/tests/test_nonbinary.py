import random

import pytest
from hypothesis import given, settings, strategies as st

from tempnet.cps import cps_weight, is_cps
from tempnet.nonbinary import cherry_picking_nb, min_temporal_nb
from tempnet.oracle import brute_min_nb
from tempnet.search import BudgetExhausted, SolveConfig
from tempnet.temporal import min_temporal
from tempnet.tree import TreeSet
from conftest import EXAMPLE_TREES, contract, names, random_binary


@st.composite
def contracted_pairs(draw, max_n=7, rate=0.35):
    n = draw(st.integers(2, max_n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    leaves = names(n)
    trees = [contract(random_binary(leaves, rng), rng, rate) for _ in range(2)]
    return TreeSet.from_nested(trees, leaves)


def test_identical_nonbinary_trees():
    t = (("a", "b", "c"), ("d", "e"), "f")
    assert min_temporal_nb(TreeSet.from_nested([t, t])).k == 0


def test_identical_stars():
    star = ("x", "y", "z", "w")
    sol = min_temporal_nb(TreeSet.from_nested([star, star]))
    assert sol.k == 0 and len(sol.sequence) == 4


def test_binary_example():
    assert min_temporal_nb(TreeSet.from_nested(EXAMPLE_TREES)).k == 2


def test_needs_exactly_two_trees():
    with pytest.raises(ValueError):
        min_temporal_nb(TreeSet.from_nested([("a", "b")]))
    with pytest.raises(ValueError):
        min_temporal_nb(TreeSet.from_nested([("a", "b")] * 3))


@settings(max_examples=80, deadline=None)
@given(contracted_pairs())
def test_matches_oracle_on_contracted_pairs(ts):
    sol = min_temporal_nb(ts)
    assert sol.k == brute_min_nb(ts)
    if sol.k is None:
        return
    assert is_cps(ts, sol.sequence, nonbinary=True)
    assert cps_weight(ts, sol.sequence, nonbinary=True) == sol.k


@settings(max_examples=40, deadline=None)
@given(contracted_pairs(max_n=6), st.integers(0, 3))
def test_enumeration_is_sound(ts, k):
    for s in cherry_picking_nb(ts, k, SolveConfig(enumerate_all=True)):
        assert cps_weight(ts, s, nonbinary=True) <= k


@settings(max_examples=60, deadline=None)
@given(contracted_pairs(max_n=8, rate=0.0))
def test_binary_pairs_agree_with_binary_solver(ts):
    assert min_temporal_nb(ts).k == min_temporal(ts).k


def test_budget_exhaustion():
    rng = random.Random(3)
    leaves = names(14)
    ts = TreeSet.from_nested([random_binary(leaves, rng) for _ in range(2)], leaves)
    with pytest.raises(BudgetExhausted):
        min_temporal_nb(ts, SolveConfig(node_budget=3))
