import itertools

import pytest
from hypothesis import given, settings

from tempnet.cps import cps_weight, is_cps
from tempnet.oracle import OracleLimit, brute_min_cps, brute_min_nb, brute_min_tcs
from tempnet.tree import TreeSet
from conftest import forests, names


def permutation_minimum(ts, nonbinary=False):
    best = None
    for perm in itertools.permutations(sorted(ts.leaves)):
        if is_cps(ts, perm, nonbinary):
            w = cps_weight(ts, perm, nonbinary)
            best = w if best is None else min(best, w)
    return best


@settings(max_examples=40, deadline=None)
@given(forests(min_n=1, max_n=6, min_m=1, max_m=3))
def test_subset_dp_matches_permutation_scan(ts):
    assert brute_min_cps(ts) == permutation_minimum(ts)


@settings(max_examples=25, deadline=None)
@given(forests(min_n=2, max_n=5, min_m=2, max_m=2))
def test_nonbinary_dp_matches_on_binary_input(ts):
    assert brute_min_nb(ts) == permutation_minimum(ts, nonbinary=True)


def test_known_values(example, non_temporal):
    assert brute_min_cps(example) == 2
    assert brute_min_cps(non_temporal) is None
    assert brute_min_tcs(example) == 2
    assert brute_min_tcs(non_temporal) == 2


@settings(max_examples=25, deadline=None)
@given(forests(min_n=2, max_n=5, min_m=2, max_m=3))
def test_tree_child_optimum_never_exceeds_temporal(ts):
    temporal = brute_min_cps(ts)
    tc = brute_min_tcs(ts)
    if temporal is not None and temporal <= 4:
        assert tc is not None and tc <= temporal


def test_caps():
    big = TreeSet.from_nested([tuple(names(7))])
    with pytest.raises(OracleLimit):
        brute_min_tcs(big)
    with pytest.raises(OracleLimit):
        brute_min_tcs(TreeSet.from_nested([("a", "b")]), k_cap=9)
