"""Acceptance suite: one test per criterion, each printing a single verdict line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from dataclasses import dataclass
from functools import lru_cache

import pytest

from tempnet.bench import fit_exponential_base, warm_up
from tempnet.cps import nontemporal_count, tcs_weight
from tempnet.generate import generate_instance, max_target
from tempnet.network import (
    displays,
    distance_of_labeling,
    is_temporal,
    is_tree_child,
    network_from_cps,
    network_from_tcs,
    reticulation_number,
    tcs_from_network,
)
from tempnet.newick import NewickError, parse_forest, write_forest
from tempnet.nonbinary import min_temporal_nb
from tempnet.oracle import brute_min_cps, brute_min_nb, brute_min_tcs
from tempnet.search import SolveConfig
from tempnet.semitemporal import min_semitemporal, pareto_sweep
from tempnet.temporal import min_temporal
from tempnet.tree import LabelTable, TreeSet
from conftest import MALFORMED, NON_TEMPORAL_TREES, contract, names, random_binary, random_forest

# criterion-1 settings, shared by the non-temporal detection check
DEFAULT_CFG = SolveConfig()


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")


def node_bound(k, p_empty=0):
    return 5 ** (k - p_empty + 1) * (k + 1) + 1


@dataclass
class OracleCase:
    ts: TreeSet
    expected: object
    k: object
    sequence: object
    nodes_per_k: dict


@lru_cache(maxsize=None)
def oracle_cases():
    """300 instances: 240 generated with k_target cycling 0..4 and 60 uniform
    random forests, which supply most of the non-temporal verdicts."""
    rng = random.Random(1)
    forests = []
    for i in range(240):
        n = rng.randint(3, 8)
        m = rng.choice((2, 3))
        k = min(i % 5, max_target(n, m))
        forests.append(generate_instance(n, m, k, seed=10_000 + i))
    for _ in range(60):
        forests.append(random_forest(rng.randint(4, 8), rng.choice((2, 3)), rng))
    cases = []
    for ts in forests:
        sol = min_temporal(ts, DEFAULT_CFG)
        cases.append(OracleCase(ts, brute_min_cps(ts), sol.k, sol.sequence, dict(sol.stats.per_k)))
    return tuple(cases)


def test_criterion_1_oracle_equivalence(capsys):
    start = time.perf_counter()
    cases = oracle_cases()
    secs = time.perf_counter() - start
    wrong = [c for c in cases if c.k != c.expected]
    refusals = sum(c.expected is None for c in cases)
    ok = not wrong and refusals > 0 and secs < 300
    report(capsys, 1, ok, f"{len(cases)} instances, {len(wrong)} mismatches, "
           f"{refusals} NOT-TEMPORAL verdicts, {secs:.1f}s (limit 300s)")
    assert not wrong
    assert refusals > 0
    assert secs < 300


def test_criterion_2_construction_validity(capsys):
    solved = [c for c in oracle_cases() if c.k is not None]
    bad = []
    for c in solved:
        net, _ = network_from_cps(c.ts, c.sequence)
        if not (is_tree_child(net) and is_temporal(net) is not None
                and all(displays(net, t, c.ts.labels) for t in c.ts.trees)
                and reticulation_number(net) == c.k):
            bad.append(write_forest(c.ts))
    report(capsys, 2, not bad, f"{len(solved) - len(bad)}/{len(solved)} networks valid")
    assert not bad, bad[:3]


def test_criterion_3_node_certificate(capsys):
    checked = over = 0
    worst = 0.0
    for c in oracle_cases():
        for k, nodes in c.nodes_per_k.items():
            checked += 1
            worst = max(worst, nodes / node_bound(k))
            over += nodes > node_bound(k)
    report(capsys, 3, over == 0, f"{checked} solves checked, {over} over the bound, "
           f"largest nodes/bound ratio {worst:.3g}")
    assert over == 0


@pytest.mark.slow
def test_criterion_4_scaling(capsys):
    warm_up()
    ks, secs, slow = [], [], []
    for k_target in range(2, 13):
        for j in range(3):
            ts = generate_instance(30, 2, k_target, seed=500 + 10 * k_target + j)
            start = time.perf_counter()
            sol = min_temporal(ts, SolveConfig(time_budget=60.0))
            elapsed = time.perf_counter() - start
            assert sol.k is not None and sol.k <= k_target
            ks.append(sol.k)
            secs.append(elapsed)
            if elapsed >= 60:
                slow.append((k_target, j, elapsed))
    base = fit_exponential_base(ks, secs)
    ok = not slow and 1.8 <= base <= 5.0
    report(capsys, 4, ok, f"{len(ks)} instances, slowest {max(secs):.1f}s (limit 60s), "
           f"fitted base {base:.2f} (range 1.8 to 5.0)")
    assert not slow
    assert 1.8 <= base <= 5.0


def test_criterion_5_non_temporal_detection(capsys):
    ts = TreeSet.from_nested(NON_TEMPORAL_TREES)
    start = time.perf_counter()
    sol = min_temporal(ts, DEFAULT_CFG)
    secs = time.perf_counter() - start
    ok = sol.k is None and secs < 10
    report(capsys, 5, ok, f"verdict {'NOT-TEMPORAL' if sol.k is None else sol.k}, {secs:.2f}s")
    assert sol.k is None
    assert secs < 10


@lru_cache(maxsize=None)
def non_temporal_instances(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        ts = random_forest(rng.randint(4, 7), rng.choice((2, 3)), rng)
        if brute_min_cps(ts) is None:
            out.append(ts)
    return tuple(out)


def test_criterion_6_semi_temporal_consistency(capsys):
    rng = random.Random(6)
    p0_wrong = 0
    for i in range(200):
        n, m = rng.randint(3, 8), rng.choice((2, 3))
        ts = generate_instance(n, m, min(rng.randint(0, 4), max_target(n, m)), seed=20_000 + i)
        if min_semitemporal(ts, 0).k != min_temporal(ts).k:
            p0_wrong += 1

    increasing = oracle_wrong = net_bad = oracle_checked = nets = 0
    for ts in non_temporal_instances(50, 66):
        front = pareto_sweep(ts)
        ks = [k for _, k in front if k is not None]
        increasing += any(b > a for a, b in zip(ks, ks[1:]))
        p_final, k_final = front[-1]
        if k_final is not None and p_final != k_final:
            increasing += 1  # the sweep must end where p catches up with k
        if len(ts.leaves) <= 6:
            truth = brute_min_tcs(ts)
            if truth is not None:
                oracle_checked += 1
                oracle_wrong += truth != k_final
        previous = None
        for p, k in front:
            if k is None or k == previous:
                continue
            previous = k
            sol = min_semitemporal(ts, p)
            net, times = network_from_tcs(sol.sequence, ts.labels)
            nets += 1
            if reticulation_number(net) > sol.k or distance_of_labeling(net, times) > p:
                net_bad += 1
    ok = not (p0_wrong or increasing or oracle_wrong or net_bad)
    report(capsys, 6, ok, f"p=0 mismatches {p0_wrong}/200; non-monotone fronts {increasing}/50; "
           f"oracle mismatches {oracle_wrong}/{oracle_checked}; bad networks {net_bad}/{nets}")
    assert p0_wrong == 0
    assert increasing == 0
    assert oracle_wrong == 0
    assert net_bad == 0


def test_criterion_7_nonbinary_equivalence(capsys):
    start = time.perf_counter()
    rng = random.Random(7)
    binary_wrong = 0
    for i in range(200):
        n = rng.randint(3, 9)
        if i % 2:
            ts = random_forest(n, 2, rng)
        else:
            ts = generate_instance(n, 2, min(rng.randint(0, 4), max_target(n, 2)), seed=30_000 + i)
        binary_wrong += min_temporal_nb(ts).k != min_temporal(ts).k
    contracted_wrong = 0
    for i in range(150):
        n = rng.randint(3, 7)
        leaves = names(n)
        pair = [contract(random_binary(leaves, rng), rng, 0.3) for _ in range(2)]
        ts = TreeSet.from_nested(pair, leaves)
        contracted_wrong += min_temporal_nb(ts).k != brute_min_nb(ts)
    secs = time.perf_counter() - start
    ok = not binary_wrong and not contracted_wrong and secs < 600
    report(capsys, 7, ok, f"binarized mismatches {binary_wrong}/200, contracted mismatches "
           f"{contracted_wrong}/150, {secs:.1f}s (limit 600s)")
    assert binary_wrong == 0
    assert contracted_wrong == 0
    assert secs < 600


def test_criterion_8_round_trip_bounds(capsys):
    rng = random.Random(8)
    instances = []
    for i in range(50):
        n, m = rng.randint(3, 7), rng.choice((2, 3))
        instances.append(generate_instance(n, m, min(rng.randint(0, 4), max_target(n, m)),
                                           seed=40_000 + i))
    instances.extend(non_temporal_instances(50, 88))
    failures = []
    for ts in instances:
        front = pareto_sweep(ts)
        # the solver's answer: fewest non-temporal elements at the optimal k
        p = next(p for p, k in front if k == front[-1][1])
        sol = min_semitemporal(ts, p)
        net, times = network_from_tcs(sol.sequence, ts.labels)
        back = tcs_from_network(net, times, ts.labels)
        r, d = reticulation_number(net), distance_of_labeling(net, times)
        if tcs_weight(ts, back) > r or nontemporal_count(back) > d:
            failures.append((write_forest(ts).replace("\n", " "), d, nontemporal_count(back)))
    ok = not failures
    detail = f"{len(instances) - len(failures)}/{len(instances)} instances within both bounds"
    if failures:
        forest, d, got = failures[0]
        detail += f"; first failure {forest}with d(N,t)={d} but extracted d={got}"
    report(capsys, 8, ok, detail)
    assert not failures


def _random_name(rng):
    plain = "abcdefghijklmnopqrstuvwxyz0123456789_"
    awkward = plain + " '()[]:;,é"
    pool = awkward if rng.random() < 0.3 else plain
    return "".join(rng.choice(pool) for _ in range(rng.randint(1, 6)))


def _random_named_forest(rng):
    n = rng.randint(1, 14)
    leaves = []
    while len(leaves) < n:
        name = _random_name(rng)
        if name not in leaves:
            leaves.append(name)
    rate = rng.choice((0.0, 0.0, 0.3, 0.6))
    trees = []
    for _ in range(rng.randint(1, 3)):
        t = random_binary(leaves, rng)
        trees.append(contract(t, rng, rate) if rate and not isinstance(t, str) else t)
    return TreeSet.from_nested(trees, leaves)


def test_criterion_9_parser(capsys):
    rng = random.Random(9)
    broken = 0
    for _ in range(1000):
        ts = _random_named_forest(rng)
        text = write_forest(ts)
        again = parse_forest(text, LabelTable(ts.labels))
        if again.key() != ts.key() or write_forest(again) != text:
            broken += 1
    silent = []
    for text in MALFORMED:
        try:
            parse_forest(text)
        except NewickError as exc:
            if not (0 <= exc.offset <= len(text.encode()) and f"at byte {exc.offset}" in str(exc)):
                silent.append(text)
        else:
            silent.append(text)
    ok = broken == 0 and not silent and len(MALFORMED) == 20
    report(capsys, 9, ok, f"round-trip failures {broken}/1000, malformed inputs without a "
           f"positioned error {len(silent)}/{len(MALFORMED)}")
    assert broken == 0
    assert not silent
    assert len(MALFORMED) == 20


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
