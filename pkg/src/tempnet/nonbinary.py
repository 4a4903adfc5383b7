"""Temporal hybridization for two non-binary trees.

Zero-weight leaves are removed greedily.  Otherwise the search either tries
a bounded set of terminals as the next pick (when there are many terminals),
or picks all but one leaf of a minimal cluster containing a terminal.
Candidates are re-validated with their true non-binary weight, because the
branching decrements ``k`` by the number of picked leaves rather than by
their weights.
"""

from __future__ import annotations

import time
from typing import Iterator

from .cps import TemporalCPS, cps_weights, InvalidSequence
from .search import Budget, SolveConfig, SolveStats
from .temporal import Solution
from .tree import TreeSet, h_set, minimal_clusters, terminals, weight


def _zero_weight_prefix(ts: TreeSet) -> tuple[TreeSet, tuple[int, ...]]:
    prefix: list[int] = []
    while len(ts.leaves) > 1:
        h = h_set(ts, "non-binary")
        x = next((x for x in sorted(h) if weight(ts, x, nonbinary=True) == 0), None)
        if x is None:
            break
        prefix.append(x)
        ts = ts.remove_leaves((x,))
    return ts, tuple(prefix)


def _search(ts: TreeSet, k: int, budget: Budget, depth: int) -> Iterator[TemporalCPS]:
    budget.enter(depth)
    ts, prefix = _zero_weight_prefix(ts)
    budget.stats.picks += len(prefix)
    if len(ts.leaves) == 1:
        yield prefix + tuple(ts.leaves)
        return
    if k <= 0:
        return
    h = h_set(ts, "non-binary")
    term = sorted(terminals(ts))
    if len(term) > 2 * k:
        for x in term[:2 * k + 1]:
            if x in h:
                for rest in _search(ts.remove_leaves((x,)), k - 1, budget, depth + 1):
                    yield prefix + (x,) + rest
        return
    mins = sorted(minimal_clusters(ts), key=sorted)
    for q in term:
        around = [c for c in mins if q in c]
        if len(around) == 2 and all(len(c) == 2 for c in around):
            (y,) = around[0] - {q}
            (z,) = around[1] - {q}
            for x in sorted({q, y, z} & h):
                for rest in _search(ts.remove_leaves((x,)), k - 1, budget, depth + 1):
                    yield prefix + (x,) + rest
            continue
        for c in around:
            for x in sorted(c):
                rest_of = sorted(c - {x})
                if not set(rest_of) <= h:
                    continue
                for rest in _search(ts.remove_leaves(rest_of), k - len(rest_of), budget, depth + 1):
                    yield prefix + tuple(rest_of) + rest


def _check_input(ts: TreeSet) -> None:
    if len(ts.trees) != 2:
        raise ValueError("the non-binary solver takes exactly two trees")
    if not ts.same_taxa():
        raise ValueError("trees must share one leaf set")


def _true_weight(ts: TreeSet, s: TemporalCPS) -> int | None:
    try:
        return sum(cps_weights(ts, s, nonbinary=True))
    except InvalidSequence:
        return None


def cherry_picking_nb(ts: TreeSet, k: int, cfg: SolveConfig = SolveConfig(),
                      stats: SolveStats | None = None,
                      budget: Budget | None = None) -> list[TemporalCPS]:
    """Non-binary cherry-picking sequences of true weight at most ``k``."""
    _check_input(ts)
    if budget is None:
        budget = Budget(cfg, stats)
    start = time.perf_counter()
    out: list[TemporalCPS] = []
    gen = _search(ts, k, budget, 0)
    try:
        for s in gen:
            w = _true_weight(ts, s)
            if w is None or w > k:
                continue
            out.append(s)
            if not cfg.enumerate_all:
                break
    finally:
        gen.close()
        budget.stats.seconds += time.perf_counter() - start
    return list(dict.fromkeys(out))


def nonbinary_ceiling(ts: TreeSet) -> int:
    """With two trees a neighbor cover needs at most two leaves, so every
    pick weighs at most one."""
    return max(len(ts.leaves) - 1, 0)


def min_temporal_nb(ts: TreeSet, cfg: SolveConfig = SolveConfig(),
                    k_max: int | None = None) -> Solution:
    _check_input(ts)
    ceiling = nonbinary_ceiling(ts)
    if k_max is not None:
        ceiling = min(ceiling, k_max)
    budget = Budget(cfg)
    stats = budget.stats
    for k in range(ceiling + 1):
        before = stats.nodes
        found = cherry_picking_nb(ts, k, SolveConfig(), budget=budget)
        stats.per_k[k] = stats.nodes - before
        if found:
            return Solution(k, found[0], stats, ceiling)
    return Solution(None, None, stats, ceiling)
