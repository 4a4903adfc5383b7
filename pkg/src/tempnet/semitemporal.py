"""Tree-child sequences with a bounded number of non-temporal elements.

Same branching as the temporal solver; when no branch rule applies and
budget for non-temporal elements remains, every cherry whose second leaf is
still in all trees is tried as a non-temporal element.
"""

from __future__ import annotations

import time
from typing import Iterator, NamedTuple, Optional

from .cps import EMPTY, EPS, PSI, ConstraintSet, GeneralizedCPS
from .search import Budget, SolveConfig, SolveStats
from .temporal import Solution, branch_constraints, temporal_ceiling
from .tree import TreeSet


class TCPickResult(NamedTuple):
    trees: TreeSet
    k: float
    constraints: ConstraintSet
    prefix: GeneralizedCPS


def _tables(ts: TreeSet):
    maps = [t.cherry_map() for t in ts.trees]
    nbrs: dict[int, frozenset[int]] = {}
    for m in maps:
        for x, mates in m.items():
            nbrs[x] = nbrs.get(x, frozenset()) | mates
    common = frozenset.intersection(*(t.leaves for t in ts.trees))
    return maps, nbrs, common


def pick_tc(ts: TreeSet, k: float, c: ConstraintSet = EMPTY) -> TCPickResult:
    """Remove leaves that can go first without loss.

    ``x`` qualifies when it is in a cherry of every tree containing it, its
    weight is zero or all its neighbor pairs are constrained, and each
    neighbor is present in every tree.  All pairs ``(x, n)`` are emitted.
    """
    prefix: list[tuple[int, Optional[int]]] = []
    while len(ts.leaves) > 1:
        maps, nbrs, common = _tables(ts)
        chosen = None
        for x in sorted(nbrs):
            if not all(x in m for t, m in zip(ts.trees, maps) if x in t.leaves):
                continue
            nb = nbrs[x]
            if not nb <= common:
                continue
            if len(nb) == 1 or all((x, n) in c.pairs for n in nb):
                chosen = x
                break
        if chosen is None:
            break
        x, nb = chosen, nbrs[chosen]
        prefix.extend((x, n) for n in sorted(nb))
        k -= len(nb) - 1
        ts = ts.remove_leaves((x,), tree_child=True)
        c = c.drop_leaf(x)
    return TCPickResult(ts, k, c, tuple(prefix))


def apply_pair(ts: TreeSet, x: int, y: int) -> TreeSet:
    """``T((x, y))``: remove ``x`` from the trees where it forms a cherry with ``y``."""
    out = []
    for t in ts.trees:
        mates = t.cherry_map().get(x)
        out.append(t.remove_leaves((x,)) if mates is not None and y in mates else t)
    return ts.with_trees(out)


def nontemporal_candidates(ts: TreeSet, c: ConstraintSet) -> list[tuple[int, int]]:
    maps, _, common = _tables(ts)
    cand = {
        (x, y)
        for m in maps for x, mates in m.items() for y in mates
        if y in common and x not in c.proj2
    }
    return sorted(cand)


def witnessed_measure(c: ConstraintSet, witnessed: frozenset[int]) -> float:
    """``P(C)`` minus the share of single constraints on witnessed leaves.

    A witnessed leaf already emitted a pair and is still present, so its
    next pair may be its last and cost nothing; the usual ``1 - psi`` for a
    lone constraint would overstate the remaining weight.
    """
    if not witnessed:
        return c.p_measure()
    lone = 0
    for x in witnessed & c.proj1:
        if len(c.with_first(x)) == 1:
            lone += 1
    return c.p_measure() - (1 - PSI) * lone


def _search(ts: TreeSet, k: float, k_star: int, p: int, c: ConstraintSet,
            witnessed: frozenset[int], budget: Budget, depth: int) -> Iterator[GeneralizedCPS]:
    budget.enter(depth)
    if k - witnessed_measure(c, witnessed) < -EPS:
        return
    t2, k2, c2, prefix = pick_tc(ts, k, c)
    budget.stats.picks += len(prefix)
    leaves = t2.leaves
    witnessed = witnessed & leaves
    if len(leaves) == 1:
        if k2 >= -EPS:
            yield prefix + ((next(iter(leaves)), None),)
        return
    if not c2.proj1 <= leaves:
        return
    # zero slack rules out a temporal finish but not a non-temporal one: a
    # leaf can meet two constraints with weight exactly one by leaving early
    # and coming back, so only negative slack prunes once p or a witness is live
    slack = k2 - witnessed_measure(c2, witnessed)
    if slack < -EPS or (slack <= EPS and p <= 0 and not witnessed):
        return
    children = branch_constraints(t2, c2)
    if children:
        for child in children:
            for rest in _search(t2, k2, k_star, p, child, witnessed, budget, depth + 1):
                yield prefix + rest
        return
    if p <= 0:
        return
    cand = nontemporal_candidates(t2, c2)
    if len(cand) > 8 * k_star:
        return
    for x, y in cand:
        c3 = c2.discard((x, y))
        own = c2.with_first(x)
        if len(own) == 1:
            c3 = c3.discard(*own)
        t3 = apply_pair(t2, x, y)
        # the pair costs weight and non-temporal budget only if x survives it
        cost = 1 if x in t3.leaves else 0
        seen = witnessed | {x} if cost else witnessed
        for rest in _search(t3, k2 - cost, k_star, p - cost, c3, seen, budget, depth + 1):
            yield prefix + ((x, y),) + rest


def _check_input(ts: TreeSet) -> None:
    if not ts.trees:
        raise ValueError("empty tree set")
    if not ts.same_taxa():
        raise ValueError("trees must share one leaf set")
    if not ts.is_binary():
        raise ValueError("trees must be binary")


def semi_temporal_cherry_picking(ts: TreeSet, k: float, k_star: int, p: int,
                                 c: ConstraintSet = EMPTY, cfg: SolveConfig = SolveConfig(),
                                 stats: SolveStats | None = None,
                                 budget: Budget | None = None) -> list[GeneralizedCPS]:
    """Tree-child sequences of weight at most ``k`` with at most ``p``
    non-temporal elements (first one only unless ``cfg.enumerate_all``)."""
    _check_input(ts)
    if p < 0:
        raise ValueError("p must be non-negative")
    if budget is None:
        budget = Budget(cfg, stats)
    start = time.perf_counter()
    gen = _search(ts, k, k_star, p, c, frozenset(), budget, 0)
    try:
        if cfg.enumerate_all:
            out = list(dict.fromkeys(gen))
        else:
            first = next(gen, None)
            out = [] if first is None else [first]
    finally:
        gen.close()
        budget.stats.seconds += time.perf_counter() - start
    return out


def tree_child_ceiling(ts: TreeSet) -> int:
    """Each useful pair removes a leaf from at least one tree, so a minimal
    sequence has at most ``m (n - 1)`` pairs."""
    return temporal_ceiling(ts)


def min_semitemporal(ts: TreeSet, p: int, cfg: SolveConfig = SolveConfig(),
                     k_max: int | None = None, budget: Budget | None = None) -> Solution:
    """Smallest ``k`` with a tree-child sequence of at most ``p`` non-temporal
    elements; ``k is None`` when none exists up to the ceiling."""
    _check_input(ts)
    ceiling = tree_child_ceiling(ts)
    if k_max is not None:
        ceiling = min(ceiling, k_max)
    if budget is None:
        budget = Budget(cfg)
    stats = budget.stats
    for k in range(ceiling + 1):
        before = stats.nodes
        found = semi_temporal_cherry_picking(ts, k, k, p, EMPTY, SolveConfig(), budget=budget)
        stats.per_k[k] = stats.nodes - before
        if found:
            return Solution(k, found[0], stats, ceiling)
    return Solution(None, None, stats, ceiling)


def pareto_sweep(ts: TreeSet, cfg: SolveConfig = SolveConfig(),
                 p_max: int | None = None) -> list[tuple[int, Optional[int]]]:
    """``(p, min k)`` for ``p = 0, 1, ...``; ``None`` marks no solution.

    Stops once ``p`` reaches the current minimum, since a sequence never has
    more non-temporal elements than its weight.
    """
    budget = Budget(cfg)
    ceiling = tree_child_ceiling(ts)
    limit = ceiling if p_max is None else min(p_max, ceiling)
    out: list[tuple[int, Optional[int]]] = []
    best: Optional[int] = None
    for p in range(limit + 1):
        sol = min_semitemporal(ts, p, cfg, k_max=best, budget=budget)
        if sol.k is not None:
            best = sol.k
        out.append((p, best))
        if best is not None and p >= best:
            break
    return out
