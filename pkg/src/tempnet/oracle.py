"""Exhaustive reference solvers for small instances.

These are deliberately naive and only guarded by size caps; the solvers are
tested against them.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .tree import Tree, TreeSet, h_set, min_cover, neighbor_sets, neighbors

CPS_CAP = 22
NB_CAP = 16
TCS_LEAF_CAP = 6
TCS_K_CAP = 4


class OracleLimit(ValueError):
    pass


def _subset_dp(ts: TreeSet, nonbinary: bool) -> Optional[int]:
    leaves = sorted(ts.leaves)
    if len(leaves) <= 1:
        return 0
    bit = {x: 1 << i for i, x in enumerate(leaves)}
    full = (1 << len(leaves)) - 1
    mode = "non-binary" if nonbinary else "binary"
    inf = float("inf")

    @lru_cache(maxsize=None)
    def best(mask: int) -> float:
        # mask = leaves already picked; the remaining trees are T \ picked
        if bin(full ^ mask).count("1") == 1:
            return 0
        picked = [x for x in leaves if mask & bit[x]]
        cur = ts.remove_leaves(picked)
        out = inf
        for x in h_set(cur, mode):
            if nonbinary:
                w = len(min_cover(neighbor_sets(cur, x))) - 1
            else:
                w = len(neighbors(cur, x)) - 1
            if w >= out:
                continue
            out = min(out, w + best(mask | bit[x]))
        return out

    value = best(0)
    return None if value == inf else int(value)


def brute_min_cps(ts: TreeSet) -> Optional[int]:
    """Minimum cherry-picking sequence weight, or ``None`` if none exists."""
    if len(ts.leaves) > CPS_CAP:
        raise OracleLimit(f"more than {CPS_CAP} leaves")
    if not ts.same_taxa():
        raise ValueError("trees must share one leaf set")
    return _subset_dp(ts, nonbinary=False)


def brute_min_nb(ts: TreeSet) -> Optional[int]:
    """Minimum non-binary cherry-picking sequence weight (neighbor covers)."""
    if len(ts.leaves) > NB_CAP:
        raise OracleLimit(f"more than {NB_CAP} leaves")
    if not ts.same_taxa():
        raise ValueError("trees must share one leaf set")
    return _subset_dp(ts, nonbinary=True)


def brute_min_tcs(ts: TreeSet, k_cap: int = TCS_K_CAP) -> Optional[int]:
    """Minimum tree-child sequence weight if it is at most ``k_cap``."""
    n = len(ts.leaves)
    if n > TCS_LEAF_CAP or k_cap > TCS_K_CAP:
        raise OracleLimit("instance exceeds the tree-child oracle caps")
    if n <= 1:
        return 0
    inf = float("inf")
    max_pairs = n - 1 + k_cap

    def state_key(trees: tuple[Tree, ...]):
        return tuple(sorted((t.key() for t in trees), key=repr))

    memo: dict = {}

    def best(trees: tuple[Tree, ...], used: frozenset[int]) -> float:
        """Fewest further pairs that reduce every tree to one common leaf."""
        key = (state_key(trees), used)
        if key in memo:
            return memo[key]
        if all(len(t) == 1 for t in trees):
            value = 0 if len({t.root for t in trees}) == 1 else inf
            memo[key] = value
            return value
        moves = set()
        for t in trees:
            for x, mates in t.cherry_map().items():
                for y in mates:
                    if y not in used:
                        moves.add((x, y))
        value = inf
        for x, y in sorted(moves):
            nxt = []
            for t in trees:
                mates = t.cherry_map().get(x)
                nxt.append(t.remove_leaves((x,)) if mates and y in mates else t)
            value = min(value, 1 + best(tuple(nxt), used | {x}))
        memo[key] = value
        return value

    pairs = best(tuple(ts.trees), frozenset())
    if pairs == inf or pairs > max_pairs:
        return None
    return int(pairs) + 1 - n
