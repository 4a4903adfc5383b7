"""Branch-and-bound search for minimum-weight cherry-picking sequences.

``cherry_picking`` decides whether a set of binary trees on the same taxa
has a cherry-picking sequence of weight at most ``k`` satisfying a
constraint set, branching on constraint additions (two-way when the leaf
already heads a constraint, three-way otherwise).  ``min_temporal`` wraps
it in iterative deepening to find the temporal hybridization number.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .cps import EMPTY, EPS, ConstraintSet, TemporalCPS
from .search import Budget, SolveConfig, SolveStats
from .tree import ABSENT, TreeSet
from ._kernel import KernelSearch


class PickResult(NamedTuple):
    trees: TreeSet
    k: float
    constraints: ConstraintSet
    prefix: TemporalCPS
    dead: bool = False


@dataclass
class Solution:
    """Outcome of an iterative-deepening solve; ``k is None`` means no
    sequence exists up to the search ceiling."""

    k: Optional[int]
    sequence: Optional[tuple]
    stats: SolveStats = field(default_factory=SolveStats)
    ceiling: int = 0

    @property
    def feasible(self) -> bool:
        return self.k is not None


class BinaryState:
    """Mutable copies of binary trees on one shared leaf set.

    Cherry partners are maintained incrementally, and every change is logged
    so that a search can restore an earlier state with ``undo_to``.  Because
    ``T \\ S`` does not depend on the removal order, the present-leaf bitmask
    identifies the state.
    """

    __slots__ = ("nleaf", "ntree", "parent", "kids", "roots", "mask", "log",
                 "mates", "paired", "in_all", "in_any")

    def __init__(self, ts: TreeSet):
        self.nleaf = n = len(ts.labels)
        self.ntree = len(ts.trees)
        self.parent = [list(t._parent) for t in ts.trees]
        self.kids = [[list(c) for c in t._children] for t in ts.trees]
        self.roots = [t.root for t in ts.trees]
        self.mask = 0
        for x in ts.leaves:
            self.mask |= 1 << x
        self.log: list[tuple] = []
        self.mates = [[-1] * n for _ in ts.trees]
        self.paired = [0] * n  # number of trees where the leaf is in a cherry
        self.in_all: set[int] = set()
        self.in_any: set[int] = set()
        for i, t in enumerate(ts.trees):
            for x, ys in t.cherry_map().items():
                (y,) = ys
                self._assign(i, x, y)

    def leaves(self) -> list[int]:
        m, out, x = self.mask, [], 0
        while m:
            if m & 1:
                out.append(x)
            m >>= 1
            x += 1
        return out

    def _assign(self, i: int, y: int, v: int) -> None:
        row = self.mates[i]
        old = row[y]
        row[y] = v
        if (old < 0) == (v < 0):
            return
        c = self.paired[y] + (1 if v >= 0 else -1)
        self.paired[y] = c
        if c == self.ntree:
            self.in_all.add(y)
        else:
            self.in_all.discard(y)
        if c:
            self.in_any.add(y)
        else:
            self.in_any.discard(y)

    def _set_mate(self, i: int, y: int, v: int) -> None:
        old = self.mates[i][y]
        if old != v:
            self.log.append((1, i, y, old))
            self._assign(i, y, v)

    def neighbors(self, x: int) -> frozenset[int] | None:
        """``N(x)`` when ``x`` is in a cherry of every tree, else None."""
        if x not in self.in_all:
            return None
        return frozenset(row[x] for row in self.mates)

    def neighbor_table(self) -> dict[int, frozenset[int]]:
        """Union of cherry partners over all trees, for leaves in any cherry."""
        rows = self.mates
        return {x: frozenset(r[x] for r in rows if r[x] >= 0) for x in self.in_any}

    def remove(self, x: int) -> None:
        n = self.nleaf
        for i in range(self.ntree):
            par, kids = self.parent[i], self.kids[i]
            p = par[x]
            a, b = kids[p]
            s = b if a == x else a
            g = par[p]
            if g < 0:
                self.roots[i] = s
                idx = -1
            else:
                gk = kids[g]
                idx = 0 if gk[0] == p else 1
                gk[idx] = s
            par[s] = g
            par[x] = ABSENT
            self.log.append((0, i, x, p, s, g, idx))
            self._set_mate(i, x, -1)
            u = gk[1 - idx] if g >= 0 else -1
            if s < n:
                self._set_mate(i, s, u if 0 <= u < n else -1)
            if 0 <= u < n:
                self._set_mate(i, u, s if s < n else -1)
        self.mask &= ~(1 << x)

    def undo_to(self, mark: int) -> None:
        log = self.log
        while len(log) > mark:
            e = log.pop()
            if e[0]:
                self._assign(e[1], e[2], e[3])
                continue
            _, i, x, p, s, g, idx = e
            par = self.parent[i]
            par[x] = p
            par[s] = p
            if idx < 0:
                self.roots[i] = p
            else:
                self.kids[i][g][idx] = p
            self.mask |= 1 << x


def _pick(st: BinaryState, k: float, c: ConstraintSet) -> tuple[float, ConstraintSet, list[int], bool]:
    prefix: list[int] = []
    while st.mask & (st.mask - 1):
        chosen = None
        for x in sorted(st.in_all):
            nb = st.neighbors(x)
            if len(nb) == 1 or all((x, n) in c.pairs for n in nb):
                chosen, cw = x, len(nb) - 1
                break
        if chosen is None:
            break
        x = chosen
        if x in c.proj2 or (cw == 0 and x in c.proj1):
            return k, c, prefix, True
        prefix.append(x)
        k -= cw
        st.remove(x)
        c = c.drop_first(x)
    return k, c, prefix, False


def pick(ts: TreeSet, k: float, c: ConstraintSet = EMPTY) -> PickResult:
    """Repeatedly remove leaves that are safe to pick first.

    A leaf in a cherry of every tree is removed when its weight is zero or
    when every pair ``(x, n)`` with ``n`` a neighbor is already constrained.
    ``dead`` is set when a constraint can provably no longer be satisfied:
    the candidate is the second component of some constraint, or it heads
    a constraint while having weight zero.
    """
    k, c, prefix, dead = _pick(BinaryState(ts), k, c)
    rest = ts.remove_leaves(prefix) if prefix else ts
    return PickResult(rest, k, c, tuple(prefix), dead)


def _neighbor_table(ts: TreeSet) -> dict[int, frozenset[int]]:
    nbrs: dict[int, frozenset[int]] = {}
    for t in ts.trees:
        for x, mates in t.cherry_map().items():
            prev = nbrs.get(x)
            nbrs[x] = mates if prev is None else prev | mates
    return nbrs


def constraints_for_table(nbrs: dict[int, frozenset[int]], c: ConstraintSet) -> list[ConstraintSet]:
    pairs = c.pairs

    def free(x: int, y: int) -> bool:
        return (x, y) not in pairs and (y, x) not in pairs

    for x in sorted(c.proj1):
        nb = nbrs.get(x)
        if nb is None or len(nb) < 2:
            continue
        for y in sorted(nb):
            if free(x, y):
                return [c.add((x, y)), c.add((y, x))]
    for x in sorted(nbrs):
        nb = nbrs[x]
        if len(nb) < 2 or x in c.proj2:
            continue
        cand = [y for y in sorted(nb) if free(x, y)]
        if cand:
            a = cand[0]
            assert len(cand) > 1, "three-way rule without a second free neighbor"
            b = cand[1]
            return [c.add((a, x)), c.add((b, x)), c.add((x, a), (x, b))]
    return []


def branch_constraints(ts: TreeSet, c: ConstraintSet) -> list[ConstraintSet]:
    """Constraint sets for the child calls (empty list: no rule applies)."""
    return constraints_for_table(_neighbor_table(ts), c)


def _search(st: BinaryState, k: float, c: ConstraintSet, budget: Budget,
            depth: int) -> Iterator[TemporalCPS]:
    budget.enter(depth)
    if k - c.p_measure() < -EPS:
        return
    # the outcome depends only on (leaves, k, c), so failures are reusable
    key = (st.mask, c)
    if budget.known_failure(key, k - EPS):
        return
    found = False
    for s in _expand(st, k, c, budget, depth):
        found = True
        yield s
    if not found:
        budget.record_failure(key, k)


def _expand(st: BinaryState, k: float, c: ConstraintSet, budget: Budget,
            depth: int) -> Iterator[TemporalCPS]:
    mark = len(st.log)
    try:
        k2, c2, prefix, dead = _pick(st, k, c)
        budget.stats.picks += len(prefix)
        if dead:
            return
        mask = st.mask
        if not mask & (mask - 1):
            # the last leaf closes the sequence; a negative budget means the
            # forced picks already cost more than allowed
            if k2 >= -EPS:
                yield tuple(prefix) + (mask.bit_length() - 1,)
            return
        if any(not mask >> x & 1 for x in c2.proj1):
            return
        if k2 - c2.p_measure() <= EPS:
            return
        head = tuple(prefix)
        for child in constraints_for_table(st.neighbor_table(), c2):
            for rest in _search(st, k2, child, budget, depth + 1):
                yield head + rest
    finally:
        st.undo_to(mark)


def _check_input(ts: TreeSet) -> None:
    if not ts.trees:
        raise ValueError("empty tree set")
    if not ts.same_taxa():
        raise ValueError("trees must share one leaf set")
    if not ts.is_binary():
        raise ValueError("trees must be binary")


def cherry_picking(ts: TreeSet, k: float, c: ConstraintSet = EMPTY,
                   cfg: SolveConfig = SolveConfig(), stats: SolveStats | None = None,
                   budget: Budget | None = None) -> list[TemporalCPS]:
    """Sequences of weight at most ``k`` satisfying ``c``.

    In first-solution mode at most one sequence is returned.  Raises
    ``BudgetExhausted`` when a node or time budget runs out.
    """
    _check_input(ts)
    if budget is None:
        budget = Budget(cfg, stats)
    if cfg.accelerate and not cfg.enumerate_all:
        return _run_kernel(KernelSearch(ts), k, c, budget)
    start = time.perf_counter()
    gen = _search(BinaryState(ts), k, c, budget, 0)
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


def _run_kernel(engine: KernelSearch, k: float, c: ConstraintSet, budget: Budget) -> list[TemporalCPS]:
    start = time.perf_counter()
    try:
        found = engine.run(k, c, budget)
    finally:
        budget.stats.seconds += time.perf_counter() - start
    return [] if found is None else [found]


def temporal_ceiling(ts: TreeSet) -> int:
    """No pick weighs more than ``m - 1`` and there are ``n - 1`` picks."""
    return (len(ts.leaves) - 1) * (len(ts.trees) - 1)


def min_temporal(ts: TreeSet, cfg: SolveConfig = SolveConfig(),
                 k_max: int | None = None) -> Solution:
    """Smallest ``k`` admitting a cherry-picking sequence, by iterative deepening."""
    _check_input(ts)
    ceiling = temporal_ceiling(ts)
    if k_max is not None:
        ceiling = min(ceiling, k_max)
    stats = SolveStats()
    budget = Budget(cfg, stats)
    engine = KernelSearch(ts) if cfg.accelerate else None
    first_only = SolveConfig(accelerate=cfg.accelerate)
    for k in range(ceiling + 1):
        before = stats.nodes
        if engine is not None:
            found = _run_kernel(engine, k, EMPTY, budget)
        else:
            found = cherry_picking(ts, k, EMPTY, first_only, budget=budget)
        stats.per_k[k] = stats.nodes - before
        if found:
            return Solution(k, found[0], stats, ceiling)
    return Solution(None, None, stats, ceiling)
