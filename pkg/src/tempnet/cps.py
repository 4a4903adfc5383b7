"""Constraint sets, cherry-picking sequences and tree-child sequences.

A temporal sequence is a tuple of leaf ids.  A generalized sequence is a
tuple of ``(x, y)`` pairs whose tail items carry ``y = None``.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Optional, Sequence

from .tree import Tree, TreeSet, h_set, min_cover, neighbor_sets, neighbors

PSI = math.log(2) / math.log(5)
EPS = 1e-9

Pair = tuple[int, int]
TemporalCPS = tuple[int, ...]
GeneralizedCPS = tuple[tuple[int, Optional[int]], ...]


class InvalidSequence(ValueError):
    pass


class ConstraintSet:
    """Immutable set of ordered leaf pairs with cached projections."""

    __slots__ = ("pairs", "proj1", "proj2", "_p")

    def __init__(self, pairs: Iterable[Pair] = ()):
        self.pairs = frozenset(pairs)
        self.proj1 = frozenset(a for a, _ in self.pairs)
        self.proj2 = frozenset(b for _, b in self.pairs)
        self._p = PSI * len(self.pairs) + (1 - 2 * PSI) * len(self.proj1)

    def p_measure(self) -> float:
        return self._p

    def add(self, *pairs: Pair) -> "ConstraintSet":
        return ConstraintSet(self.pairs.union(pairs))

    def discard(self, *pairs: Pair) -> "ConstraintSet":
        return ConstraintSet(self.pairs.difference(pairs))

    def drop_first(self, x: int) -> "ConstraintSet":
        if x not in self.proj1:
            return self
        return ConstraintSet(c for c in self.pairs if c[0] != x)

    def drop_leaf(self, x: int) -> "ConstraintSet":
        if x not in self.proj1 and x not in self.proj2:
            return self
        return ConstraintSet(c for c in self.pairs if x not in c)

    def with_first(self, x: int) -> frozenset[Pair]:
        return frozenset(c for c in self.pairs if c[0] == x)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConstraintSet) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"ConstraintSet({sorted(self.pairs)})"


EMPTY = ConstraintSet()


def p_measure(c: ConstraintSet) -> float:
    """``psi*|C| + (1 - 2 psi)*|firsts(C)|``."""
    return c.p_measure()


def slack(k: float, c: ConstraintSet) -> float:
    return k - c.p_measure()


def exact_slack_sign(k: int, c: ConstraintSet) -> int:
    """Sign of ``k - P(C)`` computed with integers only.

    ``P(C) = a*psi + b`` with ``a = |C| - 2|firsts|`` and ``b = |firsts|``, so
    the comparison reduces to ``5**u`` against ``2**a``.
    """
    b = len(c.proj1)
    a = len(c.pairs) - 2 * b
    u = k - b
    if a == 0:
        return (u > 0) - (u < 0)
    if a > 0:
        if u <= 0:
            return -1
        return 1 if 5 ** u > 2 ** a else -1
    if u >= 0:
        return 1
    return 1 if 2 ** (-a) > 5 ** (-u) else -1


def g_set(ts: TreeSet, c: ConstraintSet) -> set[Pair]:
    """Ordered cherry pairs with neither orientation constrained."""
    out = set()
    for t in ts.trees:
        for x, mates in t.cherry_map().items():
            for y in mates:
                if (x, y) not in c.pairs and (y, x) not in c.pairs:
                    out.add((x, y))
    return out


# temporal sequences --------------------------------------------------------


def cps_weights(ts: TreeSet, s: Sequence[int], nonbinary: bool = False) -> list[int]:
    """Per-step weights of ``s`` (last leaf gets 0); raises if ``s`` is invalid."""
    s = tuple(s)
    if len(set(s)) != len(s):
        raise InvalidSequence("repeated leaf")
    if set(s) != ts.leaves:
        raise InvalidSequence("sequence does not cover the leaf set exactly")
    if not ts.same_taxa():
        raise InvalidSequence("trees do not share a leaf set")
    mode = "non-binary" if nonbinary else "binary"
    out = []
    cur = ts
    for x in s[:-1]:
        if x not in h_set(cur, mode):
            raise InvalidSequence(f"leaf {ts.labels.name(x)} is not in a cherry of every tree")
        if nonbinary:
            out.append(len(min_cover(neighbor_sets(cur, x))) - 1)
        else:
            out.append(len(neighbors(cur, x)) - 1)
        cur = cur.remove_leaves((x,))
    if s:
        out.append(0)
    return out


def is_cps(ts: TreeSet, s: Sequence[int], nonbinary: bool = False) -> bool:
    try:
        cps_weights(ts, s, nonbinary)
    except InvalidSequence:
        return False
    return True


def cps_weight(ts: TreeSet, s: Sequence[int], nonbinary: bool = False) -> int:
    return sum(cps_weights(ts, s, nonbinary))


def satisfies(ts: TreeSet, s: Sequence[int], c: ConstraintSet) -> bool:
    """Each ``(a, b)`` in ``c``: ``(a, b)`` is a cherry and ``a`` has positive
    weight at the moment ``a`` is picked."""
    pending = {}
    for a, b in c.pairs:
        pending.setdefault(a, set()).add(b)
    cur = ts
    for x in s[:-1]:
        if x in pending:
            nb = neighbors(cur, x)
            if len(nb) - 1 <= 0 or not pending[x] <= nb:
                return False
            del pending[x]
        cur = cur.remove_leaves((x,))
    return not pending


# generalized sequences -----------------------------------------------------


def apply_generalized(tree: Tree, s: GeneralizedCPS) -> Tree:
    """Apply the paired items of ``s``: ``(x, y)`` removes ``x`` iff it forms
    a cherry with ``y`` at that point."""
    for x, y in s:
        if y is None:
            continue
        mates = tree.cherry_map().get(x)
        if mates is not None and y in mates:
            tree = tree.remove_leaves((x,))
    return tree


def paired_count(s: GeneralizedCPS) -> int:
    r = 0
    for _, y in s:
        if y is None:
            break
        r += 1
    return r


def _check_shape(s: GeneralizedCPS) -> int:
    r = paired_count(s)
    if any(y is not None for _, y in s[r:]):
        raise InvalidSequence("paired item after the tail")
    return r


def is_full(s: GeneralizedCPS, leaves: Iterable[int]) -> bool:
    r = _check_shape(s)
    return len(s) > r and {x for x, _ in s} == set(leaves)


def is_tree_child_sequence(s: GeneralizedCPS) -> bool:
    try:
        r = _check_shape(s)
    except InvalidSequence:
        return False
    if len(s) > r + 1:
        return False
    seen_first: set[int] = set()
    for x, y in s:
        if y is not None and y in seen_first:
            return False
        seen_first.add(x)
    return True


def is_full_tcs_for(ts: TreeSet, s: GeneralizedCPS) -> bool:
    """``s`` is full on the leaf set and reduces every tree to a tail leaf."""
    if not is_full(s, ts.leaves):
        return False
    tail = {x for x, y in s if y is None}
    for t in ts.trees:
        end = apply_generalized(t, s)
        if len(end.leaves) != 1 or not end.leaves <= tail:
            return False
    return True


def tcs_weight(ts: TreeSet, s: GeneralizedCPS) -> int:
    return len(s) - len(ts.leaves)


def nontemporal_flags(s: GeneralizedCPS) -> list[bool]:
    """Element ``i`` is non-temporal when its first component recurs after
    an intervening element with a different first component."""
    n = len(s)
    last = {x: i for i, (x, _) in enumerate(s)}
    run_end = [0] * n
    for i in range(n - 1, -1, -1):
        same = i + 1 < n and s[i + 1][0] == s[i][0]
        run_end[i] = run_end[i + 1] if same else i
    return [last[x] > run_end[i] for i, (x, _) in enumerate(s)]


def nontemporal_count(s: GeneralizedCPS) -> int:
    return sum(nontemporal_flags(s))


def satisfies_generalized(s: GeneralizedCPS, c: ConstraintSet) -> bool:
    """Every ``(a, b)`` in ``c`` occurs as an item and ``a`` occurs as a first
    component at some other index."""
    firsts: dict[int, int] = {}
    for x, _ in s:
        firsts[x] = firsts.get(x, 0) + 1
    items = set(s)
    return all((a, b) in items and firsts.get(a, 0) >= 2 for a, b in c.pairs)


# text formats --------------------------------------------------------------


def format_cps(ts: TreeSet, s: Sequence[int]) -> str:
    return ",".join(ts.labels.name(x) for x in s)


def format_generalized(ts: TreeSet, s: GeneralizedCPS) -> str:
    name = ts.labels.name
    return "".join(f"({name(x)},{'-' if y is None else name(y)})" for x, y in s)
