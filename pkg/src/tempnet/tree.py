"""Rooted phylogenetic trees over interned leaf labels.

Leaves use their label id as node id, so a tree's node arrays are laid out
as ``[0, nleaf)`` for leaf slots (present or not) followed by internal
vertices.  Trees are immutable; ``remove_leaves`` returns a fresh copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

NO_PARENT = -1
ABSENT = -2

LeafSet = frozenset


class LabelTable:
    """Bidirectional map between leaf names and dense integer ids."""

    def __init__(self, names: Iterable[str] = ()):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> int:
        if name in self.index:
            return self.index[name]
        self.index[name] = len(self.names)
        self.names.append(name)
        return self.index[name]

    def lookup(self, name: str) -> int:
        return self.index[name]

    def name(self, leaf: int) -> str:
        return self.names[leaf]

    def ids(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index[n] for n in names)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self.index

    def __repr__(self) -> str:
        return f"LabelTable({self.names!r})"


class Tree:
    """A rooted tree without unary vertices.

    ``_parent[v]`` is the parent of node ``v`` (``NO_PARENT`` for the root,
    ``ABSENT`` for unused slots) and ``_children[v]`` its child tuple.
    """

    __slots__ = ("nleaf", "_parent", "_children", "root", "_leaves", "_cmap", "_key")

    def __init__(self, nleaf: int, parent: list[int], children: list[tuple[int, ...]],
                 root: int, leaves: frozenset[int]):
        self.nleaf = nleaf
        self._parent = parent
        self._children = children
        self.root = root
        self._leaves = leaves
        self._cmap: dict[int, frozenset[int]] | None = None
        self._key = None

    # construction -----------------------------------------------------

    @classmethod
    def from_nested(cls, nested, nleaf: int | None = None) -> "Tree":
        """Build from nested sequences of leaf ids, e.g. ``((0, 1), 2)``.

        Unary internal vertices are suppressed.
        """
        children: dict[object, list[object]] = {}
        leaves: list[int] = []
        counter = 0
        stack = [(nested, None)]
        root_token = None
        while stack:
            item, parent = stack.pop()
            if isinstance(item, int):
                token: object = item
                leaves.append(item)
            else:
                token = ("v", counter)
                counter += 1
                children[token] = []
                for sub in reversed(list(item)):
                    stack.append((sub, token))
            if parent is None:
                root_token = token
            else:
                children[parent].append(token)
        if len(set(leaves)) != len(leaves):
            raise ValueError("duplicate leaf in tree")
        if nleaf is None:
            nleaf = max(leaves) + 1 if leaves else 0
        return cls._normalize(nleaf, children, root_token)

    @classmethod
    def _normalize(cls, nleaf: int, children: dict, root) -> "Tree":
        """Renumber internal vertices after ``nleaf`` and suppress unary ones."""
        def resolve(v):
            while not isinstance(v, int) and len(children[v]) == 1:
                v = children[v][0]
            return v

        if root is None:
            return cls(nleaf, [ABSENT] * nleaf, [()] * nleaf, NO_PARENT, frozenset())
        root = resolve(root)
        ids: dict[object, int] = {}
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            if isinstance(v, int):
                continue
            if not children[v]:
                raise ValueError("internal vertex without children")
            ids[v] = nleaf + len(order)
            order.append(v)
            stack.extend(resolve(c) for c in children[v])
        size = nleaf + len(order)
        parent = [ABSENT] * size
        kids: list[tuple[int, ...]] = [()] * size
        leaves = []

        def nid(v):
            return v if isinstance(v, int) else ids[v]

        for v in order:
            cv = tuple(nid(resolve(c)) for c in children[v])
            kids[ids[v]] = cv
            for c in cv:
                parent[c] = ids[v]
        r = nid(root)
        parent[r] = NO_PARENT
        for x in range(nleaf):
            if parent[x] != ABSENT:
                leaves.append(x)
        return cls(nleaf, parent, kids, r, frozenset(leaves))

    def widen(self, nleaf: int) -> "Tree":
        """Return the same tree laid out for a larger leaf table."""
        if nleaf == self.nleaf:
            return self
        if nleaf < self.nleaf:
            raise ValueError("cannot shrink leaf table")
        shift = nleaf - self.nleaf

        def m(v: int) -> int:
            return v if v < self.nleaf or v < 0 else v + shift

        parent = self._parent[: self.nleaf] + [ABSENT] * shift + self._parent[self.nleaf:]
        parent = [p if p < 0 else m(p) for p in parent]
        children = self._children[: self.nleaf] + [()] * shift + self._children[self.nleaf:]
        children = [tuple(m(c) for c in cs) for cs in children]
        return Tree(nleaf, parent, children, m(self.root), self._leaves)

    # basic queries ----------------------------------------------------

    @property
    def leaves(self) -> frozenset[int]:
        return self._leaves

    def __len__(self) -> int:
        return len(self._leaves)

    def __contains__(self, x: int) -> bool:
        return x in self._leaves

    def is_leaf(self, v: int) -> bool:
        return v < self.nleaf

    def parent(self, v: int) -> int:
        return self._parent[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def internal_vertices(self) -> list[int]:
        return [v for v in range(self.nleaf, len(self._parent)) if self._parent[v] != ABSENT]

    def is_binary(self) -> bool:
        return all(len(self._children[v]) == 2 for v in self.internal_vertices())

    def postorder(self) -> list[int]:
        if self.root < 0:
            return []
        out = []
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done or v < self.nleaf:
                out.append(v)
            else:
                stack.append((v, True))
                stack.extend((c, False) for c in self._children[v])
        return out

    def cherry_map(self) -> dict[int, frozenset[int]]:
        """Map each leaf that lies in a cherry to its cherry mates."""
        if self._cmap is None:
            cmap = {}
            nleaf = self.nleaf
            for v in range(nleaf, len(self._parent)):
                if self._parent[v] == ABSENT:
                    continue
                kids = self._children[v]
                if all(c < nleaf for c in kids):
                    fs = frozenset(kids)
                    for c in kids:
                        cmap[c] = fs - {c}
            self._cmap = cmap
        return self._cmap

    def clusters(self) -> set[frozenset[int]]:
        below: dict[int, frozenset[int]] = {}
        for v in self.postorder():
            if v < self.nleaf:
                below[v] = frozenset((v,))
            else:
                below[v] = frozenset().union(*(below[c] for c in self._children[v]))
        return set(below.values())

    def key(self):
        """Canonical nested-tuple form; children ordered by their smallest leaf."""
        if self._key is None:
            rep: dict[int, tuple] = {}
            low: dict[int, int] = {}
            for v in self.postorder():
                if v < self.nleaf:
                    rep[v], low[v] = v, v
                else:
                    kids = sorted(self._children[v], key=low.__getitem__)
                    rep[v] = tuple(rep[c] for c in kids)
                    low[v] = low[kids[0]]
            self._key = rep.get(self.root, ())
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tree) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Tree({self.key()!r})"

    # leaf removal -----------------------------------------------------

    def remove_leaves(self, drop: Iterable[int]) -> "Tree":
        """Delete the given leaves (absent ones are ignored) and suppress."""
        drop = [x for x in drop if x in self._leaves]
        if not drop:
            return self
        parent = list(self._parent)
        children = list(self._children)
        root = self.root
        for x in drop:
            p = parent[x]
            parent[x] = ABSENT
            if p == NO_PARENT:
                root = NO_PARENT
                continue
            kids = tuple(c for c in children[p] if c != x)
            children[p] = kids
            if len(kids) == 1:
                c = kids[0]
                g = parent[p]
                parent[p] = ABSENT
                children[p] = ()
                parent[c] = g
                if g == NO_PARENT:
                    root = c
                else:
                    children[g] = tuple(c if u == p else u for u in children[g])
        return Tree(self.nleaf, parent, children, root, self._leaves.difference(drop))

    def restrict(self, keep: Iterable[int]) -> "Tree":
        return self.remove_leaves(self._leaves - frozenset(keep))


def cherries(tree: Tree) -> set[frozenset[int]]:
    """All cherries of ``tree`` as leaf sets."""
    out = set()
    for x, mates in tree.cherry_map().items():
        out.add(mates | {x})
    return out


class EmptyTreeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeSet:
    """An ordered collection of trees over one label table."""

    trees: tuple[Tree, ...]
    labels: LabelTable
    dropped: int = 0

    def __post_init__(self):
        n = len(self.labels)
        if any(t.nleaf != n for t in self.trees):
            object.__setattr__(self, "trees", tuple(t.widen(n) for t in self.trees))

    @classmethod
    def from_nested(cls, nested_trees: Sequence, names: Sequence[str] | None = None) -> "TreeSet":
        """Build from nested tuples of leaf *names*."""
        table = LabelTable(names or ())

        def intern(item):
            if isinstance(item, str):
                return table.add(item)
            return tuple(intern(c) for c in item)

        raw = [intern(t) for t in nested_trees]
        return cls(tuple(Tree.from_nested(r, len(table)) for r in raw), table)

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[Tree]:
        return iter(self.trees)

    def __getitem__(self, i: int) -> Tree:
        return self.trees[i]

    @property
    def leaves(self) -> frozenset[int]:
        return frozenset().union(*(t.leaves for t in self.trees))

    def same_taxa(self) -> bool:
        return len({t.leaves for t in self.trees}) <= 1

    def is_binary(self) -> bool:
        return all(t.is_binary() for t in self.trees)

    def names(self, leaves: Iterable[int]) -> list[str]:
        return [self.labels.name(x) for x in leaves]

    def with_trees(self, trees: Iterable[Tree], dropped: int = 0) -> "TreeSet":
        return TreeSet(tuple(trees), self.labels, self.dropped + dropped)

    def remove_leaves(self, drop: Iterable[int], tree_child: bool = False) -> "TreeSet":
        """``T \\ A``.  In strict mode a tree losing every leaf is an error;
        in tree-child mode such trees are dropped and counted."""
        drop = frozenset(drop)
        if not drop <= self.leaves:
            raise ValueError(f"leaves {sorted(drop - self.leaves)} not present")
        out = []
        lost = 0
        for t in self.trees:
            r = t.remove_leaves(drop)
            if not r.leaves:
                if not tree_child:
                    raise EmptyTreeError("removal would empty a tree")
                lost += 1
                continue
            out.append(r)
        return self.with_trees(out, lost)

    def key(self):
        """Order-insensitive canonical form (a multiset of tree keys)."""
        return tuple(sorted((t.key() for t in self.trees), key=repr))


# neighbor / weight queries -------------------------------------------------


def neighbor_sets(ts: TreeSet, x: int) -> list[frozenset[int]]:
    """Per tree containing ``x``: the cherry mates of ``x`` (empty if none)."""
    empty: frozenset[int] = frozenset()
    return [t.cherry_map().get(x, empty) for t in ts.trees if x in t.leaves]


def neighbors(ts: TreeSet, x: int) -> frozenset[int]:
    """``N_T(x)``: every leaf sharing a cherry with ``x`` in some tree."""
    return frozenset().union(*neighbor_sets(ts, x))


def min_cover(sets: Sequence[frozenset[int]]) -> frozenset[int] | None:
    """Smallest subset of the union hitting every set (lexicographically first).

    ``None`` when some set is empty.
    """
    if any(not s for s in sets):
        return None
    universe = sorted(frozenset().union(*sets))
    for size in range(1, len(universe) + 1):
        for combo in combinations(universe, size):
            cs = frozenset(combo)
            if all(cs & s for s in sets):
                return cs
    return frozenset()


def weight(ts: TreeSet, x: int, nonbinary: bool = False) -> int:
    """Pick weight of ``x``: extra neighbors beyond the first.

    With ``nonbinary`` the weight is the size of a minimum neighbor cover
    minus one; otherwise it is ``|N_T(x)| - 1``.
    """
    if nonbinary:
        cover = min_cover(neighbor_sets(ts, x))
        if cover is None:
            raise ValueError("leaf is not in a cherry of every tree")
        return len(cover) - 1
    n = neighbors(ts, x)
    if not n:
        raise ValueError("leaf is in no cherry")
    return len(n) - 1


MODES = ("binary", "tree-child", "non-binary")


def h_set(ts: TreeSet, mode: str = "binary") -> frozenset[int]:
    """Leaves that may be picked next.

    ``binary`` and ``non-binary``: leaves in a cherry of every tree.
    ``tree-child``: leaves in a cherry of every tree that contains them.
    """
    maps = [t.cherry_map() for t in ts.trees]
    if mode in ("binary", "non-binary"):
        if not maps:
            return frozenset()
        out = set(maps[0])
        for m in maps[1:]:
            out.intersection_update(m)
        return frozenset(out)
    if mode == "tree-child":
        return frozenset(
            x for x in ts.leaves
            if all(x in m for t, m in zip(ts.trees, maps) if x in t.leaves)
        )
    raise ValueError(f"unknown mode {mode!r}")


# clusters and terminals ----------------------------------------------------


def clusters(ts: TreeSet) -> set[frozenset[int]]:
    out: set[frozenset[int]] = set()
    for t in ts.trees:
        out |= t.clusters()
    return out


def minimal_clusters(ts: TreeSet) -> set[frozenset[int]]:
    """Nontrivial clusters with no nontrivial proper sub-cluster."""
    nontrivial = [c for c in clusters(ts) if len(c) > 1]
    return {c for c in nontrivial if not any(d < c for d in nontrivial)}


def terminals(ts: TreeSet) -> frozenset[int]:
    """Leaves maximal under "every nontrivial cluster containing x contains y".

    The relation is only a preorder: leaves that are siblings in every tree
    dominate each other.  Each maximal class is represented by its smallest
    leaf, so every minimal cluster still contains a terminal.  A leaf in no
    nontrivial cluster counts as terminal.
    """
    nontrivial = [c for c in clusters(ts) if len(c) > 1]
    above = {}
    for x in ts.leaves:
        containing = [c for c in nontrivial if x in c]
        above[x] = frozenset.intersection(*containing) if containing else frozenset((x,))
    return frozenset(
        x for x, up in above.items()
        if min(up) == x and all(x in above[y] for y in up)
    )


def trivial_cherries(ts: TreeSet) -> set[tuple[int, int]]:
    """Ordered pairs ``(a, b)`` forming a cherry in every tree containing ``a``."""
    out = set()
    for a in ts.leaves:
        mates = [t.cherry_map().get(a) for t in ts.trees if a in t.leaves]
        if mates and all(m is not None and len(m) == 1 for m in mates):
            if len(set(mates)) == 1:
                (b,) = mates[0]
                out.add((a, b))
    return out
