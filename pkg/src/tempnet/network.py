"""Phylogenetic networks: construction from sequences and verification.

A ``Network`` is a rooted DAG whose leaves carry names.  Time labelings are
plain ``dict`` maps from vertex to number.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Optional, Sequence

from .cps import GeneralizedCPS, is_tree_child_sequence, nontemporal_count, paired_count
from .tree import LabelTable, Tree, TreeSet, min_cover, neighbor_sets, neighbors

TimeLabeling = dict
DISPLAY_LIMIT = 25


class NetworkError(ValueError):
    pass


class Network:
    def __init__(self):
        self.children: dict[int, list[int]] = {}
        self.parents: dict[int, list[int]] = {}
        self.labels: dict[int, str] = {}
        self.root: Optional[int] = None
        self._next = 0

    # editing -------------------------------------------------------------

    def add_vertex(self, label: str | None = None) -> int:
        v = self._next
        self._next += 1
        self.children[v] = []
        self.parents[v] = []
        if label is not None:
            self.labels[v] = label
        if self.root is None:
            self.root = v
        return v

    def add_arc(self, u: int, v: int) -> None:
        self.children[u].append(v)
        self.parents[v].append(u)

    def remove_arc(self, u: int, v: int) -> None:
        self.children[u].remove(v)
        self.parents[v].remove(u)

    def remove_vertex(self, v: int) -> None:
        for c in list(self.children[v]):
            self.remove_arc(v, c)
        for p in list(self.parents[v]):
            self.remove_arc(p, v)
        del self.children[v], self.parents[v]
        self.labels.pop(v, None)
        if self.root == v:
            self.root = None

    def subdivide(self, u: int, v: int) -> int:
        w = self.add_vertex()
        i = self.children[u].index(v)
        self.children[u][i] = w
        j = self.parents[v].index(u)
        self.parents[v][j] = w
        self.parents[w].append(u)
        self.children[w].append(v)
        return w

    def copy(self) -> "Network":
        n = Network()
        n.children = {v: list(cs) for v, cs in self.children.items()}
        n.parents = {v: list(ps) for v, ps in self.parents.items()}
        n.labels = dict(self.labels)
        n.root = self.root
        n._next = self._next
        return n

    def tidy(self) -> None:
        """Drop unlabeled sinks, contract in/out-degree-1 vertices and an
        out-degree-1 root, until nothing changes."""
        changed = True
        while changed:
            changed = False
            for v in list(self.children):
                if v not in self.children:
                    continue
                cs, ps = self.children[v], self.parents[v]
                if not cs and v not in self.labels:
                    self.remove_vertex(v)
                    changed = True
                elif len(cs) == 1 and len(ps) == 1:
                    p, c = ps[0], cs[0]
                    self.remove_vertex(v)
                    self.add_arc(p, c)
                    changed = True
                elif len(cs) == 1 and not ps and v == self.root:
                    c = cs[0]
                    self.remove_vertex(v)
                    self.root = c
                    changed = True

    # queries -------------------------------------------------------------

    def vertices(self) -> list[int]:
        return list(self.children)

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, cs in self.children.items() for v in cs]

    def leaves(self) -> list[int]:
        return [v for v, cs in self.children.items() if not cs]

    def leaf_names(self) -> set[str]:
        return {self.labels[v] for v in self.leaves() if v in self.labels}

    def leaf_by_name(self) -> dict[str, int]:
        return {self.labels[v]: v for v in self.leaves()}

    def is_reticulation(self, v: int) -> bool:
        return len(self.parents[v]) >= 2

    def reticulations(self) -> list[int]:
        return [v for v in self.children if len(self.parents[v]) >= 2]

    def parent(self, v: int) -> int:
        (p,) = self.parents[v]
        return p

    def topological_order(self) -> list[int]:
        ts = TopologicalSorter({v: ps for v, ps in self.parents.items()})
        return list(ts.static_order())

    def validate(self) -> None:
        """Raise ``NetworkError`` unless the structural invariants hold."""
        roots = [v for v, ps in self.parents.items() if not ps]
        if len(roots) != 1 or roots[0] != self.root:
            raise NetworkError("network must have exactly one root")
        try:
            self.topological_order()
        except CycleError as e:
            raise NetworkError("network contains a cycle") from e
        for v, cs in self.children.items():
            ps = self.parents[v]
            if v == self.root:
                if len(cs) == 1:
                    raise NetworkError("root has out-degree one")
            elif not cs:
                if len(ps) != 1 or v not in self.labels:
                    raise NetworkError("leaves need one parent and a label")
            elif len(ps) == 1 and len(cs) < 2:
                raise NetworkError("tree vertex with out-degree below two")
            elif len(ps) >= 2 and len(cs) != 1:
                raise NetworkError("reticulation with out-degree other than one")
        names = [self.labels[v] for v in self.leaves()]
        if len(set(names)) != len(names):
            raise NetworkError("duplicate leaf labels")

    def __repr__(self) -> str:
        return f"Network({len(self.children)} vertices, r={reticulation_number(self)})"


# checks ------------------------------------------------------------------


def reticulation_number(n: Network) -> int:
    return sum(len(ps) - 1 for v, ps in n.parents.items() if ps)


def is_tree_child(n: Network) -> bool:
    """Every non-leaf vertex has a child that is not a reticulation."""
    return all(
        any(len(n.parents[c]) < 2 for c in cs)
        for cs in n.children.values() if cs
    )


def is_temporal(n: Network) -> Optional[TimeLabeling]:
    """A temporal labeling if one exists, else ``None``.

    Endpoints of hybridization arcs are merged into classes; tree arcs must
    then induce an acyclic order on the classes.  Times are longest-path
    depths in that quotient order.
    """
    up = {v: v for v in n.children}

    def find(v: int) -> int:
        while up[v] != v:
            up[v] = up[up[v]]
            v = up[v]
        return v

    for v in n.reticulations():
        for u in n.parents[v]:
            up[find(u)] = find(v)
    preds: dict[int, set[int]] = defaultdict(set)
    for u, v in n.arcs():
        if n.is_reticulation(v):
            continue
        cu, cv = find(u), find(v)
        if cu == cv:
            return None
        preds[cv].add(cu)
    classes = {find(v) for v in n.children}
    try:
        order = list(TopologicalSorter({c: preds.get(c, set()) for c in classes}).static_order())
    except CycleError:
        return None
    level: dict[int, int] = {}
    for c in order:
        level[c] = max((level[p] + 1 for p in preds.get(c, ())), default=0)
    return {v: level[find(v)] for v in n.children}


def check_semi_temporal(n: Network, t: TimeLabeling) -> bool:
    if any(v not in t for v in n.children):
        return False
    for u, v in n.arcs():
        if not n.is_reticulation(v) and not t[u] < t[v]:
            return False
    for v in n.reticulations():
        if t[v] != min(t[u] for u in n.parents[v]):
            return False
    return True


def check_temporal(n: Network, t: TimeLabeling) -> bool:
    if any(v not in t for v in n.children):
        return False
    for u, v in n.arcs():
        if n.is_reticulation(v):
            if t[u] != t[v]:
                return False
        elif not t[u] < t[v]:
            return False
    return True


def distance_of_labeling(n: Network, t: TimeLabeling) -> int:
    """Number of hybridization arcs whose endpoints carry different times."""
    return sum(1 for u, v in n.arcs() if n.is_reticulation(v) and t[u] != t[v])


def _switching_cluster_sets(n: Network, leaf_bits: dict[str, int]) -> Iterable[set[int]]:
    order = n.topological_order()[::-1]  # children before parents
    rets = [v for v in order if n.is_reticulation(v)]
    if reticulation_number(n) > DISPLAY_LIMIT:
        raise NetworkError(f"display check refused above {DISPLAY_LIMIT} reticulations")
    base = {}
    for v in order:
        if not n.children[v]:
            base[v] = leaf_bits.get(n.labels.get(v), 0)
    for choice in itertools.product(*(range(len(n.parents[v])) for v in rets)):
        chosen = {v: n.parents[v][i] for v, i in zip(rets, choice)}
        mask: dict[int, int] = {}
        for v in order:
            cs = n.children[v]
            if not cs:
                mask[v] = base[v]
                continue
            m = 0
            for c in cs:
                if c in chosen and chosen[c] != v:
                    continue
                m |= mask[c]
            mask[v] = m
        yield set(mask.values())


def displays(n: Network, tree: Tree, labels: LabelTable) -> bool:
    """Whether some switching of ``n`` restricted to the tree's leaves
    refines ``tree`` (cluster containment)."""
    names = {labels.name(x): x for x in tree.leaves}
    if not set(names) <= n.leaf_names():
        return False
    bits = {name: 1 << x for name, x in names.items()}
    wanted = {sum(1 << x for x in c) for c in tree.clusters()}
    for found in _switching_cluster_sets(n, bits):
        if wanted <= found:
            return True
    return False


def displays_all(n: Network, ts: TreeSet) -> bool:
    return all(displays(n, t, ts.labels) for t in ts.trees)


def switching_tree(n: Network, choice: dict[int, int]) -> tuple:
    """Nested tuple of leaf names for the tree kept by ``choice``
    (reticulation -> chosen parent), with unary vertices suppressed."""
    def build(v: int):
        cs = [c for c in n.children[v] if not (c in choice and choice[c] != v)]
        if not cs:
            return n.labels.get(v)
        parts = [p for p in (build(c) for c in cs) if p is not None]
        if not parts:
            return None
        return parts[0] if len(parts) == 1 else tuple(parts)
    return build(n.root)


def signature(n: Network) -> str:
    """Leaf-labelled unfolding; equal for isomorphic networks."""
    memo: dict[int, str] = {}
    for v in n.topological_order()[::-1]:
        cs = n.children[v]
        if not cs:
            memo[v] = n.labels[v]
        else:
            body = ",".join(sorted(memo[c] for c in cs))
            mark = f"#{len(n.parents[v])}" if n.is_reticulation(v) else ""
            memo[v] = f"({body}){mark}"
    return memo[n.root]


# construction from temporal sequences -----------------------------------------


def _network_from_attachments(steps: Sequence[tuple[str, Sequence[str]]], last: str) -> Network:
    """Build backwards: each ``(x, S)`` hangs ``x`` below a new vertex fed by
    subdivisions of the pendant arcs of the leaves in ``S``."""
    net = Network()
    root = net.add_vertex()
    leaf = {last: net.add_vertex(last)}
    net.add_arc(root, leaf[last])
    for x, attach in reversed(steps):
        px = net.add_vertex()
        leaf[x] = net.add_vertex(x)
        net.add_arc(px, leaf[x])
        for y in sorted(attach):
            yv = leaf[y]
            q = net.subdivide(net.parent(yv), yv)
            net.add_arc(q, px)
    net.tidy()
    return net


def network_from_cps(ts: TreeSet, s: Sequence[int], nonbinary: bool = False) -> tuple[Network, TimeLabeling]:
    """Temporal network whose reticulation number equals the weight of ``s``."""
    name = ts.labels.name
    steps = []
    cur = ts
    for x in s[:-1]:
        if nonbinary:
            cover = min_cover(neighbor_sets(cur, x))
            if cover is None:
                raise ValueError("sequence is not a cherry-picking sequence")
            attach = cover
        else:
            attach = neighbors(cur, x)
            if not attach:
                raise ValueError("sequence is not a cherry-picking sequence")
        steps.append((name(x), [name(y) for y in attach]))
        cur = cur.remove_leaves((x,))
    net = _network_from_attachments(steps, name(s[-1]))
    labeling = is_temporal(net)
    if labeling is None:  # pragma: no cover - construction is temporal
        raise NetworkError("constructed network is not temporal")
    return net, labeling


def network_from_cps_nonbinary(ts: TreeSet, s: Sequence[int]) -> tuple[Network, TimeLabeling]:
    """As ``network_from_cps`` but attaching to a minimum neighbor cover."""
    return network_from_cps(ts, s, nonbinary=True)


# tree-child sequences <-> networks --------------------------------------------


def network_from_tcs(s: GeneralizedCPS, labels: LabelTable) -> tuple[Network, TimeLabeling]:
    """Tree-child network with a semi-temporal labeling built from a full
    tree-child sequence.

    Consecutive items with the same first component are merged into one
    block.  Blocks are processed from last to first; a block whose leaf is
    not yet in the network adds it, otherwise the new arcs feed the leaf's
    existing reticulation and may be the only non-temporal arcs created.
    """
    if not is_tree_child_sequence(s):
        raise ValueError("sequence is not tree-child")
    r = paired_count(s)
    if len(s) != r + 1:
        raise ValueError("sequence must end with exactly one tail item")
    last = s[r][0]
    blocks: list[tuple[int, list[int]]] = []
    for x, y in s[:r]:
        if x == last:
            raise ValueError("the tail leaf may not appear as a first component")
        if blocks and blocks[-1][0] == x:
            blocks[-1][1].append(y)
        else:
            blocks.append((x, [y]))
    name = labels.name
    net = Network()
    root = net.add_vertex()
    plast = net.add_vertex()
    leaf = {last: net.add_vertex(name(last))}
    net.add_arc(root, plast)
    net.add_arc(plast, leaf[last])
    t: dict[int, float] = {root: 0, plast: 1, leaf[last]: 2}
    for x, ys in reversed(blocks):
        fresh = x not in leaf
        if fresh:
            px = net.add_vertex()
            leaf[x] = net.add_vertex(name(x))
            net.add_arc(px, leaf[x])
            tpx = None
        else:
            px = net.parent(leaf[x])
            tpx = t[px]
        missing = [y for y in ys if y not in leaf]
        if missing:
            raise ValueError("second component never reduced later; sequence is not full")
        above = {y: net.parent(leaf[y]) for y in ys}
        tau = max(t[p] for p in above.values())
        if tpx is not None:
            tau = max(tau, tpx - 1)
        for y in ys:
            v = net.subdivide(above[y], leaf[y])
            net.add_arc(v, px)
            t[v] = tau + 1
            t[leaf[y]] = tau + 2
        if fresh:
            t[px] = tau + 1
            t[leaf[x]] = tau + 2
    net.tidy()
    return net, {v: t[v] for v in net.children}


def _tree_path_ends(n: Network) -> dict[int, str]:
    """For the root and each reticulation, the leaf reached by following
    non-reticulation children."""
    out = {}
    for start in [n.root] + n.reticulations():
        v = start
        while n.children[v]:
            v = next(c for c in n.children[v] if not n.is_reticulation(c))
        out[start] = n.labels[v]
    return out


def tcs_from_network(n: Network, t: TimeLabeling, labels: LabelTable,
                     search_limit: int = 200_000) -> GeneralizedCPS:
    """Full tree-child sequence for ``n`` with weight ``r(n)``.

    A greedy reduction is tried first.  If it has more non-temporal elements
    than ``distance_of_labeling(n, t)``, an exact search over reduction orders
    (at most ``search_limit`` states) looks for a sequence with fewer.
    """
    seq = greedy_tcs_from_network(n, t, labels)
    target = distance_of_labeling(n, t)
    if nontemporal_count(seq) <= target or search_limit <= 0:
        return seq
    better = min_nontemporal_reduction(n, labels, search_limit, nontemporal_count(seq))
    return seq if better is None else better


def greedy_tcs_from_network(n: Network, t: TimeLabeling, labels: LabelTable) -> GeneralizedCPS:
    """Full tree-child sequence reducing ``n``.

    Cherries are reduced first, then non-temporal reticulated cherries (one
    arc at a time), and finally a reticulation leaf all of whose incoming
    arcs form temporal reticulated cherries is removed in one block.  Only
    the middle case produces non-temporal elements.
    """
    if not is_tree_child(n):
        raise ValueError("network is not tree-child")
    net = n.copy()
    ends = _tree_path_ends(net)
    ret_end = {leafname: v for v, leafname in ends.items() if v != net.root}
    special = set(ends.values())
    lid = labels.lookup
    seq: list[tuple[int, Optional[int]]] = []
    used: set[str] = set()  # leaves already used as a first component

    def delete_leaf(v: int) -> None:
        net.remove_vertex(v)
        net.tidy()

    while True:
        live = net.leaves()
        if len(net.children) == 1:
            (v,) = live
            seq.append((lid(net.labels[v]), None))
            break
        byname = {net.labels[v]: v for v in live}
        # 1. cherries
        options = []
        for u, cs in net.children.items():
            leafkids = sorted(net.labels[c] for c in cs if not net.children[c])
            for x, y in itertools.permutations(leafkids, 2):
                if y in used:
                    continue
                resolved = x in ret_end and (ret_end[x] not in net.children
                                             or not net.is_reticulation(ret_end[x]))
                rank = 0 if x in used else 1 if resolved else 2 if x not in special else 3
                options.append((rank, x, y))
        if options:
            _, x, y = min(options)
            seq.append((lid(x), lid(y)))
            used.add(x)
            delete_leaf(byname[x])
            continue
        # 2. reticulated cherries
        temporal, nontemporal = [], []
        for x, v in sorted(byname.items()):
            px = net.parent(v)
            if not net.is_reticulation(px):
                continue
            for u in net.parents[px]:
                ys = sorted(net.labels[c] for c in net.children[u] if not net.children[c])
                for y in ys:
                    (temporal if t[u] == t[px] else nontemporal).append((x, y, u, px))
        pick = next(((x, y, u, px) for x, y, u, px in nontemporal if y not in used), None)
        if pick is not None:
            x, y, u, px = pick
            seq.append((lid(x), lid(y)))
            used.add(x)
            net.remove_arc(u, px)
            net.tidy()
            continue
        done = False
        for x, v in sorted(byname.items()):
            px = net.parent(v)
            if not net.is_reticulation(px):
                continue
            qs = []
            for u in net.parents[px]:
                ys = sorted(net.labels[c] for c in net.children[u] if not net.children[c])
                if not ys or t[u] != t[px] or ys[0] in used:
                    qs = None
                    break
                qs.append(ys[0])
            if qs:
                seq.extend((lid(x), lid(q)) for q in sorted(qs))
                used.add(x)
                delete_leaf(v)
                done = True
                break
        if done:
            continue
        pick = next(((x, y, u, px) for x, y, u, px in temporal if y not in used), None)
        if pick is None:
            raise NetworkError("no reducible pair found; network is not tree-child")
        x, y, u, px = pick
        seq.append((lid(x), lid(y)))
        used.add(x)
        net.remove_arc(u, px)
        net.tidy()
    return tuple(seq)


def canonical_key(n: Network) -> frozenset:
    """Label-based identity for tree-child networks.

    Each vertex is named by the leaf at the end of its canonical tree path
    (always stepping to the non-reticulation child with the smallest such
    leaf) and the length of that path; in a tree-child network this pair
    determines the vertex.
    """
    name: dict[int, tuple[str, int]] = {}
    for v in n.topological_order()[::-1]:
        cs = n.children[v]
        if not cs:
            name[v] = (n.labels[v], 0)
            continue
        leaf, h = min(name[c] for c in cs if len(n.parents[c]) < 2)
        name[v] = (leaf, h + 1)
    arcs = sorted((name[u], name[v]) for u, v in n.arcs())
    return frozenset(enumerate(arcs)) if len(set(arcs)) != len(arcs) else frozenset(arcs)


def _reduction_moves(net: Network, used: frozenset) -> list[tuple[str, str, int | None, int | None]]:
    """``(x, y, u, px)``: reduce ``x`` against ``y``; ``u`` is None for a
    cherry (delete ``x``), else the arc ``(u, px)`` is removed."""
    moves = []
    for u, cs in net.children.items():
        leafkids = sorted(net.labels[c] for c in cs if not net.children[c])
        for x, y in itertools.permutations(leafkids, 2):
            if y not in used:
                moves.append((x, y, None, None))
    for v in net.leaves():
        px = net.parent(v)
        if len(net.parents[px]) < 2:
            continue
        for u in net.parents[px]:
            for c in net.children[u]:
                if not net.children[c] and net.labels[c] not in used:
                    moves.append((net.labels[v], net.labels[c], u, px))
    return moves


def min_nontemporal_reduction(n: Network, labels: LabelTable, limit: int = 200_000,
                              bound: int | None = None) -> Optional[GeneralizedCPS]:
    """Exact search over reduction orders of a tree-child network for a full
    tree-child sequence with the fewest non-temporal elements (below
    ``bound`` if given).  Returns ``None`` if nothing better is found within
    ``limit`` states."""
    lid = labels.lookup
    best: list = [float("inf") if bound is None else bound, None]
    seen: dict = {}
    count = [0]

    def rec(net: Network, used: frozenset, last, pending: dict, seq: list, d: int) -> None:
        if d >= best[0] or count[0] >= limit:
            return
        if len(net.children) == 1:
            (v,) = net.children
            best[0], best[1] = d, tuple(seq) + ((lid(net.labels[v]), None),)
            return
        count[0] += 1
        present = net.leaf_names()
        key = (canonical_key(net), used & present, last,
               tuple(sorted((x, c) for x, c in pending.items() if c and x in present)))
        if seen.get(key, float("inf")) <= d:
            return
        seen[key] = d
        for x, y, u, px in _reduction_moves(net, used):
            nxt = net.copy()
            if u is None:
                nxt.remove_vertex(nxt.leaf_by_name()[x])
            else:
                nxt.remove_arc(u, px)
            nxt.tidy()
            extra = pending.get(x, 0) if last != x else 0
            np = dict(pending)
            np[x] = (0 if last != x else pending.get(x, 0)) + 1
            seq.append((lid(x), lid(y)))
            rec(nxt, used | {x}, x, np, seq, d + extra)
            seq.pop()

    rec(n.copy(), frozenset(), None, {}, [], 0)
    return best[1]
