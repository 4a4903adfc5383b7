"""Newick trees, forest files, and extended Newick / DOT for networks.

Branch lengths, internal labels and ``[...]`` comments are accepted on input
and dropped.  Forest files hold one tree per ``;``-terminated statement and
may contain ``#`` line comments between statements.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Optional

from .network import Network, NetworkError
from .tree import LabelTable, Tree, TreeSet

_DELIMS = set("(),:;[]'")


class NewickError(ValueError):
    """Syntax or content error; ``offset`` is a byte offset into the input."""

    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        super().__init__(f"{message} at byte {self.offset}")
        self.reason = message


@dataclass
class _Node:
    name: Optional[str]
    pos: int
    children: list["_Node"] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def fail(self, message: str, pos: int | None = None):
        raise NewickError(message, self.text, self.pos if pos is None else pos)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip(self) -> None:
        t = self.text
        while self.pos < len(t):
            ch = t[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = t.find("]", self.pos)
                if end < 0:
                    self.fail("unterminated comment")
                self.pos = end + 1
            else:
                break

    def label(self) -> Optional[str]:
        self.skip()
        t = self.text
        if self.pos < len(t) and t[self.pos] == "'":
            start = self.pos
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(t):
                    self.fail("unterminated quoted label", start)
                ch = t[self.pos]
                if ch == "'":
                    if t[self.pos + 1:self.pos + 2] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    return "".join(out)
                out.append(ch)
                self.pos += 1
        start = self.pos
        while self.pos < len(t) and t[self.pos] not in _DELIMS and not t[self.pos].isspace():
            self.pos += 1
        return t[start:self.pos] or None

    def length(self) -> None:
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip()
        start = self.pos
        t = self.text
        while self.pos < len(t) and (t[self.pos].isalnum() or t[self.pos] in "+-."):
            self.pos += 1
        try:
            float(t[start:self.pos])
        except ValueError:
            self.fail("bad branch length", start)

    def subtree(self) -> _Node:
        # explicit stack so deep caterpillars do not hit the recursion limit
        self.skip()
        stack: list[_Node] = []
        while True:
            ch = self.peek()
            if ch == "(":
                node = _Node(None, self.pos)
                self.pos += 1
                if stack:
                    stack[-1].children.append(node)
                stack.append(node)
                continue
            pos = self.pos
            name = self.label()
            if name is None:
                self.fail("expected a leaf name", pos)
            leaf = _Node(name, pos)
            self.length()
            if not stack:
                return leaf
            stack[-1].children.append(leaf)
            # close as many groups as the input closes
            while True:
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                    break
                if ch == ")":
                    self.pos += 1
                    node = stack.pop()
                    node.name = self.label()
                    self.length()
                    if not stack:
                        return node
                    continue
                self.fail("expected ',' or ')'" if ch else "unbalanced parentheses")

    def statement(self) -> _Node:
        if self.peek() == ";":
            self.fail("empty tree")
        node = self.subtree()
        if self.peek() != ";":
            self.fail("expected ';'" if self.peek() else "missing ';'")
        self.pos += 1
        return node


def _node_to_nested(node: _Node, table: LabelTable, text: str, seen: dict):
    out_stack = []
    # iterative post-order
    stack = [(node, False)]
    while stack:
        n, done = stack.pop()
        if "#" in (n.name or ""):
            raise NewickError("hybrid tag in a tree", text, n.pos)
        if not n.children:
            if n.name in seen:
                raise NewickError(f"duplicate leaf name {n.name!r}", text, n.pos)
            seen[n.name] = n.pos
            out_stack.append(table.add(n.name))
        elif done:
            k = len(n.children)
            parts = out_stack[-k:]
            del out_stack[-k:]
            out_stack.append(tuple(parts))
        else:
            stack.append((n, True))
            for c in reversed(n.children):
                stack.append((c, False))
    return out_stack[0]


def _tree_from_node(node: _Node, table: LabelTable, text: str) -> Tree:
    nested = _node_to_nested(node, table, text, {})
    return Tree.from_nested(nested, len(table))


def parse_tree(text: str, table: LabelTable | None = None) -> Tree:
    """Parse one Newick statement; new leaf names are appended to ``table``."""
    table = LabelTable() if table is None else table
    p = _Parser(text)
    node = p.statement()
    if p.peek():
        p.fail("trailing characters after ';'")
    return _tree_from_node(node, table, text)


def parse_forest(text: str, table: LabelTable | None = None) -> TreeSet:
    table = LabelTable() if table is None else table
    p = _Parser(text)
    trees = []
    while True:
        p.skip()
        if p.pos >= len(text):
            break
        if text[p.pos] == "#":
            end = text.find("\n", p.pos)
            p.pos = len(text) if end < 0 else end + 1
            continue
        trees.append(_tree_from_node(p.statement(), table, text))
    if not trees:
        raise NewickError("no trees in input", text, len(text))
    return TreeSet(tuple(trees), table)


def _quote(name: str) -> str:
    if name and not any(c in _DELIMS or c.isspace() for c in name):
        return name
    return "'" + name.replace("'", "''") + "'"


def write_tree(t: Tree, labels: LabelTable) -> str:
    if not len(t):
        raise ValueError("cannot write an empty tree")
    parts: dict[int, str] = {}
    for v in t.postorder():
        if t.is_leaf(v):
            parts[v] = _quote(labels.name(v))
        else:
            parts[v] = "(" + ",".join(parts[c] for c in t.children(v)) + ")"
    return parts[t.root] + ";"


def write_forest(ts: TreeSet) -> str:
    return "".join(write_tree(t, ts.labels) + "\n" for t in ts.trees)


# networks ---------------------------------------------------------------------


def _hybrid_tags(n: Network) -> dict[int, int]:
    order = [v for v in n.topological_order() if n.is_reticulation(v)]
    return {v: i + 1 for i, v in enumerate(order)}


def write_extended_newick(n: Network) -> str:
    tags = _hybrid_tags(n)
    for v, cs in n.children.items():
        if not cs and v not in n.labels:
            raise NetworkError("unlabeled vertex with out-degree zero")
    printed: set[int] = set()
    memo: dict[int, str] = {}

    def render(v: int) -> str:
        # reticulation subtrees are printed once, later mentions are bare tags
        if v in tags and v in printed:
            return f"#H{tags[v]}"
        if v in memo:
            return memo[v]
        label = _quote(n.labels[v]) if v in n.labels else ""
        if v in tags:
            printed.add(v)
            label += f"#H{tags[v]}"
        cs = n.children[v]
        body = "(" + ",".join(render(c) for c in cs) + ")" if cs else ""
        return body + label

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(n.children) + 100))
    try:
        return render(n.root) + ";"
    finally:
        sys.setrecursionlimit(limit)


def write_dot(n: Network, times: dict | None = None) -> str:
    lines = ["digraph network {"]
    for v in sorted(n.children):
        name = n.labels.get(v, "")
        if times is not None and v in times:
            t = times[v]
            name += f"@{int(t) if float(t).is_integer() else t}"
        shape = "box" if n.is_reticulation(v) else "ellipse"
        esc = name.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  v{v} [label="{esc}", shape={shape}];')
    for u, v in sorted(n.arcs()):
        style = " [style=dashed]" if n.is_reticulation(v) else ""
        lines.append(f"  v{u} -> v{v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_network(n: Network, fmt: str = "extended-newick", times: dict | None = None) -> str:
    if fmt == "extended-newick":
        return write_extended_newick(n)
    if fmt == "dot":
        return write_dot(n, times)
    raise ValueError(f"unknown network format {fmt!r}")


def parse_network(text: str) -> Network:
    """Parse an extended Newick network (``#H`` tags mark reticulations)."""
    p = _Parser(text)
    root = p.statement()
    if p.peek():
        p.fail("trailing characters after ';'")
    net = Network()
    hybrid_vertex: dict[str, int] = {}
    defined: dict[str, _Node] = {}
    named_leaf: dict[str, str] = {}

    def split(node: _Node) -> tuple[Optional[str], Optional[str]]:
        if node.name is None or "#" not in node.name:
            return node.name, None
        name, tag = node.name.split("#", 1)
        if not tag:
            raise NewickError("empty hybrid tag", text, node.pos)
        return name or None, tag

    # first pass: collect hybrid definitions
    stack = [root]
    while stack:
        node = stack.pop()
        name, tag = split(node)
        if tag is not None:
            if node.children:
                if tag in defined:
                    raise NewickError(f"hybrid #{tag} defined twice", text, node.pos)
                defined[tag] = node
            elif name is not None:
                if tag in named_leaf:
                    raise NewickError(f"hybrid #{tag} labelled twice", text, node.pos)
                named_leaf[tag] = name
        stack.extend(node.children)

    def vertex_for(node: _Node) -> tuple[int, bool]:
        name, tag = split(node)
        if tag is None:
            return net.add_vertex(name if not node.children else None), True
        if tag not in hybrid_vertex:
            hybrid_vertex[tag] = net.add_vertex()
            if tag not in defined:
                if tag not in named_leaf:
                    raise NewickError(f"hybrid #{tag} has no subtree", text, node.pos)
                leaf = net.add_vertex(named_leaf[tag])
                net.add_arc(hybrid_vertex[tag], leaf)
        return hybrid_vertex[tag], node is defined.get(tag)

    rv, _ = vertex_for(root)
    stack = [(root, rv)]
    while stack:
        node, v = stack.pop()
        for c in node.children:
            cv, expand = vertex_for(c)
            net.add_arc(v, cv)
            if expand:
                stack.append((c, cv))
    names = [net.labels[v] for v in net.leaves() if v in net.labels]
    if len(set(names)) != len(names):
        raise NewickError("duplicate leaf name", text, 0)
    net.root = rv
    return net
