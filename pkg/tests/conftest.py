import random

import pytest
from hypothesis import strategies as st

from tempnet.tree import TreeSet

# two binary trees, each leaf with weight 1 at the start, minimum weight 2
EXAMPLE_TREES = [(("a", "b"), ("c", ("d", "e"))), ((("b", "d"), "e"), ("a", "c"))]
# two binary trees with no temporal network; smallest two-tree case found by exhaustive search
NON_TEMPORAL_TREES = [((("d", "b"), "a"), "c"), ("b", ("d", ("a", "c")))]
EXAMPLE_NETWORK = "(((a,(b)#H2),(c)#H1),(((d,#H2),e),#H1));"
# a hybrid whose two parents lie on one tree path
NON_TEMPORAL_NETWORK = "((#H1,((a)#H1,b)),c);"


def names(n):
    return [chr(ord("a") + i) for i in range(n)]


def random_binary(leaves, rng):
    items = list(leaves)
    while len(items) > 1:
        i, j = sorted(rng.sample(range(len(items)), 2))
        y, x = items.pop(j), items.pop(i)
        items.append((x, y))
    return items[0]


def contract(nested, rng, rate):
    if isinstance(nested, str):
        return nested
    out = []
    for child in nested:
        sub = contract(child, rng, rate)
        if not isinstance(sub, str) and rng.random() < rate:
            out.extend(sub)
        else:
            out.append(sub)
    return tuple(out)


def random_forest(n, m, rng):
    leaves = names(n)
    return TreeSet.from_nested([random_binary(leaves, rng) for _ in range(m)], leaves)


@st.composite
def forests(draw, min_n=2, max_n=7, min_m=1, max_m=3):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(min_m, max_m))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_forest(n, m, random.Random(seed))


@st.composite
def nested_trees(draw, min_n=1, max_n=9, rate=0.0):
    n = draw(st.integers(min_n, max_n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    t = random_binary(names(n), rng)
    return contract(t, rng, rate) if rate else t


@pytest.fixture
def example():
    return TreeSet.from_nested(EXAMPLE_TREES)


@pytest.fixture
def non_temporal():
    return TreeSet.from_nested(NON_TEMPORAL_TREES)


# each entry must fail to parse with a byte offset
MALFORMED = [
    "",
    ";",
    "(a,b)",
    "((a,b);",
    "(a,b));",
    "(a,,b);",
    "(,a);",
    "(a,b)c d;",
    "(a,b);x",
    "(a:xyz,b);",
    "(a,a);",
    "(a,(b,c)",
    "('a,b);",
    "(a[unterminated,b);",
    "(a,b)#H1;",
    "(a b,c);",
    "(a,b):;",
    ")a,b(;",
    "(a,(b,c));(a,",
    "(a;b);",
]
