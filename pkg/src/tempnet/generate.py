"""Random instances with a known upper bound on the temporal hybridization number.

A random temporal network is grown from a random leaf order with random
attachment sets whose sizes add up to ``k_target``; ``m`` trees are then read
off by switching reticulations.  Every tree is displayed by the network, so
the instance has a solution of weight at most ``k_target``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .network import Network, _network_from_attachments, reticulation_number, switching_tree
from .tree import TreeSet


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    m: int
    k_target: int
    seed: int
    contract: float = 0.0

    def __post_init__(self):
        if self.n < 2 or self.m < 1 or self.k_target < 0:
            raise ValueError("need n >= 2, m >= 1, k_target >= 0")
        if not 0.0 <= self.contract < 1.0:
            raise ValueError("contraction rate must lie in [0, 1)")
        if self.k_target > (self.n - 1) * (self.m - 1):
            raise ValueError("k_target exceeds (n - 1)(m - 1)")
        if self.k_target > max_target(self.n, self.m):
            raise ValueError(f"k_target above {max_target(self.n, self.m)}, the most a "
                             f"{self.n}-leaf network read by {self.m} switchings can carry")


def _step_caps(n: int, m: int) -> list[int]:
    # step i attaches one leaf to the i+1.. later ones; its weight is at most
    # min(m, #available) - 1 so that m switchings can realise every arc
    return [min(m, n - 1 - i) - 1 for i in range(n - 1)]


def max_target(n: int, m: int) -> int:
    return sum(_step_caps(n, m))


def leaf_names(n: int) -> list[str]:
    width = len(str(n))
    return [f"t{i:0{width}d}" for i in range(1, n + 1)]


def random_temporal_network(n: int, m: int, k_target: int, rng: random.Random) -> Network:
    names = leaf_names(n)
    order = names[:]
    rng.shuffle(order)
    caps = _step_caps(n, m)
    if sum(caps) < k_target:
        raise ValueError("k_target too large for n and m")
    weights = [0] * (n - 1)
    open_steps = [i for i, c in enumerate(caps) if c > 0]
    for _ in range(k_target):
        i = rng.choice(open_steps)
        weights[i] += 1
        if weights[i] == caps[i]:
            open_steps.remove(i)
    steps = []
    for i in range(n - 1):
        avail = order[i + 1:]
        steps.append((order[i], rng.sample(avail, weights[i] + 1)))
    net = _network_from_attachments(steps, order[-1])
    assert reticulation_number(net) == k_target
    return net


def _contract(nested, rng: random.Random, rate: float, is_root: bool = True):
    if isinstance(nested, str):
        return nested
    out = []
    for child in nested:
        sub = _contract(child, rng, rate, False)
        if not isinstance(sub, str) and rng.random() < rate:
            out.extend(sub)
        else:
            out.append(sub)
    return tuple(out)


def trees_from_network(net: Network, m: int, rng: random.Random) -> list:
    """``m`` displayed trees (nested name tuples); tree ``j`` uses in-arc
    ``perm[j mod indegree]`` of each reticulation for a random ``perm``."""
    perms = {}
    for v in sorted(net.reticulations()):
        ps = list(net.parents[v])
        rng.shuffle(ps)
        perms[v] = ps
    return [switching_tree(net, {v: ps[j % len(ps)] for v, ps in perms.items()})
            for j in range(m)]


def generate_instance(n: int, m: int, k_target: int, seed: int, contract: float = 0.0) -> TreeSet:
    spec = InstanceSpec(n, m, k_target, seed, contract)
    return generate_from_spec(spec)[0]


def generate_from_spec(spec: InstanceSpec) -> tuple[TreeSet, Network]:
    rng = random.Random(spec.seed)
    net = random_temporal_network(spec.n, spec.m, spec.k_target, rng)
    nested = trees_from_network(net, spec.m, rng)
    if spec.contract > 0:
        nested = [_contract(t, rng, spec.contract) for t in nested]
    return TreeSet.from_nested(nested, leaf_names(spec.n)), net


def mean_outdegree(ts: TreeSet) -> float:
    degs = [len(t.children(v)) for t in ts.trees for v in t.internal_vertices()]
    return sum(degs) / len(degs) if degs else 0.0
