"""Trade-off between reticulations and non-temporal arcs on random instances.

Draws uniform random binary forests, keeps the ones with no temporal
network, and prints the Pareto front (p: minimum k) of each, followed by how
often allowing one more non-temporal element lowers the minimum.

    python scripts/semitemporal_sweep.py --count 30 --n 7 --m 3
"""

import argparse
import random
import time
from collections import Counter
from dataclasses import dataclass

from tempnet.newick import write_forest
from tempnet.semitemporal import pareto_sweep
from tempnet.temporal import min_temporal
from tempnet.tree import TreeSet


@dataclass
class SweepConfig:
    count: int = 30
    n: int = 7
    m: int = 3
    seed: int = 3
    show_trees: bool = False


def random_binary(leaves: list[str], rng: random.Random):
    items = list(leaves)
    while len(items) > 1:
        i, j = sorted(rng.sample(range(len(items)), 2))
        y, x = items.pop(j), items.pop(i)
        items.append((x, y))
    return items[0]


def run(cfg: SweepConfig) -> list[list[tuple[int, int | None]]]:
    rng = random.Random(cfg.seed)
    leaves = [f"x{i}" for i in range(cfg.n)]
    fronts, drawn = [], 0
    while len(fronts) < cfg.count:
        drawn += 1
        ts = TreeSet.from_nested([random_binary(leaves, rng) for _ in range(cfg.m)], leaves)
        if min_temporal(ts).k is not None:
            continue
        start = time.perf_counter()
        front = pareto_sweep(ts)
        secs = time.perf_counter() - start
        fronts.append(front)
        shown = ", ".join(f"{p}: {'-' if k is None else k}" for p, k in front)
        print(f"[{len(fronts):3d}] {shown}   ({secs:.2f}s)")
        if cfg.show_trees:
            print("      " + write_forest(ts).replace("\n", " "))
    print(f"{cfg.count} non-temporal instances out of {drawn} drawn")
    drops = Counter()
    for front in fronts:
        for (_, a), (p, b) in zip(front, front[1:]):
            if a is not None and b is not None and b < a:
                drops[p] += 1
    first = Counter(next(p for p, k in f if k is not None) for f in fronts)
    print("smallest feasible p:", dict(sorted(first.items())))
    print("fronts where raising p to this value lowers k:", dict(sorted(drops.items())))
    return fronts


def main() -> None:
    d = SweepConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=d.count)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--m", type=int, default=d.m)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--show-trees", action="store_true")
    run(SweepConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
