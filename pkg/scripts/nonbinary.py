"""Non-binary two-tree instances: contraction statistics and solver timings.

Binary instances from the generator are contracted at a given rate; the
script reports the mean out-degree of internal vertices (so the rate can be
tuned to a desired degree) and times ``min_temporal_nb`` per target weight.
Contraction can leave a pair with no non-binary sequence at all even though
the source network still displays refinements of both trees; such instances
are counted separately.

    python scripts/nonbinary.py --n 20 --rate 0.3 --count 5
"""

import argparse
import statistics
import time
from dataclasses import dataclass

from tempnet.generate import generate_instance, max_target, mean_outdegree
from tempnet.nonbinary import min_temporal_nb
from tempnet.search import BudgetExhausted, SolveConfig


@dataclass
class NonbinaryConfig:
    n: int = 20
    rate: float = 0.3
    k_lo: int = 1
    k_hi: int = 8
    count: int = 5
    seed: int = 7
    timeout: float = 120.0


def run(cfg: NonbinaryConfig) -> dict:
    degrees, rows = [], []
    for k_target in range(cfg.k_lo, min(cfg.k_hi, max_target(cfg.n, 2)) + 1):
        for j in range(cfg.count):
            ts = generate_instance(cfg.n, 2, k_target, cfg.seed * 100_003 + 97 * k_target + j, cfg.rate)
            degrees.append(mean_outdegree(ts))
            start = time.perf_counter()
            try:
                k = min_temporal_nb(ts, SolveConfig(time_budget=cfg.timeout)).k
            except BudgetExhausted:
                k = "timeout"
            rows.append((k_target, k, time.perf_counter() - start))
    print(f"contraction rate {cfg.rate}: mean internal out-degree {statistics.mean(degrees):.3f} "
          f"(sd {statistics.pstdev(degrees):.3f}, {len(degrees)} instances)")
    for k_target in sorted({r[0] for r in rows}):
        mine = [r for r in rows if r[0] == k_target]
        found = [r[1] for r in mine]
        secs = [r[2] for r in mine]
        print(f"k_target={k_target:2d}  found={found}  mean={statistics.mean(secs):.3f}s  max={max(secs):.3f}s")
    none = sum(r[1] is None for r in rows)
    above = sum(isinstance(r[1], int) and r[1] > r[0] for r in rows)
    print(f"no sequence: {none}/{len(rows)}; minimum above k_target: {above}/{len(rows)}")
    return {"mean_outdegree": statistics.mean(degrees), "rows": rows}


def main() -> None:
    d = NonbinaryConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--rate", type=float, default=d.rate)
    ap.add_argument("--k-lo", type=int, default=d.k_lo)
    ap.add_argument("--k-hi", type=int, default=d.k_hi)
    ap.add_argument("--count", type=int, default=d.count)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--timeout", type=float, default=d.timeout)
    run(NonbinaryConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
