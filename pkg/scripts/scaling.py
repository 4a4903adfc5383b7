"""Running time of the temporal solver against the temporal hybridization number.

Generates a corpus of two-tree instances on 30 leaves with target weights
2..12, solves each one, and writes a CSV, a log-scale SVG scatter and the
fitted exponential base.

    python scripts/scaling.py --out runs/scaling --count 5
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

from tempnet.bench import fit_points, fit_exponential_base, run_bench, write_corpus, write_csv, write_svg


@dataclass
class ScalingConfig:
    out: Path = Path("runs/scaling")
    n: int = 30
    m: int = 2
    k_lo: int = 2
    k_hi: int = 12
    count: int = 5
    seed: int = 2020
    timeout: float = 600.0
    workers: int = 1


def run(cfg: ScalingConfig) -> float | None:
    corpus = cfg.out / "corpus"
    write_corpus(corpus, cfg.n, cfg.m, range(cfg.k_lo, cfg.k_hi + 1), cfg.count, cfg.seed)
    records = run_bench(corpus, cfg.timeout, "temporal", cfg.workers)
    write_csv(records, cfg.out / "times.csv")
    write_svg(records, cfg.out / "times.svg", title=f"n={cfg.n}, m={cfg.m}: time vs k")
    ks, secs = fit_points(records)
    by_k: dict[int, list[float]] = {}
    for k, s in zip(ks, secs):
        by_k.setdefault(k, []).append(s)
    for k in sorted(by_k):
        ts = by_k[k]
        print(f"k={k:2d}  instances={len(ts):2d}  mean={sum(ts) / len(ts):8.3f}s  max={max(ts):8.3f}s")
    timeouts = sum(r.timeout for r in records)
    print(f"timeouts: {timeouts}/{len(records)}")
    if len(by_k) < 2:
        return None
    base = fit_exponential_base(ks, secs)
    print(f"fitted base: {base:.3f}  (time ~ a * base**k)")
    return base


def main() -> None:
    d = ScalingConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=d.out)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--m", type=int, default=d.m)
    ap.add_argument("--k-lo", type=int, default=d.k_lo)
    ap.add_argument("--k-hi", type=int, default=d.k_hi)
    ap.add_argument("--count", type=int, default=d.count)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--timeout", type=float, default=d.timeout)
    ap.add_argument("--workers", type=int, default=d.workers)
    run(ScalingConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
