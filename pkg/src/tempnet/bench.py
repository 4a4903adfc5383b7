"""Benchmark corpus, per-instance timing records, CSV and SVG output."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .generate import InstanceSpec, generate_from_spec
from .newick import parse_forest, write_forest
from .nonbinary import min_temporal_nb
from .search import BudgetExhausted, SolveConfig
from .semitemporal import pareto_sweep
from .temporal import min_temporal
from .tree import TreeSet

CSV_COLUMNS = ("id", "n", "m", "mode", "k", "p", "nodes", "millis", "timeout")
MANIFEST = "manifest.json"


@dataclass
class BenchRecord:
    id: str
    n: int
    m: int
    mode: str
    k: Optional[int]
    p: Optional[int]
    nodes: int
    millis: float
    timeout: bool
    # last weight the search was working on; used to place timeouts in plots
    k_reached: Optional[int] = None

    def __post_init__(self):
        if self.timeout and self.k is not None:
            raise ValueError("a timed-out record cannot carry a solution weight")

    def row(self) -> list[str]:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return f"{v:.3f}"
            return str(v)
        return [cell(getattr(self, c)) for c in CSV_COLUMNS]


# corpus -----------------------------------------------------------------------


def write_corpus(out_dir: str | Path, n: int, m: int, k_targets: Sequence[int], count: int,
                 seed: int, contract: float = 0.0) -> list[dict]:
    """``count`` instances per target weight, one ``.nwk`` file each, plus a
    manifest.  Instance seeds derive from ``seed`` so the corpus is
    reproducible byte for byte."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    idx = 0
    for k in k_targets:
        for j in range(count):
            idx += 1
            spec = InstanceSpec(n, m, k, seed * 1_000_003 + idx, contract)
            ts, _ = generate_from_spec(spec)
            iid = f"i{idx:04d}"
            fname = f"{iid}.nwk"
            header = f"# n={n} m={m} k_target={k} seed={spec.seed} contract={contract}\n"
            (out / fname).write_text(header + write_forest(ts))
            entries.append({"id": iid, "file": fname, **asdict(spec)})
    (out / MANIFEST).write_text(json.dumps(entries, indent=1, sort_keys=True) + "\n")
    return entries


def read_manifest(corpus: str | Path) -> list[dict]:
    corpus = Path(corpus)
    path = corpus / MANIFEST
    if path.exists():
        return json.loads(path.read_text())
    return [{"id": p.stem, "file": p.name} for p in sorted(corpus.glob("*.nwk"))]


# solving ----------------------------------------------------------------------


def pick_mode(ts: TreeSet) -> str:
    if ts.is_binary():
        return "temporal"
    if len(ts.trees) == 2:
        return "nonbinary"
    raise ValueError("non-binary input needs exactly two trees")


_warm = False


def warm_up() -> None:
    """Load the compiled kernel once per process so the first timed solve
    does not pay for it."""
    global _warm
    if not _warm:
        min_temporal(TreeSet.from_nested([(("a", "b"), ("c", "d")), (("a", "c"), ("b", "d"))]))
        _warm = True


def solve_instance(iid: str, ts: TreeSet, mode: str, timeout: float | None) -> BenchRecord:
    """Time one solve.  ``mode`` may be ``auto``; a binary instance with no
    temporal solution falls through to the semi-temporal sweep in auto mode."""
    auto = mode == "auto"
    if auto:
        mode = pick_mode(ts)
    warm_up()
    cfg = SolveConfig(time_budget=timeout)
    n, m = len(ts.leaves), len(ts.trees)
    start = time.perf_counter()
    k = p = None
    nodes = 0
    try:
        if mode == "temporal":
            sol = min_temporal(ts, cfg)
            k, nodes = sol.k, sol.stats.nodes
            p = 0 if k is not None else None
            if k is None and auto:
                mode = "semitemporal"
        if mode == "semitemporal":
            left = None if timeout is None else max(timeout - (time.perf_counter() - start), 1e-3)
            front = pareto_sweep(ts, SolveConfig(time_budget=left))
            p, k = front[-1]
        elif mode == "nonbinary":
            sol = min_temporal_nb(ts, cfg)
            k, nodes = sol.k, sol.stats.nodes
            p = 0 if k is not None else None
    except BudgetExhausted as exc:
        millis = (time.perf_counter() - start) * 1000
        reached = max(exc.stats.per_k) + 1 if exc.stats.per_k else 0
        return BenchRecord(iid, n, m, mode, None, None, exc.stats.nodes, millis, True, reached)
    millis = (time.perf_counter() - start) * 1000
    return BenchRecord(iid, n, m, mode, k, p, nodes, millis, False, k)


def _solve_file(args) -> BenchRecord:
    iid, path, mode, timeout = args
    ts = parse_forest(Path(path).read_text())
    return solve_instance(iid, ts, mode, timeout)


def run_bench(corpus: str | Path, timeout: float | None = 600.0, mode: str = "auto",
              workers: int = 1) -> list[BenchRecord]:
    """One record per corpus instance, ordered by instance id."""
    corpus = Path(corpus)
    jobs = [(e["id"], str(corpus / e["file"]), mode, timeout) for e in read_manifest(corpus)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_solve_file, jobs))
    else:
        records = [_solve_file(j) for j in jobs]
    return sorted(records, key=lambda r: r.id)


# output -------------------------------------------------------------------------


def write_csv(records: Iterable[BenchRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.row())


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def fit_exponential_base(ks: Sequence[float], seconds: Sequence[float]) -> float:
    """``b`` in ``time ~ a * b**k`` by least squares on ``log(time)``."""
    if len(set(ks)) < 2:
        raise ValueError("need at least two distinct k values")
    slope, _ = statistics.linear_regression(list(ks), [math.log(max(s, 1e-9)) for s in seconds])
    return math.exp(slope)


def fit_points(records: Sequence[BenchRecord]) -> tuple[list[int], list[float]]:
    ok = [r for r in records if not r.timeout and r.k is not None]
    return [r.k for r in ok], [r.millis / 1000 for r in ok]


def write_svg(records: Sequence[BenchRecord], path: str | Path, title: str = "running time vs k") -> Optional[float]:
    """Scatter of wall time (log scale) against k; timeouts in red at the k
    they were working on.  Returns the fitted base, if a fit was possible."""
    width, height = 640, 420
    left, right, top, bottom = 70, 20, 40, 50
    pts = [(r.k if not r.timeout else r.k_reached, max(r.millis, 1e-3), r.timeout)
           for r in records if (r.k if not r.timeout else r.k_reached) is not None]
    ks = [p[0] for p in pts] or [0, 1]
    kmin, kmax = min(ks), max(ks)
    if kmin == kmax:
        kmax = kmin + 1
    ys = [p[1] for p in pts] or [1.0, 10.0]
    lo = math.floor(math.log10(min(ys)))
    hi = math.ceil(math.log10(max(ys)))
    if lo == hi:
        hi = lo + 1

    def sx(k: float) -> float:
        return left + (k - kmin) / (kmax - kmin) * (width - left - right)

    def sy(ms: float) -> float:
        frac = (math.log10(ms) - lo) / (hi - lo)
        return height - bottom - frac * (height - top - bottom)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    x0, y0 = left, height - bottom
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{width - right}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{top}" stroke="black"/>')
    for e in range(lo, hi + 1):
        y = sy(10 ** e)
        out.append(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{width - right}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{y + 4:.1f}" text-anchor="end">1e{e} ms</text>')
    for k in range(int(kmin), int(kmax) + 1):
        x = sx(k)
        out.append(f'<line x1="{x:.1f}" y1="{y0}" x2="{x:.1f}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{y0 + 16}" text-anchor="middle">{k}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">k</text>')
    for k, ms, late in pts:
        color = "#d62728" if late else "#1f77b4"
        out.append(f'<circle cx="{sx(k):.1f}" cy="{sy(ms):.1f}" r="3" fill="{color}" fill-opacity="0.7"/>')
    base = None
    fk, fs = fit_points(records)
    if len(set(fk)) >= 2:
        base = fit_exponential_base(fk, fs)
        slope, icpt = statistics.linear_regression(fk, [math.log(max(s, 1e-9)) for s in fs])
        a, b = kmin, kmax
        ya = math.exp(icpt + slope * a) * 1000
        yb = math.exp(icpt + slope * b) * 1000
        out.append(f'<line x1="{sx(a):.1f}" y1="{sy(ya):.1f}" x2="{sx(b):.1f}" y2="{sy(yb):.1f}" '
                   f'stroke="#2ca02c" stroke-dasharray="5,3"/>')
        out.append(f'<text x="{width - right - 4}" y="{top + 12}" text-anchor="end" fill="#2ca02c">'
                   f'fit: time ~ {base:.2f}^k</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
    return base
