"""Configuration, statistics and budget accounting shared by the solvers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional


FAILURE_TABLE_LIMIT = 2_000_000


class BudgetExhausted(RuntimeError):
    """The node or time budget ran out before the search finished."""

    def __init__(self, message: str, stats: "SolveStats"):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class SolveConfig:
    enumerate_all: bool = False
    # compiled search for first-solution binary temporal solves
    accelerate: bool = True
    node_budget: Optional[int] = None
    time_budget: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


@dataclass
class SolveStats:
    nodes: int = 0
    max_depth: int = 0
    picks: int = 0
    seconds: float = 0.0
    per_k: dict = field(default_factory=dict)

    def merge(self, other: "SolveStats") -> None:
        self.nodes += other.nodes
        self.max_depth = max(self.max_depth, other.max_depth)
        self.picks += other.picks
        self.seconds += other.seconds


class Budget:
    """Counts recursion nodes and enforces the configured limits.

    The deadline is shared when several searches run under one wall-clock
    budget (iterative deepening).
    """

    __slots__ = ("cfg", "stats", "deadline", "_tick", "failed")

    def __init__(self, cfg: SolveConfig, stats: SolveStats | None = None,
                 deadline: float | None = None):
        self.cfg = cfg
        self.stats = stats if stats is not None else SolveStats()
        if deadline is None and cfg.time_budget is not None:
            deadline = time.perf_counter() + cfg.time_budget
        self.deadline = deadline
        self._tick = 0
        # state -> largest budget known to admit no solution
        self.failed: dict = {}

    def enter(self, depth: int) -> None:
        st = self.stats
        st.nodes += 1
        if depth > st.max_depth:
            st.max_depth = depth
        if self.cfg.node_budget is not None and st.nodes > self.cfg.node_budget:
            raise BudgetExhausted("node budget exhausted", st)
        if self.deadline is not None:
            self._tick += 1
            if self._tick >= 64:
                self._tick = 0
                if time.perf_counter() > self.deadline:
                    raise BudgetExhausted("time budget exhausted", st)

    def known_failure(self, key, k: float) -> bool:
        return self.failed.get(key, float("-inf")) >= k

    def record_failure(self, key, k: float) -> None:
        if len(self.failed) >= FAILURE_TABLE_LIMIT:
            self.failed.clear()
        if self.failed.get(key, float("-inf")) < k:
            self.failed[key] = k
