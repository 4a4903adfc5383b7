"""Compiled first-solution search for binary temporal instances.

Mirrors ``temporal._search`` rule for rule (same pick order, same branch
order, same failure table policy), so node counts agree with the reference
implementation.  State lives in flat arrays, every mutation is logged for
undo, and the recursion is an explicit frame stack.  The failure table is keyed by a pair of 64-bit Zobrist hashes of
(present leaves, constraint set).
"""

from __future__ import annotations

import time

import numba
import numpy as np
from numba import njit, types
from numba.typed import Dict

from .cps import EPS, PSI, ConstraintSet
from .search import FAILURE_TABLE_LIMIT, Budget, BudgetExhausted
from .tree import TreeSet

# ctl slots
LP, SP, NLEFT, CSIZE, P1SIZE, NODES, PICKS, MAXDEPTH, NODE_BUDGET, STATUS = range(10)
CTL_LEN = 10
# status codes
OK, ABORT_NODES, ABORT_TIME, LOG_FULL = 0, 1, 2, 3
# log record kinds
STRUCT, MATE, C_ADDED, C_REMOVED, LEAF = 0, 1, 2, 3, 4

_KEY = types.UniTuple(types.int64, 2)


@njit(cache=True)
def _push(log, ctl, a, b, c, d, e, f, g):
    lp = ctl[LP]
    if lp >= log.shape[0]:
        ctl[STATUS] = LOG_FULL
        return False
    log[lp, 0] = a
    log[lp, 1] = b
    log[lp, 2] = c
    log[lp, 3] = d
    log[lp, 4] = e
    log[lp, 5] = f
    log[lp, 6] = g
    ctl[LP] = lp + 1
    return True


@njit(cache=True)
def _assign(mate, paired, i, y, v):
    old = mate[i, y]
    mate[i, y] = v
    if (old < 0) != (v < 0):
        if v >= 0:
            paired[y] += 1
        else:
            paired[y] -= 1


@njit(cache=True)
def _set_mate(mate, paired, log, ctl, i, y, v):
    old = mate[i, y]
    if old != v:
        _push(log, ctl, MATE, i, y, old, 0, 0, 0)
        _assign(mate, paired, i, y, v)


@njit(cache=True)
def _c_apply(C, cout, cin, ctl, hh, zc, x, y, add):
    if add:
        C[x, y] = True
        cin[y] += 1
        if cout[x] == 0:
            ctl[P1SIZE] += 1
        cout[x] += 1
        ctl[CSIZE] += 1
    else:
        C[x, y] = False
        cin[y] -= 1
        cout[x] -= 1
        if cout[x] == 0:
            ctl[P1SIZE] -= 1
        ctl[CSIZE] -= 1
    hh[0] ^= zc[0, x, y]
    hh[1] ^= zc[1, x, y]


@njit(cache=True)
def _c_add(C, cout, cin, ctl, hh, zc, log, x, y):
    _push(log, ctl, C_ADDED, x, y, 0, 0, 0, 0)
    _c_apply(C, cout, cin, ctl, hh, zc, x, y, True)


@njit(cache=True)
def _c_del(C, cout, cin, ctl, hh, zc, log, x, y):
    _push(log, ctl, C_REMOVED, x, y, 0, 0, 0, 0)
    _c_apply(C, cout, cin, ctl, hh, zc, x, y, False)


@njit(cache=True)
def _remove_leaf(x, par, kids, roots, mate, paired, present, hh, zl, log, ctl, n):
    m = par.shape[0]
    for i in range(m):
        p = par[i, x]
        a = kids[i, p, 0]
        s = kids[i, p, 1] if a == x else a
        g = par[i, p]
        idx = -1
        u = -1
        if g < 0:
            roots[i] = s
        else:
            idx = 0 if kids[i, g, 0] == p else 1
            kids[i, g, idx] = s
            u = kids[i, g, 1 - idx]
        par[i, s] = g
        par[i, x] = -2
        _push(log, ctl, STRUCT, i, x, p, s, g, idx)
        _set_mate(mate, paired, log, ctl, i, x, -1)
        if s < n:
            _set_mate(mate, paired, log, ctl, i, s, u if 0 <= u < n else -1)
        if 0 <= u < n:
            _set_mate(mate, paired, log, ctl, i, u, s if s < n else -1)
    present[x] = False
    ctl[NLEFT] -= 1
    hh[0] ^= zl[0, x]
    hh[1] ^= zl[1, x]
    _push(log, ctl, LEAF, x, 0, 0, 0, 0, 0)


@njit(cache=True)
def _undo_to(mark, par, kids, roots, mate, paired, present, C, cout, cin, hh, zl, zc, log, ctl):
    while ctl[LP] > mark:
        lp = ctl[LP] - 1
        ctl[LP] = lp
        kind = log[lp, 0]
        if kind == STRUCT:
            i = log[lp, 1]
            x = log[lp, 2]
            p = log[lp, 3]
            s = log[lp, 4]
            g = log[lp, 5]
            idx = log[lp, 6]
            par[i, x] = p
            par[i, s] = p
            if idx < 0:
                roots[i] = p
            else:
                kids[i, g, idx] = p
        elif kind == MATE:
            _assign(mate, paired, log[lp, 1], log[lp, 2], log[lp, 3])
        elif kind == C_ADDED:
            _c_apply(C, cout, cin, ctl, hh, zc, log[lp, 1], log[lp, 2], False)
        elif kind == C_REMOVED:
            _c_apply(C, cout, cin, ctl, hh, zc, log[lp, 1], log[lp, 2], True)
        else:
            x = log[lp, 1]
            present[x] = True
            ctl[NLEFT] += 1
            hh[0] ^= zl[0, x]
            hh[1] ^= zl[1, x]


@njit(cache=True)
def _neighbors(mate, x, nb):
    """Distinct cherry partners of ``x`` over all trees into ``nb``; returns
    their count (partners are listed in ascending order)."""
    cnt = 0
    for i in range(mate.shape[0]):
        y = mate[i, x]
        if y < 0:
            continue
        seen = False
        for j in range(cnt):
            if nb[j] == y:
                seen = True
                break
        if not seen:
            nb[cnt] = y
            cnt += 1
    # insertion sort, cnt <= m
    for a in range(1, cnt):
        v = nb[a]
        b = a - 1
        while b >= 0 and nb[b] > v:
            nb[b + 1] = nb[b]
            b -= 1
        nb[b + 1] = v
    return cnt


@njit(cache=True)
def _p_measure(ctl):
    return PSI * ctl[CSIZE] + (1.0 - 2.0 * PSI) * ctl[P1SIZE]


@njit(cache=True)
def _pick(k, n, m, mate, paired, present, C, cout, cin, par, kids, roots, hh, zl, zc,
          log, ctl, seq, nb):
    """Remove leaves that are safe to take first.  Returns the remaining
    budget, or NaN when a constraint can no longer be satisfied."""
    while ctl[NLEFT] > 1:
        chosen = -1
        cnt = 0
        for x in range(n):
            if not present[x] or paired[x] != m:
                continue
            cnt = _neighbors(mate, x, nb)
            ok = cnt == 1
            if not ok:
                ok = True
                for j in range(cnt):
                    if not C[x, nb[j]]:
                        ok = False
                        break
            if ok:
                chosen = x
                break
        if chosen < 0:
            break
        x = chosen
        w = cnt - 1
        if cin[x] > 0 or (w == 0 and cout[x] > 0):
            return np.nan
        seq[ctl[SP]] = x
        ctl[SP] += 1
        ctl[PICKS] += 1
        k -= w
        _remove_leaf(x, par, kids, roots, mate, paired, present, hh, zl, log, ctl, n)
        if cout[x] > 0:
            for y in range(n):
                if C[x, y]:
                    _c_del(C, cout, cin, ctl, hh, zc, log, x, y)
    return k


@njit(cache=True)
def _choose_branch(n, mate, paired, present, C, cout, cin, nb, out):
    """Branch rule for the current state: writes ``(x, y)`` for the two-way
    rule or ``(x, a, b)`` for the three-way rule into ``out`` and returns
    the number of children (0 when no rule applies)."""
    for x in range(n):
        if cout[x] == 0 or paired[x] == 0:
            continue
        cnt = _neighbors(mate, x, nb)
        if cnt < 2:
            continue
        for j in range(cnt):
            y = nb[j]
            if not C[x, y] and not C[y, x]:
                out[0] = x
                out[1] = y
                return 2
    for x in range(n):
        if not present[x] or paired[x] == 0 or cin[x] > 0:
            continue
        cnt = _neighbors(mate, x, nb)
        if cnt < 2:
            continue
        a = -1
        for j in range(cnt):
            y = nb[j]
            if not C[x, y] and not C[y, x]:
                if a < 0:
                    a = y
                else:
                    out[0] = x
                    out[1] = a
                    out[2] = y
                    return 3
    return 0


# frame slots
F_MARK, F_SMARK, F_KEY0, F_KEY1, F_CMARK, F_NCHILD, F_NEXT, F_X, F_Y, F_Z = range(10)
FRAME_LEN = 10


@njit(cache=True)
def _solve(k0, par, kids, roots, mate, paired, present, C, cout, cin,
           hh, zl, zc, log, ctl, seq, memo, deadline, frames, fk):
    """Depth-first search with an explicit stack.

    Returns 1 when a sequence is found (left in ``seq``), 0 when none
    exists, -1 on abort (reason in ``ctl[STATUS]``).
    """
    n = present.shape[0]
    m = mate.shape[0]
    nb = np.empty(m, np.int64)
    out = np.empty(3, np.int64)
    d = 0
    k = k0
    entering = True
    while True:
        if entering:
            entering = False
            ctl[NODES] += 1
            if d > ctl[MAXDEPTH]:
                ctl[MAXDEPTH] = d
            if ctl[NODE_BUDGET] >= 0 and ctl[NODES] > ctl[NODE_BUDGET]:
                ctl[STATUS] = ABORT_NODES
                return -1
            if deadline > 0 and (ctl[NODES] & 1023) == 0:
                with numba.objmode(now="float64"):
                    now = time.perf_counter()
                if now > deadline:
                    ctl[STATUS] = ABORT_TIME
                    return -1
            if d >= frames.shape[0]:
                ctl[STATUS] = LOG_FULL
                return -1
            record = False
            quick_fail = k - _p_measure(ctl) < -EPS
            key0 = np.int64(hh[0])
            key1 = np.int64(hh[1])
            if not quick_fail:
                key = (key0, key1)
                quick_fail = key in memo and memo[key] >= k - EPS
            if not quick_fail:
                f = frames[d]
                f[F_MARK] = ctl[LP]
                f[F_SMARK] = ctl[SP]
                f[F_KEY0] = key0
                f[F_KEY1] = key1
                fk[d, 0] = k
                k2 = _pick(k, n, m, mate, paired, present, C, cout, cin, par, kids, roots,
                           hh, zl, zc, log, ctl, seq, nb)
                if ctl[STATUS] != OK:
                    return -1
                record = True
                if not np.isnan(k2):
                    if ctl[NLEFT] == 1:
                        # the last leaf closes the sequence; a negative budget
                        # means the forced picks already cost too much
                        if k2 >= -EPS:
                            for x in range(n):
                                if present[x]:
                                    seq[ctl[SP]] = x
                                    ctl[SP] += 1
                            return 1
                    else:
                        alive = True
                        for x in range(n):
                            if cout[x] > 0 and not present[x]:
                                alive = False
                                break
                        if alive and k2 - _p_measure(ctl) > EPS:
                            nchild = _choose_branch(n, mate, paired, present, C, cout, cin, nb, out)
                            if nchild > 0:
                                f[F_CMARK] = ctl[LP]
                                f[F_NCHILD] = nchild
                                f[F_NEXT] = 0
                                f[F_X] = out[0]
                                f[F_Y] = out[1]
                                f[F_Z] = out[2]
                                fk[d, 1] = k2
                                record = False
            if quick_fail or record:
                # this node failed: restore, remember, and return to the parent
                if record:
                    f = frames[d]
                    _undo_to(f[F_MARK], par, kids, roots, mate, paired, present, C, cout, cin,
                             hh, zl, zc, log, ctl)
                    ctl[SP] = f[F_SMARK]
                    if len(memo) >= FAILURE_TABLE_LIMIT:
                        memo.clear()
                    key = (f[F_KEY0], f[F_KEY1])
                    kf = fk[d, 0]
                    if key not in memo or memo[key] < kf:
                        memo[key] = kf
                if d == 0:
                    return 0
                d -= 1
        # advance the branching at depth d
        f = frames[d]
        _undo_to(f[F_CMARK], par, kids, roots, mate, paired, present, C, cout, cin,
                 hh, zl, zc, log, ctl)
        b = f[F_NEXT]
        if b == f[F_NCHILD]:
            _undo_to(f[F_MARK], par, kids, roots, mate, paired, present, C, cout, cin,
                     hh, zl, zc, log, ctl)
            ctl[SP] = f[F_SMARK]
            if len(memo) >= FAILURE_TABLE_LIMIT:
                memo.clear()
            key = (f[F_KEY0], f[F_KEY1])
            kf = fk[d, 0]
            if key not in memo or memo[key] < kf:
                memo[key] = kf
            if d == 0:
                return 0
            d -= 1
            continue
        f[F_NEXT] = b + 1
        x = f[F_X]
        y = f[F_Y]
        if f[F_NCHILD] == 2:
            if b == 0:
                _c_add(C, cout, cin, ctl, hh, zc, log, x, y)
            else:
                _c_add(C, cout, cin, ctl, hh, zc, log, y, x)
        else:
            z = f[F_Z]
            if b == 0:
                _c_add(C, cout, cin, ctl, hh, zc, log, y, x)
            elif b == 1:
                _c_add(C, cout, cin, ctl, hh, zc, log, z, x)
            else:
                _c_add(C, cout, cin, ctl, hh, zc, log, x, y)
                _c_add(C, cout, cin, ctl, hh, zc, log, x, z)
        if ctl[STATUS] != OK:
            return -1
        k = fk[d, 1]
        d += 1
        entering = True


def new_failure_table():
    return Dict.empty(key_type=_KEY, value_type=types.float64)


class KernelSearch:
    """Reusable compiled search over one tree set.

    The failure table persists across ``run`` calls, which is what iterative
    deepening wants; it is only valid for this tree set.
    """

    def __init__(self, ts: TreeSet, seed: int = 0x5EED):
        self.ts = ts
        rng = np.random.default_rng(seed)
        n = len(ts.labels)
        self.zl = rng.integers(0, 2**63, size=(2, n), dtype=np.uint64)
        self.zc = rng.integers(0, 2**63, size=(2, n, n), dtype=np.uint64)
        self.memo = new_failure_table()
        self._build(n * (4 * len(ts.trees) + 2) + 256)

    def _build(self, log_size: int) -> None:
        ts = self.ts
        n = len(ts.labels)
        m = len(ts.trees)
        v = max(len(t._parent) for t in ts.trees)
        self.n, self.m = n, m
        self.par = np.full((m, v), -2, np.int64)
        self.kids = np.full((m, v, 2), -1, np.int64)
        self.roots = np.zeros(m, np.int64)
        self.mate = np.full((m, n), -1, np.int64)
        self.paired = np.zeros(n, np.int64)
        self.present = np.zeros(n, np.bool_)
        for i, t in enumerate(ts.trees):
            self.par[i, :len(t._parent)] = t._parent
            for u, cs in enumerate(t._children):
                if len(cs) == 2:
                    self.kids[i, u] = cs
            self.roots[i] = t.root
            for x, ys in t.cherry_map().items():
                (y,) = ys
                self.mate[i, x] = y
                self.paired[x] += 1
        for x in ts.leaves:
            self.present[x] = True
        self.C = np.zeros((n, n), np.bool_)
        self.cout = np.zeros(n, np.int64)
        self.cin = np.zeros(n, np.int64)
        self.hh = np.zeros(2, np.uint64)
        for x in ts.leaves:
            self.hh ^= self.zl[:, x]
        self.ctl = np.zeros(CTL_LEN, np.int64)
        self.ctl[NLEFT] = len(ts.leaves)
        self.seq = np.zeros(n, np.int64)
        self.log = np.zeros((log_size, 7), np.int64)
        self.frames = np.zeros((log_size // 4, FRAME_LEN), np.int64)
        self.fk = np.zeros((log_size // 4, 2), np.float64)

    def _reset(self) -> None:
        _undo_to(0, self.par, self.kids, self.roots, self.mate, self.paired, self.present,
                 self.C, self.cout, self.cin, self.hh, self.zl, self.zc, self.log, self.ctl)
        self.ctl[SP] = 0
        self.ctl[STATUS] = OK

    def run(self, k: float, c: ConstraintSet, budget: Budget) -> tuple[int, ...] | None:
        """First sequence of weight at most ``k`` satisfying ``c``, or None.

        Node and time limits come from ``budget``; its statistics are
        updated and ``BudgetExhausted`` is raised when a limit is hit.
        """
        while True:
            self._reset()
            for x, y in sorted(c.pairs):
                _c_add(self.C, self.cout, self.cin, self.ctl, self.hh, self.zc, self.log, x, y)
            stats = budget.stats
            ctl = self.ctl
            ctl[NODES] = stats.nodes
            ctl[PICKS] = stats.picks
            ctl[MAXDEPTH] = stats.max_depth
            nb_limit = budget.cfg.node_budget
            ctl[NODE_BUDGET] = -1 if nb_limit is None else nb_limit
            deadline = -1.0 if budget.deadline is None else budget.deadline
            r = _solve(float(k), self.par, self.kids, self.roots, self.mate, self.paired,
                       self.present, self.C, self.cout, self.cin, self.hh, self.zl, self.zc,
                       self.log, ctl, self.seq, self.memo, deadline, self.frames, self.fk)
            stats.nodes = int(ctl[NODES])
            stats.picks = int(ctl[PICKS])
            stats.max_depth = int(ctl[MAXDEPTH])
            status = int(ctl[STATUS])
            if status == LOG_FULL:
                # the undo log or the frame stack overflowed, possibly after
                # unlogged mutations; start over with more room
                self._build(2 * self.log.shape[0])
                continue
            if status == ABORT_NODES:
                raise BudgetExhausted("node budget exhausted", stats)
            if status == ABORT_TIME:
                raise BudgetExhausted("time budget exhausted", stats)
            if r == 1:
                return tuple(int(x) for x in self.seq[:ctl[SP]])
            return None
