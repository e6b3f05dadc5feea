"""Max-flow engines and the exact flow-backed ratio solvers.

The push-relabel engine (highest-label selection, gap heuristic, periodic
global relabeling) is the production kernel; shortest-augmenting-path search
is kept as the reference and ground-truth baseline.  Parametric cut networks
reduce the ratio subproblems to single min-cut calls, driven to the exact
optimum by the ratio-improvement loop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .extract import RatioSolution, dinkelbach
from .problems import (
    FlowInstance,
    ParseError,
    UndirectedGraph,
    WeightedBipartiteGraph,
    dsg_oracle,
    fmt_num,
    hnsn_oracle,
)
from .universal import ConvergenceTrace, TraceRow, VirtualClock


@dataclass
class CutResult:
    value: float
    source_side: np.ndarray          # node ids on the s side, s included
    arc_flow: np.ndarray | None = None


class _Residual:
    """Paired-arc residual graph: arc 2i is input arc i, arc 2i+1 its mate."""

    def __init__(self, fi: FlowInstance):
        self.n = fi.n
        m = fi.m
        self.to = np.empty(2 * m, dtype=np.int64)
        self.cap = np.zeros(2 * m)
        self.to[0::2] = fi.head
        self.to[1::2] = fi.tail
        self.cap[0::2] = fi.cap
        deg = np.zeros(fi.n, dtype=np.int64)
        np.add.at(deg, fi.tail, 1)
        np.add.at(deg, fi.head, 1)
        self.indptr = np.zeros(fi.n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.indptr[1:])
        self.arcs = np.zeros(2 * m, dtype=np.int64)
        cursor = self.indptr[:-1].copy()
        for i in range(m):
            u, v = fi.tail[i], fi.head[i]
            self.arcs[cursor[u]] = 2 * i
            cursor[u] += 1
            self.arcs[cursor[v]] = 2 * i + 1
            cursor[v] += 1
        self.cap0 = self.cap.copy()

    def out_arcs(self, v: int) -> np.ndarray:
        return self.arcs[self.indptr[v]:self.indptr[v + 1]]

    def source_reachable(self, s: int) -> np.ndarray:
        seen = np.zeros(self.n, dtype=bool)
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.out_arcs(u):
                if self.cap[a] > 0 and not seen[self.to[a]]:
                    seen[self.to[a]] = True
                    queue.append(int(self.to[a]))
        return seen

    def input_flows(self) -> np.ndarray:
        return self.cap0[0::2] - self.cap[0::2]


def _finish(fi: FlowInstance, res: _Residual, value: float) -> CutResult:
    seen = res.source_reachable(fi.source)
    if seen[fi.sink]:
        raise RuntimeError("sink still reachable after max flow")
    crossing = seen[fi.tail] & ~seen[fi.head]
    cut_cap = float(fi.cap[crossing].sum())
    if abs(cut_cap - value) > 1e-9 * (1.0 + abs(value)):
        raise RuntimeError(
            f"max-flow/min-cut mismatch: flow {value} vs cut {cut_cap}")
    return CutResult(value, np.flatnonzero(seen), res.input_flows())


def edmonds_karp(fi: FlowInstance) -> CutResult:
    """Shortest augmenting paths; exact and simple, the testing ground truth."""
    res = _Residual(fi)
    s, t = fi.source, fi.sink
    total = 0.0
    parent = np.empty(fi.n, dtype=np.int64)
    while True:
        parent.fill(-1)
        parent[s] = -2
        queue = deque([s])
        while queue and parent[t] == -1:
            u = queue.popleft()
            for a in res.out_arcs(u):
                v = int(res.to[a])
                if res.cap[a] > 0 and parent[v] == -1:
                    parent[v] = a
                    queue.append(v)
        if parent[t] == -1:
            break
        bottleneck = float("inf")
        v = t
        while v != s:
            a = parent[v]
            bottleneck = min(bottleneck, res.cap[a])
            v = int(res.to[a ^ 1])
        v = t
        while v != s:
            a = parent[v]
            res.cap[a] -= bottleneck
            res.cap[a ^ 1] += bottleneck
            v = int(res.to[a ^ 1])
        total += bottleneck
    return _finish(fi, res, total)


def push_relabel(fi: FlowInstance) -> CutResult:
    """Highest-label push-relabel with the gap heuristic and global relabeling."""
    res = _Residual(fi)
    n, s, t = fi.n, fi.source, fi.sink
    height = np.zeros(n, dtype=np.int64)
    excess = np.zeros(n)
    cur = np.zeros(n, dtype=np.int64)
    max_h = 2 * n + 1
    hcount = np.zeros(max_h + 2, dtype=np.int64)
    buckets: list[list[int]] = [[] for _ in range(max_h + 2)]
    queued = np.zeros(n, dtype=bool)
    highest = 0

    def set_height(v: int, h: int):
        nonlocal highest
        hcount[height[v]] -= 1
        height[v] = h
        hcount[h] += 1
        if excess[v] > 0 and v != s and v != t:
            _activate(v)

    def _activate(v: int):
        nonlocal highest
        if not queued[v] and v != s and v != t and excess[v] > 0:
            buckets[height[v]].append(v)
            queued[v] = True
            highest = max(highest, int(height[v]))

    def global_relabel():
        nonlocal highest
        dist = np.full(n, -1, dtype=np.int64)
        dist[t] = 0
        queue = deque([t])
        while queue:
            z = queue.popleft()
            for a in res.out_arcs(z):
                w = int(res.to[a])
                # residual arc w -> z exists iff the mate of a has capacity
                if res.cap[a ^ 1] > 0 and dist[w] == -1 and w != s:
                    dist[w] = dist[z] + 1
                    queue.append(w)
        dist_s = np.full(n, -1, dtype=np.int64)
        dist_s[s] = 0
        queue = deque([s])
        while queue:
            z = queue.popleft()
            for a in res.out_arcs(z):
                w = int(res.to[a])
                if res.cap[a ^ 1] > 0 and dist_s[w] == -1:
                    dist_s[w] = dist_s[z] + 1
                    queue.append(w)
        hcount[:] = 0
        for v in range(n):
            if v == s:
                height[v] = n
            elif dist[v] >= 0:
                height[v] = dist[v]
            elif dist_s[v] >= 0:
                height[v] = n + dist_s[v]
            else:
                height[v] = max_h
            hcount[height[v]] += 1
        cur[:] = 0
        for b in buckets:
            b.clear()
        queued[:] = False
        highest = 0
        for v in range(n):
            if v != s and v != t and excess[v] > 0:
                _activate(v)

    # saturate the source's out-arcs, then fix heights by a global relabel
    for a in res.out_arcs(s):
        if a % 2 == 0 or res.cap[a] > 0:
            delta = res.cap[a]
            if delta > 0:
                v = int(res.to[a])
                res.cap[a] -= delta
                res.cap[a ^ 1] += delta
                excess[v] += delta
                excess[s] -= delta
    global_relabel()
    relabels = 0

    while highest >= 0:
        while highest >= 0 and not buckets[highest]:
            highest -= 1
        if highest < 0:
            break
        u = buckets[highest].pop()
        queued[u] = False
        if excess[u] <= 0:
            continue
        arcs = res.out_arcs(u)
        while excess[u] > 0:
            if cur[u] >= arcs.size:
                # relabel u to one above its lowest residual neighbor
                old_h = int(height[u])
                new_h = max_h
                for a in arcs:
                    if res.cap[a] > 0:
                        new_h = min(new_h, int(height[res.to[a]]) + 1)
                set_height(u, new_h)
                cur[u] = 0
                relabels += 1
                if hcount[old_h] == 0 and old_h < n:
                    # gap: heights strictly between old_h and n are orphaned
                    for v in range(n):
                        if v != s and old_h < height[v] < n:
                            set_height(v, n + 1)
                if relabels % n == 0:
                    global_relabel()
                    break
                if new_h >= max_h:
                    break
                continue
            a = int(arcs[cur[u]])
            v = int(res.to[a])
            if res.cap[a] > 0 and height[u] == height[v] + 1:
                delta = min(excess[u], res.cap[a])
                res.cap[a] -= delta
                res.cap[a ^ 1] += delta
                excess[u] -= delta
                excess[v] += delta
                _activate(v)
            else:
                cur[u] += 1
        if excess[u] > 0 and height[u] < max_h:
            _activate(u)
    return _finish(fi, res, float(excess[t]))


def cut_capacity(fi: FlowInstance, source_side) -> float:
    """Capacity of the cut induced by a source-side node set."""
    side = np.zeros(fi.n, dtype=bool)
    side[np.asarray(source_side, dtype=np.int64)] = True
    crossing = side[fi.tail] & ~side[fi.head]
    return float(fi.cap[crossing].sum())


# ---------------------------------------------------------------------------
# Parametric cut networks
# ---------------------------------------------------------------------------


def dsg_cut_network(g: UndirectedGraph, lam: float, scale: float = 1.0) -> FlowInstance:
    """Source-to-degree / doubled-level-to-sink network: the source side minus
    the source maximizes (edge weight inside S) - lam |S|.

    ``scale`` multiplies every capacity; passing the denominator of a rational
    lam keeps all capacities integral and the cut comparisons exact.
    """
    if lam < 0:
        raise ValueError("level must be non-negative")
    s, t = g.n, g.n + 1
    tail, head, cap = [], [], []
    for v in range(g.n):
        tail.append(s)
        head.append(v)
        cap.append(scale * g.degw[v])
    for u, v, w in zip(g.eu, g.ev, g.ew):
        tail.extend([int(u), int(v)])
        head.extend([int(v), int(u)])
        cap.extend([scale * w, scale * w])
    for v in range(g.n):
        tail.append(v)
        head.append(t)
        cap.append(2.0 * lam * scale)
    return FlowInstance(g.n + 2, np.array(tail), np.array(head),
                        np.array(cap), s, t)


def hnsn_cut_network(b: WeightedBipartiteGraph, lam: float,
                     scale: float = 1.0) -> FlowInstance:
    """Coverage cut network: left vertices cut off from the source form the
    minimizer of lam |S| - (covered right weight).

    Left-to-right arcs carry a finite dominating capacity flagged as infinite;
    such arcs can never cross a minimum cut.
    """
    if lam < 0:
        raise ValueError("level must be non-negative")
    s = b.nl + b.nr
    t = s + 1
    inf_val = (b.w.sum() + lam * b.nl) * scale + 1.0
    tail, head, cap, inf_mask = [], [], [], []
    for u in range(b.nl):
        tail.append(s)
        head.append(u)
        cap.append(lam * scale)
        inf_mask.append(False)
    for u, r in zip(b.el, b.er):
        tail.append(int(u))
        head.append(b.nl + int(r))
        cap.append(inf_val)
        inf_mask.append(True)
    for r in range(b.nr):
        tail.append(b.nl + r)
        head.append(t)
        cap.append(b.w[r] * scale)
        inf_mask.append(False)
    return FlowInstance(b.nl + b.nr + 2, np.array(tail), np.array(head),
                        np.array(cap), s, t, np.array(inf_mask, dtype=bool))


# ---------------------------------------------------------------------------
# Exact ratio solvers
# ---------------------------------------------------------------------------


def flow_dsg_solver(g: UndirectedGraph, engine=None, trace: ConvergenceTrace | None = None,
                    clock=None) -> RatioSolution:
    """Exact densest-subgraph ratio by repeated min-cut on the surviving
    sub-instance; the level strictly improves each round."""
    engine = engine or push_relabel
    clock = clock or VirtualClock()
    oracle = dsg_oracle(g)

    def subsolver(active: np.ndarray, num: float, den: int) -> np.ndarray:
        sub = g.induced(active)
        if sub.m == 0:
            return np.array([], dtype=np.int64)
        net = dsg_cut_network(sub, num / den, scale=float(den))
        clock.add(4 * (net.n + net.m))
        cut = engine(net)
        local = cut.source_side[cut.source_side < sub.n]
        return np.asarray(active, dtype=np.int64)[local]

    def on_round(k: int, lam: float, size: int):
        if trace is not None:
            trace.append(TraceRow(k, clock.read(), lam, None, None, size))

    return dinkelbach(oracle, subsolver, on_round)


def flow_hnsn_solver(b: WeightedBipartiteGraph, engine=None,
                     trace: ConvergenceTrace | None = None,
                     clock=None) -> RatioSolution:
    """Exact coverage-ratio optimum over the left side via the coverage cut
    network inside the same ratio-improvement loop."""
    engine = engine or push_relabel
    clock = clock or VirtualClock()
    oracle = hnsn_oracle(b)

    def subsolver(active: np.ndarray, num: float, den: int) -> np.ndarray:
        sub = b.restricted_to_left(active)
        if sub.nr == 0:
            return np.array([], dtype=np.int64)
        net = hnsn_cut_network(sub, num / den, scale=float(den))
        clock.add(4 * (net.n + net.m))
        cut = engine(net)
        side = np.zeros(net.n, dtype=bool)
        side[cut.source_side] = True
        crossing_inf = net.inf_mask & side[net.tail] & ~side[net.head]
        if np.any(crossing_inf):
            raise RuntimeError("dominating-capacity arc crossed the cut")
        local = np.flatnonzero(~side[:sub.nl])
        return np.asarray(active, dtype=np.int64)[local]

    def on_round(k: int, lam: float, size: int):
        if trace is not None:
            trace.append(TraceRow(k, clock.read(), lam, None, None, size))

    return dinkelbach(oracle, subsolver, on_round)


# ---------------------------------------------------------------------------
# DIMACS max-flow interchange
# ---------------------------------------------------------------------------


def load_dimacs(path) -> FlowInstance:
    """DIMACS max-flow: "p max n m", "n <id> s", "n <id> t", "a u v cap"."""
    n = m = None
    source = sink = None
    tail, head, cap = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text or text.startswith("c"):
                continue
            toks = text.split()
            kind = toks[0]
            if kind == "p":
                if len(toks) != 4 or toks[1] != "max":
                    raise ParseError(path, lineno, "problem line must be 'p max n m'", 1)
                try:
                    n, m = int(toks[2]), int(toks[3])
                except ValueError:
                    raise ParseError(path, lineno, "bad counts on problem line", 3)
            elif kind == "n":
                if len(toks) != 3 or toks[2] not in ("s", "t"):
                    raise ParseError(path, lineno, "node line must be 'n <id> s|t'", 1)
                try:
                    ident = int(toks[1]) - 1
                except ValueError:
                    raise ParseError(path, lineno, "bad node id", 2)
                if toks[2] == "s":
                    source = ident
                else:
                    sink = ident
            elif kind == "a":
                if len(toks) != 4:
                    raise ParseError(path, lineno, "arc line must be 'a u v cap'", 1)
                try:
                    u, v = int(toks[1]) - 1, int(toks[2]) - 1
                except ValueError:
                    raise ParseError(path, lineno, "bad arc endpoint", 2)
                try:
                    c = float(toks[3])
                except ValueError:
                    raise ParseError(path, lineno, "bad arc capacity", 4)
                if n is None:
                    raise ParseError(path, lineno, "arc before problem line", 1)
                if not 0 <= u < n or not 0 <= v < n:
                    raise ParseError(path, lineno, f"arc endpoint out of range 1..{n}", 2)
                if c < 0:
                    raise ParseError(path, lineno, "negative capacity", 4)
                tail.append(u)
                head.append(v)
                cap.append(c)
            else:
                raise ParseError(path, lineno, f"unknown line type {kind!r}", 1)
    if n is None:
        raise ParseError(path, 1, "missing problem line")
    if source is None or sink is None:
        raise ParseError(path, 1, "missing source or sink node line")
    if len(tail) != m:
        raise ParseError(path, 1, f"problem line promised {m} arcs, found {len(tail)}")
    return FlowInstance(n, np.array(tail, dtype=np.int64),
                        np.array(head, dtype=np.int64), np.array(cap),
                        source, sink)


def dump_dimacs(fi: FlowInstance) -> str:
    lines = [f"p max {fi.n} {fi.m}",
             f"n {fi.source + 1} s",
             f"n {fi.sink + 1} t"]
    for u, v, c in zip(fi.tail, fi.head, fi.cap):
        lines.append(f"a {u + 1} {v + 1} {fmt_num(c)}")
    return "\n".join(lines) + "\n"


def flow_to_undirected(fi: FlowInstance) -> UndirectedGraph:
    """Undirected reading of a flow instance.

    Arcs of the same direction accumulate; an antiparallel pair is one
    undirected edge at the larger of the two capacities (they coincide on the
    symmetric benchmark instances this reading is meant for)."""
    forward: dict[tuple[int, int], float] = {}
    for u, v, c in zip(fi.tail, fi.head, fi.cap):
        key = (int(u), int(v))
        forward[key] = forward.get(key, 0.0) + float(c)
    acc: dict[tuple[int, int], float] = {}
    for (u, v), c in forward.items():
        key = (min(u, v), max(u, v))
        acc[key] = max(acc.get(key, 0.0), c)
    eu = [k[0] for k in acc]
    ev = [k[1] for k in acc]
    ew = [acc[k] for k in acc]
    return UndirectedGraph(fi.n, eu, ev, ew)


def undirected_to_flow(g: UndirectedGraph, s: int, t: int) -> FlowInstance:
    """Each undirected edge becomes a pair of antiparallel arcs of its weight."""
    tail = np.concatenate([g.eu, g.ev])
    head = np.concatenate([g.ev, g.eu])
    cap = np.concatenate([g.ew, g.ew])
    return FlowInstance(g.n, tail, head, cap, s, t)
