"""Graph containers and the concrete problem oracles.

Six oracles are provided: induced edge weight (densest subgraph), p-th power
degree sums, bipartite coverage weight (heavy nodes in a small neighborhood),
anchored edge weight with degree penalties, s-t cut increments, and base
polytope membership residuals.  All are normalized; orientation tags are
verified exhaustively in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .setfn import (
    GroundSet,
    Orientation,
    PeelState,
    SetFunctionOracle,
)


class ParseError(ValueError):
    """Malformed input file; carries path, line and column of the offense."""

    def __init__(self, path, line: int, message: str, col: int | None = None):
        self.path = str(path)
        self.line = line
        self.col = col
        where = f"{self.path}:{line}"
        if col is not None:
            where += f":{col}"
        super().__init__(f"{where}: {message}")


def fmt_num(x: float) -> str:
    """Canonical number rendering: integers bare, reals at 12 significant digits."""
    if float(x) == int(x) and abs(x) < 1e15:
        return str(int(x))
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


class UndirectedGraph:
    """Compressed symmetric adjacency with optional edge weights (default 1)."""

    def __init__(self, n: int, edges_u, edges_v, weights=None):
        self.n = int(n)
        self.eu = np.asarray(edges_u, dtype=np.int64)
        self.ev = np.asarray(edges_v, dtype=np.int64)
        self.m = self.eu.size
        if weights is None:
            self.ew = np.ones(self.m)
        else:
            self.ew = np.asarray(weights, dtype=float)
        if self.ev.size != self.m or self.ew.size != self.m:
            raise ValueError("edge arrays must have equal length")
        if self.m and (self.eu.min() < 0 or max(self.eu.max(), self.ev.max()) >= self.n):
            raise ValueError("edge endpoint out of range")
        if np.any(self.eu == self.ev):
            raise ValueError("self-loops are not allowed")
        if np.any(self.ew < 0):
            raise ValueError("edge weights must be non-negative")
        self._build_csr()

    def _build_csr(self):
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.eu, 1)
        np.add.at(deg, self.ev, 1)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.indptr[1:])
        self.nbr = np.zeros(2 * self.m, dtype=np.int64)
        self.nbw = np.zeros(2 * self.m)
        cursor = self.indptr[:-1].copy()
        for u, v, w in zip(self.eu, self.ev, self.ew):
            self.nbr[cursor[u]] = v
            self.nbw[cursor[u]] = w
            cursor[u] += 1
            self.nbr[cursor[v]] = u
            self.nbw[cursor[v]] = w
            cursor[v] += 1
        self.degw = np.zeros(self.n)
        np.add.at(self.degw, self.eu, self.ew)
        np.add.at(self.degw, self.ev, self.ew)

    @property
    def weighted(self) -> bool:
        return bool(np.any(self.ew != 1.0))

    def neighbors(self, v: int):
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.nbr[lo:hi], self.nbw[lo:hi]

    def induced(self, keep: np.ndarray) -> "UndirectedGraph":
        """Subgraph on ``keep`` (sorted original ids), relabeled densely."""
        keep = np.asarray(sorted(set(int(v) for v in keep)), dtype=np.int64)
        pos = -np.ones(self.n, dtype=np.int64)
        pos[keep] = np.arange(keep.size)
        sel = (pos[self.eu] >= 0) & (pos[self.ev] >= 0)
        return UndirectedGraph(keep.size, pos[self.eu[sel]], pos[self.ev[sel]],
                               self.ew[sel])

    def total_weight(self) -> float:
        return float(self.ew.sum())


class WeightedBipartiteGraph:
    """Left/right vertex sets, right-vertex weights, and both incidences."""

    def __init__(self, nl: int, nr: int, right_weights, edges_l, edges_r):
        self.nl = int(nl)
        self.nr = int(nr)
        self.w = np.asarray(right_weights, dtype=float)
        self.el = np.asarray(edges_l, dtype=np.int64)
        self.er = np.asarray(edges_r, dtype=np.int64)
        self.m = self.el.size
        if self.w.size != self.nr:
            raise ValueError("need one weight per right vertex")
        if np.any(self.w < 0):
            raise ValueError("right-vertex weights must be non-negative")
        if self.m and (self.el.min() < 0 or self.el.max() >= self.nl):
            raise ValueError("left endpoint out of range")
        if self.m and (self.er.min() < 0 or self.er.max() >= self.nr):
            raise ValueError("right endpoint out of range")
        rdeg = np.bincount(self.er, minlength=self.nr)
        if np.any(rdeg == 0):
            raise ValueError("every right vertex must have degree >= 1")
        order = np.argsort(self.er, kind="stable")
        self.r_indptr = np.zeros(self.nr + 1, dtype=np.int64)
        np.cumsum(rdeg, out=self.r_indptr[1:])
        self.r_nbr = self.el[order]
        ldeg = np.bincount(self.el, minlength=self.nl)
        order = np.argsort(self.el, kind="stable")
        self.l_indptr = np.zeros(self.nl + 1, dtype=np.int64)
        np.cumsum(ldeg, out=self.l_indptr[1:])
        self.l_nbr = self.er[order]

    def delta(self, r: int) -> np.ndarray:
        """Left neighborhood of right vertex r."""
        return self.r_nbr[self.r_indptr[r]:self.r_indptr[r + 1]]

    def incident(self, l: int) -> np.ndarray:
        """Right vertices touching left vertex l."""
        return self.l_nbr[self.l_indptr[l]:self.l_indptr[l + 1]]

    def restricted_to_left(self, keep: np.ndarray) -> "WeightedBipartiteGraph":
        """Sub-instance on kept left vertices; uncoverable right vertices drop out."""
        keep = np.asarray(sorted(set(int(v) for v in keep)), dtype=np.int64)
        pos = -np.ones(self.nl, dtype=np.int64)
        pos[keep] = np.arange(keep.size)
        kept_r = [r for r in range(self.nr) if np.all(pos[self.delta(r)] >= 0)]
        rpos = -np.ones(self.nr, dtype=np.int64)
        rpos[kept_r] = np.arange(len(kept_r))
        sel = rpos[self.er] >= 0
        return WeightedBipartiteGraph(keep.size, len(kept_r), self.w[kept_r],
                                      pos[self.el[sel]], rpos[self.er[sel]])

    def total_right_weight(self) -> float:
        return float(self.w.sum())


@dataclass
class FlowInstance:
    """Directed capacitated network; huge-but-finite capacities carry an inf flag."""

    n: int
    tail: np.ndarray
    head: np.ndarray
    cap: np.ndarray
    source: int
    sink: int
    inf_mask: np.ndarray | None = None

    def __post_init__(self):
        self.tail = np.asarray(self.tail, dtype=np.int64)
        self.head = np.asarray(self.head, dtype=np.int64)
        self.cap = np.asarray(self.cap, dtype=float)
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        if np.any(self.cap < 0):
            raise ValueError("capacities must be non-negative")
        if self.inf_mask is None:
            self.inf_mask = np.zeros(self.tail.size, dtype=bool)

    @property
    def m(self) -> int:
        return self.tail.size


@dataclass
class MembershipInstance:
    graph: UndirectedGraph
    y: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.size != self.graph.n:
            raise ValueError("query vector length must equal the vertex count")


@dataclass
class AnchorSet:
    mask: np.ndarray

    @classmethod
    def from_ids(cls, n: int, ids) -> "AnchorSet":
        mask = np.zeros(n, dtype=bool)
        for v in ids:
            mask[int(v)] = True
        return cls(mask)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts += (masks >> b) & 1
    return counts


class _GraphPeelBase(PeelState):
    def __init__(self, g: UndirectedGraph):
        self.g = g
        self.alive = np.ones(g.n, dtype=bool)
        self.deg = g.degw.copy()

    def _drop(self, v: int):
        self.alive[v] = False
        touched = []
        nbr, nbw = self.g.neighbors(v)
        for u, w in zip(nbr, nbw):
            if self.alive[u]:
                self.deg[u] -= w
                touched.append(int(u))
        return touched


class EdgeWeightOracle(SetFunctionOracle):
    """f(S) = total edge weight inside S; supermodular, monotone."""

    def __init__(self, g: UndirectedGraph):
        super().__init__(GroundSet(g.n), Orientation.SUPERMODULAR)
        self.g = g

    def _value(self, sel: np.ndarray) -> float:
        inside = np.zeros(self.g.n, dtype=bool)
        inside[sel] = True
        both = inside[self.g.eu] & inside[self.g.ev]
        return float(self.g.ew[both].sum())

    def peeler(self) -> PeelState:
        return _DegreePeel(self.g)

    def sweep_cost(self) -> int:
        return 2 * self.g.n + 4 * self.g.m

    def value_table(self, limit: int = 20) -> np.ndarray:
        n = self.g.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n)
        for u, v, w in zip(self.g.eu, self.g.ev, self.g.ew):
            out += w * (((masks >> int(u)) & (masks >> int(v))) & 1)
        return out


class _DegreePeel(_GraphPeelBase):
    def marginal(self, v: int) -> float:
        return float(self.deg[v])

    def remove(self, v: int):
        return self._drop(v)


class PowerDegreeOracle(SetFunctionOracle):
    """f(S) = sum_v deg_S(v)^p for p >= 1; supermodular."""

    def __init__(self, g: UndirectedGraph, p: float):
        if p < 1:
            raise ValueError("exponent p must be >= 1")
        super().__init__(GroundSet(g.n), Orientation.SUPERMODULAR)
        self.g = g
        self.p = float(p)

    def _value(self, sel: np.ndarray) -> float:
        inside = np.zeros(self.g.n, dtype=bool)
        inside[sel] = True
        deg = np.zeros(self.g.n)
        both = inside[self.g.eu] & inside[self.g.ev]
        np.add.at(deg, self.g.eu[both], self.g.ew[both])
        np.add.at(deg, self.g.ev[both], self.g.ew[both])
        return float(np.sum(deg[sel] ** self.p))

    def peeler(self) -> PeelState:
        return _PowerDegreePeel(self.g, self.p)

    def sweep_cost(self) -> int:
        return 2 * self.g.n + 8 * self.g.m

    def value_table(self, limit: int = 18) -> np.ndarray:
        n = self.g.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        deg = np.zeros((1 << n, n))
        for u, v, w in zip(self.g.eu, self.g.ev, self.g.ew):
            both = (((masks >> int(u)) & (masks >> int(v))) & 1).astype(float)
            deg[:, int(u)] += w * both
            deg[:, int(v)] += w * both
        return (deg ** self.p).sum(axis=1)


class _PowerDegreePeel(_GraphPeelBase):
    """Marginals recomputed lazily from cached degrees: O(deg) per read.

    Removing v perturbs the marginal of every vertex within two hops, so
    ``remove`` reports that whole neighborhood.
    """

    def __init__(self, g: UndirectedGraph, p: float):
        super().__init__(g)
        self.p = p

    def marginal(self, v: int) -> float:
        total = self.deg[v] ** self.p
        nbr, nbw = self.g.neighbors(v)
        for u, w in zip(nbr, nbw):
            if self.alive[u]:
                total += self.deg[u] ** self.p - (self.deg[u] - w) ** self.p
        return float(total)

    def remove(self, v: int):
        one_hop = self._drop(v)
        touched = set(one_hop)
        for u in one_hop:
            nbr, _ = self.g.neighbors(u)
            touched.update(int(x) for x in nbr if self.alive[x])
        return list(touched)


class CoverageWeightOracle(SetFunctionOracle):
    """f(S) = total weight of right vertices whose whole neighborhood is in S.

    Ground set is the left side; supermodular and monotone.
    """

    def __init__(self, b: WeightedBipartiteGraph):
        super().__init__(GroundSet(b.nl), Orientation.SUPERMODULAR)
        self.b = b

    def _value(self, sel: np.ndarray) -> float:
        inside = np.zeros(self.b.nl, dtype=bool)
        inside[sel] = True
        total = 0.0
        for r in range(self.b.nr):
            if np.all(inside[self.b.delta(r)]):
                total += self.b.w[r]
        return float(total)

    def peeler(self) -> PeelState:
        return _CoveragePeel(self.b)

    def sweep_cost(self) -> int:
        return 2 * self.b.nl + 4 * self.b.m

    def value_table(self, limit: int = 20) -> np.ndarray:
        n = self.b.nl
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n)
        for r in range(self.b.nr):
            need = 0
            for u in self.b.delta(r):
                need |= 1 << int(u)
            out += self.b.w[r] * ((masks & need) == need)
        return out


class _CoveragePeel(PeelState):
    def __init__(self, b: WeightedBipartiteGraph):
        self.b = b
        self.alive = np.ones(b.nl, dtype=bool)
        self.missing = np.zeros(b.nr, dtype=np.int64)
        # contribution of each still-covered right vertex to all its neighbors
        self.gain = np.zeros(b.nl)
        for r in range(b.nr):
            self.gain[b.delta(r)] += b.w[r]

    def marginal(self, u: int) -> float:
        return float(self.gain[u])

    def remove(self, u: int):
        self.alive[u] = False
        touched = set()
        for r in self.b.incident(u):
            if self.missing[r] == 0:
                for x in self.b.delta(r):
                    if self.alive[x]:
                        self.gain[x] -= self.b.w[r]
                        touched.add(int(x))
            self.missing[r] += 1
        return list(touched)


class AnchoredEdgeOracle(SetFunctionOracle):
    """f(S) = 2 * E(S) - sum of global degrees of unanchored members.

    Supermodular, possibly negative and non-monotone.
    """

    def __init__(self, g: UndirectedGraph, anchor: AnchorSet):
        super().__init__(GroundSet(g.n), Orientation.SUPERMODULAR)
        self.g = g
        self.anchor = anchor
        self.penalty = np.where(anchor.mask, 0.0, g.degw)

    def _value(self, sel: np.ndarray) -> float:
        inside = np.zeros(self.g.n, dtype=bool)
        inside[sel] = True
        both = inside[self.g.eu] & inside[self.g.ev]
        return float(2.0 * self.g.ew[both].sum() - self.penalty[sel].sum())

    def peeler(self) -> PeelState:
        return _AnchoredPeel(self.g, self.penalty)

    def sweep_cost(self) -> int:
        return 2 * self.g.n + 4 * self.g.m

    def value_table(self, limit: int = 20) -> np.ndarray:
        n = self.g.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n)
        for u, v, w in zip(self.g.eu, self.g.ev, self.g.ew):
            out += 2.0 * w * (((masks >> int(u)) & (masks >> int(v))) & 1)
        for v in range(n):
            out -= self.penalty[v] * ((masks >> v) & 1)
        return out


class _AnchoredPeel(_GraphPeelBase):
    def __init__(self, g: UndirectedGraph, penalty: np.ndarray):
        super().__init__(g)
        self.penalty = penalty

    def marginal(self, v: int) -> float:
        return float(2.0 * self.deg[v] - self.penalty[v])

    def remove(self, v: int):
        return self._drop(v)


class CutIncrementOracle(SetFunctionOracle):
    """g(S) = cut(S + source) - cut(source) over vertices other than s and t.

    Submodular and normalized; minimizing g recovers the minimum s-t cut
    shifted by the source's cut weight.
    """

    def __init__(self, g: UndirectedGraph, s: int, t: int):
        if s == t:
            raise ValueError("source and sink must differ")
        if g.n < 3:
            raise ValueError("need at least one vertex besides source and sink")
        self.verts = np.array([v for v in range(g.n) if v not in (s, t)],
                              dtype=np.int64)
        super().__init__(GroundSet(self.verts.size), Orientation.SUBMODULAR)
        self.g = g
        self.s = s
        self.t = t
        self.delta_s = self._cut_weight(np.array([], dtype=np.int64))

    def _cut_weight(self, sel: np.ndarray) -> float:
        side = np.zeros(self.g.n, dtype=bool)
        side[self.s] = True
        side[self.verts[sel]] = True
        crossing = side[self.g.eu] != side[self.g.ev]
        return float(self.g.ew[crossing].sum())

    def _value(self, sel: np.ndarray) -> float:
        return self._cut_weight(sel) - self.delta_s

    def cut_value(self, sel: np.ndarray) -> float:
        """Actual cut weight of {s} plus the selected ground vertices."""
        return self._cut_weight(np.asarray(sel, dtype=np.int64))

    def peeler(self) -> PeelState:
        return _CutPeel(self)

    def sweep_cost(self) -> int:
        return 2 * self.n + 4 * self.g.m

    def value_table(self, limit: int = 20) -> np.ndarray:
        n = self.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        pos = -np.ones(self.g.n, dtype=np.int64)
        pos[self.verts] = np.arange(n)
        out = np.zeros(1 << n)
        for u, v, w in zip(self.g.eu, self.g.ev, self.g.ew):
            su = np.ones(1 << n, dtype=np.int64) if u == self.s else (
                np.zeros(1 << n, dtype=np.int64) if u == self.t
                else (masks >> int(pos[u])) & 1)
            sv = np.ones(1 << n, dtype=np.int64) if v == self.s else (
                np.zeros(1 << n, dtype=np.int64) if v == self.t
                else (masks >> int(pos[v])) & 1)
            out += w * (su ^ sv)
        return out - self.delta_s


class _CutPeel(PeelState):
    def __init__(self, oracle: CutIncrementOracle):
        g = oracle.g
        self.oracle = oracle
        self.alive = np.ones(oracle.n, dtype=bool)
        self.pos = -np.ones(g.n, dtype=np.int64)
        self.pos[oracle.verts] = np.arange(oracle.n)
        # din: weighted degree into current source side; dout: into sink side
        self.din = np.zeros(oracle.n)
        self.dout = np.zeros(oracle.n)
        for u, v, w in zip(g.eu, g.ev, g.ew):
            for a, b in ((u, v), (v, u)):
                ia = self.pos[a]
                if ia < 0:
                    continue
                if b == oracle.t:
                    self.dout[ia] += w
                else:
                    self.din[ia] += w

    def marginal(self, v: int) -> float:
        return float(self.dout[v] - self.din[v])

    def remove(self, v: int):
        self.alive[v] = False
        touched = []
        g = self.oracle.g
        orig = int(self.oracle.verts[v])
        nbr, nbw = g.neighbors(orig)
        for u, w in zip(nbr, nbw):
            iu = self.pos[u]
            if iu >= 0 and self.alive[iu]:
                self.din[iu] -= w
                self.dout[iu] += w
                touched.append(int(iu))
        return touched


class MembershipOracle(SetFunctionOracle):
    """h(S) = edge weight inside S minus y(S); positive values witness y outside B."""

    def __init__(self, mi: MembershipInstance):
        super().__init__(GroundSet(mi.graph.n), Orientation.SUPERMODULAR)
        self.g = mi.graph
        self.y = mi.y

    def _value(self, sel: np.ndarray) -> float:
        inside = np.zeros(self.g.n, dtype=bool)
        inside[sel] = True
        both = inside[self.g.eu] & inside[self.g.ev]
        return float(self.g.ew[both].sum() - self.y[sel].sum())

    def peeler(self) -> PeelState:
        return _MembershipPeel(self.g, self.y)

    def sweep_cost(self) -> int:
        return 2 * self.g.n + 4 * self.g.m

    def value_table(self, limit: int = 20) -> np.ndarray:
        n = self.g.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        masks = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n)
        for u, v, w in zip(self.g.eu, self.g.ev, self.g.ew):
            out += w * (((masks >> int(u)) & (masks >> int(v))) & 1)
        for v in range(n):
            out -= self.y[v] * ((masks >> v) & 1)
        return out


class _MembershipPeel(_GraphPeelBase):
    def __init__(self, g: UndirectedGraph, y: np.ndarray):
        super().__init__(g)
        self.y = y

    def marginal(self, v: int) -> float:
        return float(self.deg[v] - self.y[v])

    def remove(self, v: int):
        return self._drop(v)


def dsg_oracle(g: UndirectedGraph) -> EdgeWeightOracle:
    return EdgeWeightOracle(g)


def pmean_oracle(g: UndirectedGraph, p: float) -> PowerDegreeOracle:
    return PowerDegreeOracle(g, p)


def hnsn_oracle(b: WeightedBipartiteGraph) -> CoverageWeightOracle:
    return CoverageWeightOracle(b)


def anchored_oracle(g: UndirectedGraph, anchor: AnchorSet) -> AnchoredEdgeOracle:
    return AnchoredEdgeOracle(g, anchor)


def mincut_oracle(g: UndirectedGraph, s: int, t: int) -> CutIncrementOracle:
    return CutIncrementOracle(g, s, t)


def membership_oracle(mi: MembershipInstance) -> MembershipOracle:
    return MembershipOracle(mi)


def perturb_membership(g: UndirectedGraph, eps: float) -> MembershipInstance:
    """NO-instance builder: a feasible base vector nudged off the polytope.

    Vertices of the exact densest subgraph receive its density; every other
    edge charges its weight to endpoints outside that subgraph (split evenly
    when both are outside).  Shifting ``eps`` from an inside vertex to an
    outside one then violates the subgraph's constraint by exactly eps.
    """
    if eps <= 0:
        raise ValueError("perturbation must be positive")
    from .flow import flow_dsg_solver

    best = flow_dsg_solver(g)
    star = np.asarray(sorted(best.subset), dtype=np.int64)
    if star.size == g.n:
        # density ties can hide a proper densest set; any such set avoids
        # some vertex, so scan the single-vertex-removed sub-instances
        star = None
        for v in range(g.n):
            keep = np.array([u for u in range(g.n) if u != v], dtype=np.int64)
            sub = g.induced(keep)
            if sub.m == 0:
                continue
            cand = flow_dsg_solver(sub)
            if abs(cand.ratio - best.ratio) <= 1e-12 * (1.0 + abs(best.ratio)):
                star = keep[np.asarray(sorted(cand.subset), dtype=np.int64)]
                break
        if star is None:
            raise ValueError("densest subgraph covers every vertex; "
                             "perturbation needs an outside vertex")
    inside = np.zeros(g.n, dtype=bool)
    inside[star] = True
    b = np.zeros(g.n)
    b[star] = best.ratio
    for u, v, w in zip(g.eu, g.ev, g.ew):
        if inside[u] and inside[v]:
            continue
        if not inside[u] and not inside[v]:
            b[u] += 0.5 * w
            b[v] += 0.5 * w
        elif inside[u]:
            b[v] += w
        else:
            b[u] += w
    u0 = int(star[0])
    w0 = int(np.flatnonzero(~inside)[0])
    b[u0] -= eps
    b[w0] += eps
    return MembershipInstance(g, b)


# ---------------------------------------------------------------------------
# Line-oriented input formats ('#' starts a comment)
# ---------------------------------------------------------------------------


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield lineno, text.split()


def _parse_int(tok: str, path, lineno: int, col: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(path, lineno, f"expected integer {what}, got {tok!r}", col)


def _parse_float(tok: str, path, lineno: int, col: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(path, lineno, f"expected number {what}, got {tok!r}", col)


def load_edge_list(path) -> UndirectedGraph:
    """Undirected edge list: "n m" header, then m lines "u v [w]" (0-based)."""
    rows = _data_lines(path)
    try:
        lineno, toks = next(rows)
    except StopIteration:
        raise ParseError(path, 1, "empty file; expected 'n m' header")
    if len(toks) != 2:
        raise ParseError(path, lineno, "header must be 'n m'", 1)
    n = _parse_int(toks[0], path, lineno, 1, "vertex count")
    m = _parse_int(toks[1], path, lineno, 2, "edge count")
    eu, ev, ew = [], [], []
    for lineno, toks in rows:
        if len(toks) not in (2, 3):
            raise ParseError(path, lineno, "edge lines are 'u v' or 'u v w'", 1)
        u = _parse_int(toks[0], path, lineno, 1, "endpoint")
        v = _parse_int(toks[1], path, lineno, 2, "endpoint")
        w = _parse_float(toks[2], path, lineno, 3, "weight") if len(toks) == 3 else 1.0
        if not 0 <= u < n or not 0 <= v < n:
            raise ParseError(path, lineno, f"endpoint out of range 0..{n - 1}", 1)
        if u == v:
            raise ParseError(path, lineno, "self-loops are not allowed", 1)
        if w < 0:
            raise ParseError(path, lineno, "negative edge weight", 3)
        eu.append(u)
        ev.append(v)
        ew.append(w)
    if len(eu) != m:
        raise ParseError(path, lineno if eu else 1,
                         f"header promised {m} edges, found {len(eu)}")
    return UndirectedGraph(n, eu, ev, ew)


def dump_edge_list(g: UndirectedGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    for u, v, w in zip(g.eu, g.ev, g.ew):
        if w == 1.0:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {fmt_num(w)}")
    return "\n".join(lines) + "\n"


def load_bipartite(path) -> WeightedBipartiteGraph:
    """Bipartite: "|L| |R| m" header, |R| lines "v w(v)", m lines "u v"."""
    rows = _data_lines(path)
    try:
        lineno, toks = next(rows)
    except StopIteration:
        raise ParseError(path, 1, "empty file; expected '|L| |R| m' header")
    if len(toks) != 3:
        raise ParseError(path, lineno, "header must be '|L| |R| m'", 1)
    nl = _parse_int(toks[0], path, lineno, 1, "left count")
    nr = _parse_int(toks[1], path, lineno, 2, "right count")
    m = _parse_int(toks[2], path, lineno, 3, "edge count")
    weights = np.zeros(nr)
    seen = np.zeros(nr, dtype=bool)
    for _ in range(nr):
        try:
            lineno, toks = next(rows)
        except StopIteration:
            raise ParseError(path, lineno, "missing right-vertex weight lines")
        if len(toks) != 2:
            raise ParseError(path, lineno, "weight lines are 'v w(v)'", 1)
        v = _parse_int(toks[0], path, lineno, 1, "right vertex")
        w = _parse_float(toks[1], path, lineno, 2, "weight")
        if not 0 <= v < nr:
            raise ParseError(path, lineno, f"right vertex out of range 0..{nr - 1}", 1)
        if w < 0:
            raise ParseError(path, lineno, "negative weight", 2)
        weights[v] = w
        seen[v] = True
    if not np.all(seen):
        missing = int(np.flatnonzero(~seen)[0])
        raise ParseError(path, lineno, f"no weight given for right vertex {missing}")
    el, er = [], []
    for lineno, toks in rows:
        if len(toks) != 2:
            raise ParseError(path, lineno, "edge lines are 'u v'", 1)
        u = _parse_int(toks[0], path, lineno, 1, "left endpoint")
        v = _parse_int(toks[1], path, lineno, 2, "right endpoint")
        if not 0 <= u < nl:
            raise ParseError(path, lineno, f"left endpoint out of range 0..{nl - 1}", 1)
        if not 0 <= v < nr:
            raise ParseError(path, lineno, f"right endpoint out of range 0..{nr - 1}", 2)
        el.append(u)
        er.append(v)
    if len(el) != m:
        raise ParseError(path, lineno, f"header promised {m} edges, found {len(el)}")
    try:
        return WeightedBipartiteGraph(nl, nr, weights, el, er)
    except ValueError as exc:
        raise ParseError(path, lineno, str(exc))


def dump_bipartite(b: WeightedBipartiteGraph) -> str:
    lines = [f"{b.nl} {b.nr} {b.m}"]
    for v in range(b.nr):
        lines.append(f"{v} {fmt_num(b.w[v])}")
    for u, v in zip(b.el, b.er):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def load_vector(path, n: int) -> np.ndarray:
    """n reals, one per line."""
    vals = []
    last = 1
    for lineno, toks in _data_lines(path):
        last = lineno
        if len(toks) != 1:
            raise ParseError(path, lineno, "vector lines hold a single number", 1)
        vals.append(_parse_float(toks[0], path, lineno, 1, "entry"))
    if len(vals) != n:
        raise ParseError(path, last, f"expected {n} entries, found {len(vals)}")
    return np.asarray(vals)


def load_ids(path) -> list[int]:
    """Vertex ids, one per line (anchor files)."""
    ids = []
    for lineno, toks in _data_lines(path):
        if len(toks) != 1:
            raise ParseError(path, lineno, "id lines hold a single integer", 1)
        ids.append(_parse_int(toks[0], path, lineno, 1, "vertex id"))
    return ids
