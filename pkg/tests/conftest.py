"""Shared instance factories and exhaustive-check helpers."""

import numpy as np
import pytest

from ratioforge.problems import UndirectedGraph, WeightedBipartiteGraph


def er_graph(n: int, p: float, seed: int) -> UndirectedGraph:
    """Erdos-Renyi graph; guaranteed at least one edge."""
    rng = np.random.default_rng(seed)
    eu, ev = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                eu.append(i)
                ev.append(j)
    if not eu:
        eu, ev = [0], [1 % n if n > 1 else 0]
        if n == 1:
            return UndirectedGraph(2, [0], [1])
    return UndirectedGraph(n, eu, ev)


def weighted_er_graph(n: int, p: float, seed: int) -> UndirectedGraph:
    rng = np.random.default_rng(seed)
    eu, ev, ew = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                eu.append(i)
                ev.append(j)
                ew.append(float(rng.integers(1, 5)) / 2.0)
    if not eu:
        eu, ev, ew = [0], [1], [1.0]
    return UndirectedGraph(n, eu, ev, ew)


def random_bipartite(nl: int, nr: int, p: float, seed: int,
                     weighted: bool = False) -> WeightedBipartiteGraph:
    """Random bipartite instance; every right vertex keeps degree >= 1."""
    rng = np.random.default_rng(seed)
    el, er = [], []
    for r in range(nr):
        nbrs = [u for u in range(nl) if rng.random() < p]
        if not nbrs:
            nbrs = [int(rng.integers(0, nl))]
        for u in nbrs:
            el.append(u)
            er.append(r)
    if weighted:
        w = rng.integers(1, 10, size=nr).astype(float)
    else:
        w = np.ones(nr)
    return WeightedBipartiteGraph(nl, nr, w, el, er)


def complete_graph(n: int) -> UndirectedGraph:
    eu, ev = zip(*[(i, j) for i in range(n) for j in range(i + 1, n)])
    return UndirectedGraph(n, list(eu), list(ev))


def two_cliques(a: int, b: int) -> UndirectedGraph:
    edges = [(i, j) for i in range(a) for j in range(i + 1, a)]
    edges += [(i, j) for i in range(a, a + b) for j in range(i + 1, a + b)]
    return UndirectedGraph(a + b, [e[0] for e in edges], [e[1] for e in edges])


def path_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, list(range(n - 1)), list(range(1, n)))


def triangle_pendant() -> UndirectedGraph:
    # triangle a-b-c plus pendant d hanging off c
    return UndirectedGraph(4, [0, 1, 2, 2], [1, 2, 0, 3])


def toy_bipartite() -> WeightedBipartiteGraph:
    # L = {0, 1}; right a (w=3, delta={0}) and b (w=1, delta={0,1})
    return WeightedBipartiteGraph(2, 2, [3.0, 1.0], [0, 0, 1], [0, 1, 1])


def diamond_graph():
    """s-a, s-b, a-t, b-t, a-b unit edges; returns (graph, s, t)."""
    g = UndirectedGraph(4, [0, 0, 1, 2, 1], [1, 2, 3, 3, 2])
    return g, 0, 3


def mask_ids(mask: int, n: int) -> np.ndarray:
    return np.flatnonzero([(mask >> b) & 1 for b in range(n)])


def subset_sums(x: np.ndarray) -> np.ndarray:
    """x(S) for every bitmask S."""
    n = x.size
    out = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        out[mask] = out[mask ^ low] + x[low.bit_length() - 1]
    return out


def check_orientation(table: np.ndarray, supermodular: bool) -> bool:
    """Exhaustive f(A)+f(B) vs f(A|B)+f(A&B) over every pair of subsets."""
    size = table.size
    masks = np.arange(size, dtype=np.int64)
    for a in range(size):
        union = table[np.bitwise_or(a, masks)]
        inter = table[np.bitwise_and(a, masks)]
        lhs = table[a] + table
        if supermodular:
            if np.any(lhs > union + inter + 1e-9):
                return False
        else:
            if np.any(lhs < union + inter - 1e-9):
                return False
    return True


def in_base_polytope(table: np.ndarray, x: np.ndarray, supermodular: bool,
                     tol: float = 1e-9) -> bool:
    """Exhaustive base-polytope membership against all 2^n constraints."""
    sums = subset_sums(x)
    full = table.size - 1
    if abs(sums[full] - table[full]) > tol * (1.0 + abs(table[full])):
        return False
    scale = tol * (1.0 + np.abs(table).max())
    if supermodular:
        return bool(np.all(sums >= table - scale))
    return bool(np.all(sums <= table + scale))


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)
