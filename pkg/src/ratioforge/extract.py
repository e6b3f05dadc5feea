"""Rounding approximate minimum-norm points into discrete answers.

Sorted-prefix scans turn a point of (or near) B(f) into ratio solutions and
minimizers; the ratio-improvement driver and the contraction-based density
decomposition provide the exact combinatorial routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .setfn import (
    BasePoint,
    Orientation,
    SetFunctionOracle,
    base_tolerance,
    contract,
    duality_gap,
    prefix_values,
)


@dataclass(frozen=True)
class RatioSolution:
    """A nonempty subset with its ratio f(S)/|S|, in the oracle's index space."""

    subset: np.ndarray
    ratio: float
    f_value: float

    @property
    def size(self) -> int:
        return int(self.subset.size)


@dataclass
class Decomposition:
    """Ordered blocks (elements, level); blocks partition the ground set."""

    blocks: list[tuple[np.ndarray, float]]
    n: int

    def levels(self) -> list[float]:
        return [lvl for _, lvl in self.blocks]

    def induced_point(self) -> np.ndarray:
        """The vector carrying each block's level on its elements."""
        x = np.zeros(self.n)
        for ids, lvl in self.blocks:
            x[ids] = lvl
        return x

    def to_csv(self) -> str:
        lines = ["block_id,level,element"]
        for i, (ids, lvl) in enumerate(self.blocks):
            for v in ids:
                lines.append(f"{i},{format(lvl, '.12g')},{v}")
        return "\n".join(lines) + "\n"


def _vec(x) -> np.ndarray:
    return x.x if isinstance(x, BasePoint) else np.asarray(x, dtype=float)


def threshold_set(x, lam: float,
                  orientation: Orientation = Orientation.SUBMODULAR) -> np.ndarray:
    """Level set of the point at ``lam``.

    For a submodular function's exact minimum-norm point the set
    {v : x_v <= lam} minimizes f(S) - lam |S|; for a supermodular one the
    mirrored set {v : x_v >= lam} maximizes it.
    """
    vec = _vec(x)
    if orientation is Orientation.SUBMODULAR:
        return np.flatnonzero(vec <= lam)
    return np.flatnonzero(vec >= lam)


def _prefix_scan(oracle: SetFunctionOracle, x, descending: bool):
    vec = _vec(x)
    order = np.argsort(-vec if descending else vec, kind="stable")
    vals = prefix_values(oracle, order)
    sizes = np.arange(1, oracle.n + 1, dtype=float)
    return order, vals, vals / sizes


def best_prefix_sparse(oracle: SetFunctionOracle, x) -> RatioSolution:
    """Minimum-ratio prefix under the ascending sort of the point."""
    order, vals, ratios = _prefix_scan(oracle, x, descending=False)
    i = int(np.argmin(ratios))
    return RatioSolution(np.sort(order[:i + 1]), float(ratios[i]), float(vals[i]))


def best_prefix_dense(oracle: SetFunctionOracle, x) -> RatioSolution:
    """Maximum-ratio prefix under the descending sort of the point."""
    order, vals, ratios = _prefix_scan(oracle, x, descending=True)
    i = int(np.argmax(ratios))
    return RatioSolution(np.sort(order[:i + 1]), float(ratios[i]), float(vals[i]))


def sfm_extract(oracle: SetFunctionOracle, x) -> np.ndarray:
    """Minimizer candidate for a submodular oracle: best ascending prefix or the
    empty set.  With an exact minimum-norm point this contains the level set at
    zero and is an exact minimizer."""
    if oracle.orientation is not Orientation.SUBMODULAR:
        raise ValueError("sfm extraction requires a submodular oracle")
    order, vals, _ = _prefix_scan(oracle, x, descending=False)
    i = int(np.argmin(vals))
    if vals[i] >= 0.0:
        return np.array([], dtype=np.int64)
    return np.sort(order[:i + 1])


def dinkelbach(oracle: SetFunctionOracle,
               subsolver: Callable[[np.ndarray, float, int], np.ndarray],
               on_round: Callable[[int, float, int], None] | None = None,
               ) -> RatioSolution:
    """Ratio improvement for a supermodular oracle.

    ``subsolver(active, num, den)`` must return an exact maximizer of
    f(S) - (num/den)|S| over subsets of ``active`` (empty allowed).  Starting
    from the full set, the level num/den rises strictly until the subproblem
    value hits zero; at most n + 1 rounds ever occur.
    """
    if oracle.orientation is not Orientation.SUPERMODULAR:
        raise ValueError("ratio improvement runs on supermodular oracles")
    n = oracle.n
    active = np.arange(n, dtype=np.int64)
    f_cur = oracle.value(active)
    lam = f_cur / n
    tol = base_tolerance(f_cur)
    rounds = 0
    while True:
        rounds += 1
        if rounds > n + 1:
            raise RuntimeError("ratio improvement exceeded its n+1 round bound")
        best = np.asarray(subsolver(active, f_cur, active.size), dtype=np.int64)
        gain = (oracle.value(best) - lam * best.size) if best.size else 0.0
        if on_round is not None:
            on_round(rounds, lam, active.size)
        if best.size == 0 or gain <= tol:
            return RatioSolution(active, lam, f_cur)
        if not np.all(np.isin(best, active)):
            raise RuntimeError("subproblem returned elements outside the instance")
        active = np.sort(best)
        f_cur = oracle.value(active)
        new_lam = f_cur / active.size
        if new_lam <= lam:
            raise RuntimeError("ratio failed to increase; subproblem is not exact")
        lam = new_lam


def dense_decomposition(oracle: SetFunctionOracle,
                        ratio_solver: Callable[[SetFunctionOracle], RatioSolution],
                        merge_tol: float = 1e-7) -> Decomposition:
    """Peel off densest blocks of a supermodular oracle by contraction.

    The induced vector (each block at its level) is the exact minimum-norm
    point of B(f).  Levels within ``merge_tol`` relative are merged so the
    reported levels are strictly decreasing.
    """
    if oracle.orientation is not Orientation.SUPERMODULAR:
        raise ValueError("dense decomposition runs on supermodular oracles")
    blocks: list[tuple[np.ndarray, float]] = []
    current = oracle
    total = oracle.n
    while True:
        sol = ratio_solver(current)
        ids = np.sort(np.asarray(current.ids[sol.subset], dtype=np.int64))
        blocks.append((ids, sol.ratio))
        covered = sum(b.size for b, _ in blocks)
        if covered == total:
            break
        current = contract(current, sol.subset)
    merged: list[tuple[np.ndarray, float]] = []
    for ids, lvl in blocks:
        if merged and abs(merged[-1][1] - lvl) < merge_tol * (1.0 + abs(lvl)):
            prev_ids, prev_lvl = merged.pop()
            merged.append((np.sort(np.concatenate([prev_ids, ids])), prev_lvl))
        else:
            merged.append((ids, lvl))
    for (_, a), (_, b) in zip(merged, merged[1:]):
        if not a > b:
            raise RuntimeError("decomposition levels must strictly decrease")
    return Decomposition(merged, total)


@dataclass
class MembershipDecision:
    answer: str                       # "YES" | "NO" | "UNDECIDED"
    witness: np.ndarray | None = None
    violation: float = 0.0
    gap: float = float("nan")
    detect_iter: int | None = None
    trace: object | None = None

    def __str__(self):
        if self.answer == "NO":
            return f"NO (violation {self.violation:.6g} at {self.witness.tolist()})"
        if self.answer == "YES":
            return "YES"
        return f"UNDECIDED at gap {self.gap:.6g}"


def membership_decide(oracle: SetFunctionOracle, solver, cfg,
                      exact_limit: int = 20) -> MembershipDecision:
    """Decide whether the residual oracle h(S) = f(S) - y(S) stays nonpositive.

    Any set with positive value is a NO witness.  YES is only declared under
    an exact certificate: a zero-gap minimum-norm point whose densest prefix
    is nonpositive, or exhaustive search at small n.
    """
    from .universal import dense_objective

    point, trace = solver(oracle, cfg, objective=dense_objective())
    tol = base_tolerance(oracle.value(np.arange(oracle.n)))
    detect = None
    for row in trace.rows:
        if row.best_obj is not None and row.best_obj > tol:
            detect = row.iteration
            break
    if trace.best_set is not None and trace.best_set.size:
        val = oracle.value(trace.best_set)
        if val > tol:
            return MembershipDecision("NO", np.sort(trace.best_set), float(val),
                                      trace.last_gap(), detect, trace)
    gap = duality_gap(oracle, point)
    dense = best_prefix_dense(oracle, point)
    if dense.f_value > tol:
        return MembershipDecision("NO", dense.subset, float(dense.f_value),
                                  gap, detect, trace)
    if gap <= tol and dense.ratio <= tol:
        return MembershipDecision("YES", gap=gap, trace=trace)
    if oracle.n <= exact_limit:
        table = oracle.value_table(exact_limit)
        mask = int(np.argmax(table))
        if table[mask] > tol:
            ids = np.flatnonzero([(mask >> b) & 1 for b in range(oracle.n)])
            return MembershipDecision("NO", ids, float(table[mask]), gap,
                                      detect, trace)
        return MembershipDecision("YES", gap=gap, trace=trace)
    return MembershipDecision("UNDECIDED", gap=gap, trace=trace)
