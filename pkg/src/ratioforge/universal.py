"""Universal solvers over any set-function oracle.

Three routes to the minimum norm point of B(f): iterative weighted peeling
with averaging, conditional-gradient steps over base vertices, and Wolfe's
active-set method with affine minimization.  All emit convergence traces and
return the evaluated iterate of smallest duality gap.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

import numpy as np

from .setfn import (
    BasePoint,
    Orientation,
    SetFunctionOracle,
    SolverConfig,
    base_tolerance,
    lmo_with_order,
    prefix_values,
)

# virtual seconds per oracle work unit; keeps default traces bit-reproducible
OP_SECONDS = 1e-7


class VirtualClock:
    """Deterministic clock driven by oracle work units."""

    def __init__(self):
        self.units = 0

    def add(self, units: int) -> None:
        self.units += int(units)

    def read(self) -> float:
        return self.units * OP_SECONDS


class WallClock:
    """Monotonic wall-clock timing; work notifications are ignored."""

    def __init__(self):
        self._t0 = time.perf_counter()

    def add(self, units: int) -> None:
        pass

    def read(self) -> float:
        return time.perf_counter() - self._t0


@dataclass
class TraceRow:
    iteration: int
    elapsed_s: float
    best_obj: float | None
    norm_sq: float | None
    gap: float | None
    set_size: int


def _csv_num(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


class ConvergenceTrace:
    """Per-iteration records plus the best extracted set seen so far."""

    HEADER = "iter,elapsed_s,best_obj,norm_sq,gap,set_size"

    def __init__(self):
        self.rows: list[TraceRow] = []
        self.best_set: np.ndarray | None = None

    def append(self, row: TraceRow) -> None:
        if self.rows:
            prev = self.rows[-1]
            if row.iteration <= prev.iteration:
                raise ValueError("trace iterations must strictly increase")
            if row.elapsed_s < prev.elapsed_s:
                raise ValueError("elapsed time must not decrease")
        self.rows.append(row)

    def last_gap(self) -> float:
        for row in reversed(self.rows):
            if row.gap is not None:
                return row.gap
        return float("nan")

    def to_csv(self) -> str:
        lines = [self.HEADER]
        for r in self.rows:
            lines.append(",".join([
                str(r.iteration),
                _csv_num(r.elapsed_s),
                _csv_num(r.best_obj),
                _csv_num(r.norm_sq),
                _csv_num(r.gap),
                str(r.set_size),
            ]))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


# ---------------------------------------------------------------------------
# Trace objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceObjective:
    """What the trace's best_obj column reports.

    dense/sparse track extremal prefix ratios, sfm the smallest prefix value
    (empty set allowed), norm the squared norm of the iterate itself.
    ``offset`` shifts reported values (e.g. turning a normalized cut increment
    back into an absolute cut weight) without affecting comparisons.
    """

    kind: str  # "dense" | "sparse" | "sfm" | "norm"
    offset: float = 0.0

    def better(self, a: float, b: float) -> bool:
        if b is None:
            return True
        return a > b if self.kind == "dense" else a < b

    def ascending_sort(self) -> bool:
        return self.kind in ("sparse", "sfm")


def dense_objective() -> TraceObjective:
    return TraceObjective("dense")


def sparse_objective() -> TraceObjective:
    return TraceObjective("sparse")


def sfm_objective(offset: float = 0.0) -> TraceObjective:
    return TraceObjective("sfm", offset)


def norm_objective() -> TraceObjective:
    return TraceObjective("norm")


def default_objective(oracle: SetFunctionOracle) -> TraceObjective:
    if oracle.orientation is Orientation.SUPERMODULAR:
        return dense_objective()
    return sparse_objective()


def _eval_prefix_candidates(obj: TraceObjective, build_order: np.ndarray,
                            prefix_vals: np.ndarray):
    """Best candidate among prefixes of a build order (plus the empty set for
    sfm).  Returns (value, set ids) in the objective's own sense."""
    sizes = np.arange(1, build_order.size + 1, dtype=float)
    if obj.kind == "dense":
        ratios = prefix_vals / sizes
        i = int(np.argmax(ratios))
        return float(ratios[i]) + obj.offset, build_order[:i + 1]
    if obj.kind == "sparse":
        ratios = prefix_vals / sizes
        i = int(np.argmin(ratios))
        return float(ratios[i]) + obj.offset, build_order[:i + 1]
    if obj.kind == "sfm":
        i = int(np.argmin(prefix_vals))
        if prefix_vals[i] >= 0.0:
            return obj.offset, build_order[:0]
        return float(prefix_vals[i]) + obj.offset, build_order[:i + 1]
    raise ValueError(f"no prefix candidates for objective {obj.kind!r}")


class _BestTracker:
    def __init__(self, obj: TraceObjective, trace: ConvergenceTrace):
        self.obj = obj
        self.trace = trace
        self.best: float | None = None

    def offer_prefixes(self, build_order: np.ndarray, prefix_vals: np.ndarray):
        if self.obj.kind == "norm":
            return
        val, ids = _eval_prefix_candidates(self.obj, build_order, prefix_vals)
        if self.best is None or self.obj.better(val, self.best):
            self.best = val
            self.trace.best_set = np.sort(np.asarray(ids, dtype=np.int64))

    def offer_norm(self, norm_sq: float, n: int):
        if self.obj.kind != "norm":
            return
        if self.best is None or norm_sq < self.best:
            self.best = norm_sq
            self.trace.best_set = np.arange(0)

    @property
    def size(self) -> int:
        return 0 if self.trace.best_set is None else int(self.trace.best_set.size)


def _matched_order(obj: TraceObjective, oracle: SetFunctionOracle) -> bool:
    """Whether the lmo's sweep order equals the objective's sort order."""
    asc = oracle.orientation is Orientation.SUBMODULAR
    return obj.ascending_sort() == asc


# ---------------------------------------------------------------------------
# Weighted peeling
# ---------------------------------------------------------------------------


def peel_weighted(oracle: SetFunctionOracle, weights=None,
                  direction: str = "auto") -> tuple[BasePoint, np.ndarray]:
    """One full peel selecting by weight plus removal-marginal.

    Supermodular oracles peel the smallest key first (the several-times
    rediscovered "load plus degree" rule); submodular ones peel the largest.
    Ties break on the smallest element index.  Returns the recorded marginals
    (a vertex of B(f)) and the peel order.
    """
    n = oracle.n
    w = np.zeros(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValueError("weights length must match the ground set")
    if direction == "auto":
        select_min = oracle.orientation is Orientation.SUPERMODULAR
    elif direction in ("min", "max"):
        select_min = direction == "min"
    else:
        raise ValueError("direction must be 'auto', 'min' or 'max'")
    sign = 1.0 if select_min else -1.0

    state = oracle.peeler()
    key = np.empty(n)
    for v in range(n):
        key[v] = sign * (w[v] + state.marginal(v))
    heap = [(key[v], v) for v in range(n)]
    heapq.heapify(heap)
    alive = np.ones(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    d = np.zeros(n)
    for j in range(n):
        while True:
            k, v = heapq.heappop(heap)
            if alive[v] and k == key[v]:
                break
        d[v] = state.marginal(v)
        order[j] = v
        alive[v] = False
        for u in state.remove(v):
            key[u] = sign * (w[u] + state.marginal(u))
            heapq.heappush(heap, (key[u], u))
    return BasePoint(d, float(d.sum())), order


# ---------------------------------------------------------------------------
# Solver 1: averaged weighted peeling
# ---------------------------------------------------------------------------


def supergreedy_pp(oracle: SetFunctionOracle, cfg: SolverConfig,
                   objective: TraceObjective | None = None,
                   clock=None, iterate_hook=None) -> tuple[BasePoint, ConvergenceTrace]:
    """Iterated peeling with running averaging; the peel weights at iteration
    t are the accumulated load (t-1) x^(t-1), where x^(t) mixes the new peel
    vertex in at rate 1/(t+1) starting from the zero vector.

    The raw running average is the vertex mean shrunk by t/(t+1); gaps and the
    returned point use the unshrunk mean, which is a convex combination of
    peel vertices and hence a genuine point of B(f) with a non-negative gap.
    The duality gap is evaluated every ``trace_every`` iterations and at the
    end; the evaluated iterate with the smallest gap is returned.  Early exit
    once the gap reaches eps^2 (when eps > 0).
    """
    obj = objective or default_objective(oracle)
    clock = clock or VirtualClock()
    n = oracle.n
    sweep = oracle.sweep_cost()
    trace = ConvergenceTrace()
    tracker = _BestTracker(obj, trace)
    raw = np.zeros(n)       # the printed running average, zero-started
    zero_weight = 1.0       # residual weight of that zero start inside raw
    best_gap = float("inf")
    best_x = None
    stop = False
    for t in range(1, cfg.max_iters + 1):
        d, order = peel_weighted(oracle, (t - 1) * raw)
        clock.add(sweep)
        if cfg.step_rule == "classic":
            step = 1.0 / (t + 1)
        else:
            step = 2.0 / (t + 2)
        raw = (1.0 - step) * raw + step * d.x
        zero_weight *= 1.0 - step
        x = raw / (1.0 - zero_weight)
        clock.add(n)
        if iterate_hook is not None:
            iterate_hook(t, raw, x)
        # suffix sets of the peel are extraction candidates at no oracle cost
        margs = d.x[order]
        tracker.offer_prefixes(order[::-1], np.cumsum(margs[::-1]))
        norm_sq = float(x @ x)
        tracker.offer_norm(norm_sq, n)
        if t % cfg.trace_every == 0 or t == cfg.max_iters:
            q, qorder = lmo_with_order(oracle, x)
            clock.add(sweep)
            gap = norm_sq - float(q.x @ x)
            if _matched_order(obj, oracle):
                tracker.offer_prefixes(qorder, np.cumsum(q.x[qorder]))
            if gap < best_gap:
                best_gap = gap
                best_x = x.copy()
            trace.append(TraceRow(t, clock.read(), tracker.best, norm_sq, gap,
                                  tracker.size))
            if cfg.eps > 0 and gap <= cfg.eps ** 2:
                stop = True
        if stop:
            break
    assert best_x is not None
    return BasePoint(best_x, float(best_x.sum())), trace


# ---------------------------------------------------------------------------
# Solver 2: conditional gradient
# ---------------------------------------------------------------------------


def frank_wolfe(oracle: SetFunctionOracle, cfg: SolverConfig,
                objective: TraceObjective | None = None,
                clock=None, iterate_hook=None) -> tuple[BasePoint, ConvergenceTrace]:
    """Conditional-gradient iterations x^(k) = (1-a_k) x^(k-1) + a_k d^(k)
    with a_k = 2/(k+2), started at a vertex so every iterate stays in B(f).

    Each step's linear minimization also certifies the gap of the current
    iterate for free, so the gap is tracked on every iterate.
    """
    obj = objective or default_objective(oracle)
    clock = clock or VirtualClock()
    n = oracle.n
    sweep = oracle.sweep_cost()
    trace = ConvergenceTrace()
    tracker = _BestTracker(obj, trace)
    matched = _matched_order(obj, oracle)

    d0, order0 = lmo_with_order(oracle, np.zeros(n))
    clock.add(sweep)
    x = d0.x.copy()
    if matched:
        tracker.offer_prefixes(order0, np.cumsum(d0.x[order0]))
    best_gap = float("inf")
    best_x = x.copy()

    k = 0
    while True:
        if iterate_hook is not None:
            iterate_hook(k, x, x)
        d, order = lmo_with_order(oracle, x)
        clock.add(sweep)
        norm_sq = float(x @ x)
        gap = norm_sq - float(d.x @ x)
        if matched:
            tracker.offer_prefixes(order, np.cumsum(d.x[order]))
        else:
            vals = prefix_values(oracle, _objective_order(obj, x))
            clock.add(sweep)
            tracker.offer_prefixes(_objective_order(obj, x), vals)
        tracker.offer_norm(norm_sq, n)
        if gap < best_gap:
            best_gap = gap
            best_x = x.copy()
        if k % cfg.trace_every == 0 or k == cfg.max_iters or (
                cfg.eps > 0 and gap <= cfg.eps ** 2):
            trace.append(TraceRow(k, clock.read(), tracker.best, norm_sq, gap,
                                  tracker.size))
        if cfg.eps > 0 and gap <= cfg.eps ** 2:
            break
        if k == cfg.max_iters:
            break
        k += 1
        alpha = 2.0 / (k + 2)
        x = (1.0 - alpha) * x + alpha * d.x
        clock.add(n)
    return BasePoint(best_x, float(best_x.sum())), trace


def _objective_order(obj: TraceObjective, x: np.ndarray) -> np.ndarray:
    if obj.ascending_sort():
        return np.argsort(x, kind="stable")
    return np.argsort(-x, kind="stable")


# ---------------------------------------------------------------------------
# Solver 3: Wolfe's minimum-norm-point method
# ---------------------------------------------------------------------------


def _affine_coeffs(r_factor: np.ndarray) -> np.ndarray:
    """Coefficients of the norm minimizer over the affine hull of the active
    vertices, from the Cholesky factor of (B^T B + 1 1^T)."""
    ones = np.ones(r_factor.shape[0])
    u = np.linalg.solve(r_factor.T, ones)
    y = np.linalg.solve(r_factor, u)
    return y / y.sum()


def _chol_append(r_factor: np.ndarray, cols: list[np.ndarray],
                 new: np.ndarray, pivot_tol: float) -> np.ndarray | None:
    """Grow the factor by one vertex; None if the pivot falls below tolerance
    (the vertex is affinely dependent on the active set)."""
    if r_factor.size == 0:
        diag = new @ new + 1.0
        return np.array([[np.sqrt(diag)]])
    m = np.array([c @ new + 1.0 for c in cols])
    r = np.linalg.solve(r_factor.T, m)
    rho_sq = float(new @ new + 1.0 - r @ r)
    if rho_sq <= pivot_tol:
        return None
    k = r_factor.shape[0]
    grown = np.zeros((k + 1, k + 1))
    grown[:k, :k] = r_factor
    grown[:k, k] = r
    grown[k, k] = np.sqrt(rho_sq)
    return grown


def _chol_delete(r_factor: np.ndarray, idx: int) -> np.ndarray:
    """Remove one active vertex, re-triangularizing with Givens rotations."""
    work = np.delete(r_factor, idx, axis=1)
    k = work.shape[1]
    for j in range(idx, k):
        a, b = work[j, j], work[j + 1, j]
        r = np.hypot(a, b)
        if r == 0.0:
            continue
        c, s = a / r, b / r
        rows = work[[j, j + 1], :]
        work[j, :] = c * rows[0] + s * rows[1]
        work[j + 1, :] = -s * rows[0] + c * rows[1]
    return work[:k, :]


def fujishige_wolfe(oracle: SetFunctionOracle, cfg: SolverConfig,
                    objective: TraceObjective | None = None,
                    clock=None, iterate_hook=None) -> tuple[BasePoint, ConvergenceTrace]:
    """Wolfe's method: major cycles add the lmo vertex, minor cycles minimize
    the norm over the affine hull of the active vertices and retreat to the
    convex hull when the affine minimizer escapes it.

    The normal-equations system is maintained as a Cholesky factor with
    incremental up/down-dating; a pivot below 1e-12 rejects the incoming
    vertex and ends the run at the current (numerically converged) point.
    The iterate is always a convex combination of at most n + 1 vertices.
    """
    obj = objective or default_objective(oracle)
    clock = clock or VirtualClock()
    n = oracle.n
    sweep = oracle.sweep_cost()
    trace = ConvergenceTrace()
    tracker = _BestTracker(obj, trace)
    matched = _matched_order(obj, oracle)

    v0, _ = lmo_with_order(oracle, np.zeros(n))
    clock.add(sweep)
    cols: list[np.ndarray] = [v0.x.copy()]
    lam = np.array([1.0])
    r_factor = _chol_append(np.zeros((0, 0)), [], v0.x, cfg.tau_drop * 0.0 + 1e-12)
    x = v0.x.copy()
    f_of_v = float(v0.x.sum())
    auto_tol = base_tolerance(f_of_v, cfg.tau_base)
    stop_gap = cfg.eps ** 2 if cfg.eps > 0 else auto_tol

    best_gap = float("inf")
    best_x = x.copy()
    final_reason = "max_iters"
    major = 0
    while major < cfg.max_iters:
        major += 1
        if iterate_hook is not None:
            iterate_hook(major, x, x)
        q, qorder = lmo_with_order(oracle, x)
        clock.add(sweep)
        norm_sq = float(x @ x)
        gap = norm_sq - float(q.x @ x)
        if matched:
            tracker.offer_prefixes(qorder, np.cumsum(q.x[qorder]))
        tracker.offer_norm(norm_sq, n)
        if gap < best_gap:
            best_gap = gap
            best_x = x.copy()
        done = gap <= stop_gap
        if major % cfg.trace_every == 0 or major == cfg.max_iters or done:
            trace.append(TraceRow(major, clock.read(), tracker.best, norm_sq,
                                  gap, tracker.size))
        if done:
            final_reason = "gap"
            break
        grown = _chol_append(r_factor, cols, q.x, 1e-12)
        if grown is None:
            final_reason = "pivot"
            break
        r_factor = grown
        cols.append(q.x.copy())
        lam = np.append(lam, 0.0)
        # minor cycles: each pass either lands inside the hull or drops a vertex
        for _ in range(n + 3):
            alpha = _affine_coeffs(r_factor)
            if alpha.min() >= -1e-12:
                lam = np.maximum(alpha, 0.0)
                lam /= lam.sum()
                break
            shrink = np.flatnonzero(alpha < 0)
            theta = np.min(lam[shrink] / (lam[shrink] - alpha[shrink]))
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > cfg.tau_drop
            if keep.all():
                # force out the most depleted coordinate to guarantee progress
                keep[int(np.argmin(lam))] = False
            for idx in sorted(np.flatnonzero(~keep), reverse=True):
                r_factor = _chol_delete(r_factor, idx)
                del cols[idx]
            lam = lam[keep]
            lam = np.maximum(lam, 0.0)
            lam /= lam.sum()
        else:
            raise RuntimeError("minor cycle failed to terminate")
        x = np.stack(cols, axis=1) @ lam
    if len(cols) > n + 1:
        raise RuntimeError("active set exceeded the affine dimension bound")
    return BasePoint(best_x, float(best_x.sum())), trace
