"""Exhaustive reference answers for small ground sets.

Set modes enumerate every subset from the oracle's value table; the
minimum-norm mode solves the quadratic program over all 2^n base constraints
with a primal active-set iteration, independent of every iterative solver it
is used to check.
"""

from __future__ import annotations

import numpy as np

from .extract import RatioSolution
from .setfn import Orientation, SetFunctionOracle

SET_LIMIT = 20
QP_LIMIT = 12


def _mask_ids(mask: int, n: int) -> np.ndarray:
    return np.flatnonzero([(mask >> b) & 1 for b in range(n)])


def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts += (masks >> b) & 1
    return counts


def brute_force(oracle: SetFunctionOracle, mode: str):
    """Exact answer by enumeration.

    mode "min_f" -> (ids, value) over all subsets including the empty one;
    "max_ratio"/"min_ratio" -> RatioSolution over nonempty subsets;
    "mnp_qp" -> the minimum norm point of B(f) as a vector.
    Ties resolve to the first subset in increasing bitmask order.
    """
    n = oracle.n
    if mode == "mnp_qp":
        if n > QP_LIMIT:
            raise ValueError(f"mnp_qp enumeration limited to n <= {QP_LIMIT}")
        return _mnp_active_set(oracle)
    if n > SET_LIMIT:
        raise ValueError(f"subset enumeration limited to n <= {SET_LIMIT}")
    table = oracle.value_table(SET_LIMIT)
    if mode == "min_f":
        mask = int(np.argmin(table))
        return _mask_ids(mask, n), float(table[mask])
    counts = _popcounts(n)
    ratios = table[1:] / counts[1:]
    if mode == "max_ratio":
        i = int(np.argmax(ratios))
    elif mode == "min_ratio":
        i = int(np.argmin(ratios))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    mask = i + 1
    return RatioSolution(_mask_ids(mask, n), float(ratios[i]), float(table[mask]))


def brute_ratio_subsolver(oracle: SetFunctionOracle):
    """Exact argmax of f(S) - lam |S| over subsets of the active set, for use
    as a ratio-improvement subproblem at small n."""

    def solve(active: np.ndarray, num: float, den: int) -> np.ndarray:
        active = np.asarray(active, dtype=np.int64)
        k = active.size
        lam = num / den
        best_val = 0.0
        best_mask = 0
        for mask in range(1, 1 << k):
            ids = active[_mask_ids(mask, k)]
            val = oracle.value(ids) - lam * ids.size
            if val > best_val + 1e-12:
                best_val = val
                best_mask = mask
        return active[_mask_ids(best_mask, k)]

    return solve


# ---------------------------------------------------------------------------
# Minimum-norm quadratic program over all base constraints
# ---------------------------------------------------------------------------


def _subset_sums(x: np.ndarray) -> np.ndarray:
    """x(S) for every bitmask S."""
    n = x.size
    sums = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + x[low.bit_length() - 1]
    return sums


def _indicator(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> b) & 1 for b in range(n)], dtype=float)


def _mnp_active_set(oracle: SetFunctionOracle, max_rounds: int = 20000) -> np.ndarray:
    """Primal active-set iteration for min ||x||^2 over B(f).

    Inequalities are sigma * x(S) <= sigma * f(S) for every proper nonempty S
    (sigma = +1 submodular, -1 supermodular) plus the tight-ground equality.
    Equality-restricted subproblems are solved as minimum-norm solutions of
    the active linear system; blocking constraints enter on the segment
    toward the subproblem optimum, and constraints with negative multipliers
    leave (smallest mask first, which avoids cycling on these degenerate
    polytopes in practice).
    """
    n = oracle.n
    table = oracle.value_table(QP_LIMIT)
    sigma = 1.0 if oracle.orientation is Orientation.SUBMODULAR else -1.0
    full = (1 << n) - 1
    from .setfn import edmonds_greedy

    x = edmonds_greedy(oracle, np.arange(n)).x.copy()
    working: list[int] = []
    masks = np.arange(1, full, dtype=np.int64)
    bits = np.zeros((masks.size, n))
    for b in range(n):
        bits[:, b] = (masks >> b) & 1
    slack_rhs = sigma * table[1:full]

    for _ in range(max_rounds):
        rows = [np.ones(n)] + [_indicator(m, n) for m in working]
        rhs = [table[full]] + [table[m] for m in working]
        target, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        if np.max(np.abs(target - x)) <= 1e-12:
            # stationary: check multipliers of the working inequalities
            cols = [sigma * _indicator(m, n) for m in working] + [np.ones(n)]
            mu, *_ = np.linalg.lstsq(np.array(cols).T, -2.0 * x, rcond=None)
            negative = [i for i in range(len(working)) if mu[i] < -1e-9]
            if not negative:
                return x
            working.pop(min(negative, key=lambda i: working[i]))
            continue
        direction = target - x
        move = sigma * (bits @ direction)
        room = slack_rhs - sigma * (bits @ x)
        blocking = -1
        alpha = 1.0
        for i in np.flatnonzero(move > 1e-12):
            m = int(masks[i])
            if m in working:
                continue
            step = room[i] / move[i]
            if step < alpha - 1e-15:
                alpha = max(step, 0.0)
                blocking = m
        x = x + alpha * direction
        if blocking >= 0 and alpha < 1.0:
            working.append(blocking)
    raise RuntimeError("active-set iteration failed to converge")
