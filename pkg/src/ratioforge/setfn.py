"""Normalized set-function oracles and base-polytope primitives.

A set function f over a ground set V is accessed through value queries and
an incremental peel state that supports removing one element at a time while
keeping every remaining element's removal-marginal f(v | S - v) cheap to read.
Greedy sweeps over peel orders produce vertices of the base polytope B(f);
sorting a point and sweeping realizes the linear minimization oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class Orientation(enum.Enum):
    SUBMODULAR = "submodular"
    SUPERMODULAR = "supermodular"

    def flipped(self) -> "Orientation":
        if self is Orientation.SUBMODULAR:
            return Orientation.SUPERMODULAR
        return Orientation.SUBMODULAR


@dataclass(frozen=True)
class GroundSet:
    """Element count plus optional external identifiers."""

    n: int
    labels: tuple | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set must have at least one element")
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise ValueError("labels length must equal n")
            if len(set(self.labels)) != self.n:
                raise ValueError("labels must be unique")


@dataclass
class SolverConfig:
    """Iteration budget and tolerances shared by all iterative solvers.

    ``eps`` is the additive accuracy target; solvers stop early once the
    duality gap drops to ``eps**2`` (never when eps == 0).  ``step_rule``
    selects the averaging rate of the peeling solver: "classic" uses
    1/(t+1), "fw" uses 2/(t+2).
    """

    max_iters: int = 100
    eps: float = 0.0
    trace_every: int = 1
    tau_base: float = 1e-9
    tau_drop: float = 1e-10
    tau_tie: float = 0.0
    step_rule: str = "classic"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")
        if self.step_rule not in ("classic", "fw"):
            raise ValueError("step_rule must be 'classic' or 'fw'")


@dataclass(frozen=True)
class BasePoint:
    """A vector x with x(V) = f(V): a candidate point of B(f)."""

    x: np.ndarray
    f_of_V: float

    @property
    def norm_sq(self) -> float:
        return float(self.x @ self.x)


def base_tolerance(f_of_V: float, tau_base: float = 1e-9) -> float:
    """Absolute tolerance for x(V) == f(V) style checks."""
    return tau_base * (1.0 + abs(f_of_V))


class PeelState:
    """Mutable scratch tracking removal-marginals while elements leave S.

    Starts with S = V.  ``marginal(v)`` returns f(v | S - v) for v still in S;
    ``remove(v)`` takes v out of S and returns the elements whose marginal may
    have changed.  Confined to a single solver at a time.
    """

    def marginal(self, v: int) -> float:
        raise NotImplementedError

    def remove(self, v: int) -> Iterable[int]:
        raise NotImplementedError

    def restrict(self, keep: np.ndarray) -> None:
        """Drop every element outside ``keep`` (boolean mask over V)."""
        for v in range(len(keep)):
            if not keep[v]:
                self.remove(v)


class SetFunctionOracle:
    """Value/marginal access to a normalized sub- or supermodular function.

    Subclasses provide ``_value`` over a nonempty index array and a fresh
    ``peeler``.  ``ids`` carries original element identifiers so adapters
    (negation, shift, contraction) can report answers in the caller's space.
    """

    ground: GroundSet
    orientation: Orientation

    def __init__(self, ground: GroundSet, orientation: Orientation,
                 ids: np.ndarray | None = None):
        self.ground = ground
        self.orientation = orientation
        self.ids = np.arange(ground.n) if ids is None else np.asarray(ids)

    @property
    def n(self) -> int:
        return self.ground.n

    def value(self, subset: Iterable[int]) -> float:
        sel = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset,
                         dtype=np.int64)
        if sel.size == 0:
            return 0.0
        return self._value(sel)

    def _value(self, sel: np.ndarray) -> float:
        raise NotImplementedError

    def marginal_of_removal(self, v: int, subset: Iterable[int]) -> float:
        """f(v | S - v) computed as a plain value difference."""
        sel = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset,
                         dtype=np.int64)
        if v not in sel:
            raise ValueError("element must belong to the queried subset")
        return self.value(sel) - self.value(sel[sel != v])

    def peeler(self) -> PeelState:
        raise NotImplementedError

    def sweep_cost(self) -> int:
        """Deterministic work units of one full peel; drives the virtual clock."""
        return 4 * self.n

    def value_table(self, limit: int = 20) -> np.ndarray:
        """f over all 2^n subsets, indexed by bitmask.  Exhaustive fallback."""
        n = self.n
        if n > limit:
            raise ValueError(f"value_table limited to n <= {limit}, got {n}")
        out = np.zeros(1 << n)
        idx = np.arange(n)
        for mask in range(1, 1 << n):
            bits = idx[(mask >> idx) & 1 == 1]
            out[mask] = self._value(bits)
        return out


class CallableOracle(SetFunctionOracle):
    """Oracle backed by an arbitrary python function of an index tuple."""

    def __init__(self, n: int, fn: Callable[[tuple], float],
                 orientation: Orientation, labels: tuple | None = None):
        super().__init__(GroundSet(n, labels), orientation)
        self.fn = fn

    def _value(self, sel: np.ndarray) -> float:
        return float(self.fn(tuple(sorted(int(v) for v in sel))))

    def peeler(self) -> PeelState:
        return _GenericPeel(self)


class _GenericPeel(PeelState):
    """Marginals by value differences; O(1) removals, O(|S|) marginal reads."""

    def __init__(self, oracle: SetFunctionOracle):
        self.oracle = oracle
        self.alive = np.ones(oracle.n, dtype=bool)
        self._members = set(range(oracle.n))

    def marginal(self, v: int) -> float:
        sel = np.fromiter(self._members, dtype=np.int64)
        return self.oracle.value(sel) - self.oracle.value(sel[sel != v])

    def remove(self, v: int):
        self.alive[v] = False
        self._members.discard(v)
        return list(self._members)


# ---------------------------------------------------------------------------
# Adapters
# ---------------------------------------------------------------------------


class _WrappedPeel(PeelState):
    def __init__(self, inner: PeelState, scale: float = 1.0, offset: float = 0.0):
        self.inner = inner
        self.scale = scale
        self.offset = offset

    def marginal(self, v: int) -> float:
        return self.scale * self.inner.marginal(v) + self.offset

    def remove(self, v: int):
        return self.inner.remove(v)


class NegatedOracle(SetFunctionOracle):
    def __init__(self, base: SetFunctionOracle):
        super().__init__(base.ground, base.orientation.flipped(), base.ids)
        self.base = base

    def _value(self, sel: np.ndarray) -> float:
        return -self.base._value(sel)

    def peeler(self) -> PeelState:
        return _WrappedPeel(self.base.peeler(), scale=-1.0)

    def sweep_cost(self) -> int:
        return self.base.sweep_cost()

    def value_table(self, limit: int = 20) -> np.ndarray:
        return -self.base.value_table(limit)


class ShiftedOracle(SetFunctionOracle):
    """g(S) = f(S) + C|S|; same orientation, same ratio maximizers."""

    def __init__(self, base: SetFunctionOracle, c: float):
        super().__init__(base.ground, base.orientation, base.ids)
        self.base = base
        self.c = float(c)

    def _value(self, sel: np.ndarray) -> float:
        return self.base._value(sel) + self.c * sel.size

    def peeler(self) -> PeelState:
        return _WrappedPeel(self.base.peeler(), offset=self.c)

    def sweep_cost(self) -> int:
        return self.base.sweep_cost()

    def value_table(self, limit: int = 20) -> np.ndarray:
        table = self.base.value_table(limit)
        n = self.n
        counts = np.zeros(1 << n)
        for b in range(n):
            counts += (np.arange(1 << n) >> b) & 1
        return table + self.c * counts


class ContractedOracle(SetFunctionOracle):
    """f'(S) = f(S ∪ A) - f(A) over ground set V \\ A."""

    def __init__(self, base: SetFunctionOracle, absorbed: np.ndarray):
        absorbed = np.asarray(sorted(set(int(v) for v in absorbed)), dtype=np.int64)
        if absorbed.size == 0:
            raise ValueError("contraction set must be nonempty")
        if absorbed.size >= base.n:
            raise ValueError("contracting the whole ground set leaves nothing")
        keep = np.setdiff1d(np.arange(base.n), absorbed)
        labels = None
        if base.ground.labels is not None:
            labels = tuple(base.ground.labels[i] for i in keep)
        super().__init__(GroundSet(keep.size, labels), base.orientation,
                         base.ids[keep])
        self.base = base
        self.absorbed = absorbed
        self.keep = keep
        self._f_absorbed = base.value(absorbed)

    def _value(self, sel: np.ndarray) -> float:
        merged = np.concatenate([self.keep[sel], self.absorbed])
        return self.base._value(merged) - self._f_absorbed

    def peeler(self) -> PeelState:
        return _ContractedPeel(self)

    def sweep_cost(self) -> int:
        return self.base.sweep_cost()


class _ContractedPeel(PeelState):
    def __init__(self, oracle: ContractedOracle):
        self.oracle = oracle
        self.inner = oracle.base.peeler()
        self._to_local = -np.ones(oracle.base.n, dtype=np.int64)
        self._to_local[oracle.keep] = np.arange(oracle.keep.size)

    def marginal(self, v: int) -> float:
        return self.inner.marginal(int(self.oracle.keep[v]))

    def remove(self, v: int):
        touched = self.inner.remove(int(self.oracle.keep[v]))
        local = (self._to_local[u] for u in touched)
        return [int(u) for u in local if u >= 0]


class RestrictedOracle(SetFunctionOracle):
    """f restricted to subsets of a kept vertex set (induced sub-instance)."""

    def __init__(self, base: SetFunctionOracle, keep: np.ndarray):
        keep = np.asarray(sorted(set(int(v) for v in keep)), dtype=np.int64)
        if keep.size == 0:
            raise ValueError("restriction must keep at least one element")
        labels = None
        if base.ground.labels is not None:
            labels = tuple(base.ground.labels[i] for i in keep)
        super().__init__(GroundSet(keep.size, labels), base.orientation,
                         base.ids[keep])
        self.base = base
        self.keep = keep

    def _value(self, sel: np.ndarray) -> float:
        return self.base._value(self.keep[sel])

    def peeler(self) -> PeelState:
        inner = self.base.peeler()
        mask = np.zeros(self.base.n, dtype=bool)
        mask[self.keep] = True
        inner.restrict(mask)
        state = _ContractedPeelLike(inner, self.keep, self.base.n)
        return state

    def sweep_cost(self) -> int:
        return self.base.sweep_cost()


class _ContractedPeelLike(PeelState):
    def __init__(self, inner: PeelState, keep: np.ndarray, base_n: int):
        self.inner = inner
        self.keep = keep
        self._to_local = -np.ones(base_n, dtype=np.int64)
        self._to_local[keep] = np.arange(keep.size)

    def marginal(self, v: int) -> float:
        return self.inner.marginal(int(self.keep[v]))

    def remove(self, v: int):
        touched = self.inner.remove(int(self.keep[v]))
        local = (self._to_local[u] for u in touched)
        return [int(u) for u in local if u >= 0]


def negate(oracle: SetFunctionOracle) -> SetFunctionOracle:
    """Oracle for -f with flipped orientation; B(-f) = -B(f)."""
    if isinstance(oracle, NegatedOracle):
        return oracle.base
    return NegatedOracle(oracle)


def shift(oracle: SetFunctionOracle, c: float) -> SetFunctionOracle:
    if c == 0:
        return oracle
    return ShiftedOracle(oracle, c)


def contract(oracle: SetFunctionOracle, absorbed: Iterable[int]) -> SetFunctionOracle:
    return ContractedOracle(oracle, np.asarray(list(absorbed), dtype=np.int64))


def restrict(oracle: SetFunctionOracle, keep: Iterable[int]) -> SetFunctionOracle:
    return RestrictedOracle(oracle, np.asarray(list(keep), dtype=np.int64))


# ---------------------------------------------------------------------------
# Greedy sweeps over B(f)
# ---------------------------------------------------------------------------


def edmonds_greedy(oracle: SetFunctionOracle, peel_order: Sequence[int]) -> BasePoint:
    """Vertex of B(f) from a peel order: x(v_j) = f(v_j | S_j - v_j).

    S_1 = V and each step removes the next element of ``peel_order``; the
    entries telescope to f(V).
    """
    order = np.asarray(peel_order, dtype=np.int64)
    n = oracle.n
    if order.size != n or len(set(order.tolist())) != n:
        raise ValueError("peel_order must be a permutation of the ground set")
    state = oracle.peeler()
    x = np.zeros(n)
    for v in order:
        x[v] = state.marginal(int(v))
        state.remove(int(v))
    return BasePoint(x, float(np.sum(x)))


def _sorted_build_order(oracle: SetFunctionOracle, x: np.ndarray) -> np.ndarray:
    """Build order realizing argmin_{d in B(f)} <d, x>.

    Submodular bases are built along ascending x, supermodular along
    descending x (the negation-dual of the submodular rule for -f); stable
    sorts break ties by element index.
    """
    if oracle.orientation is Orientation.SUBMODULAR:
        return np.argsort(x, kind="stable")
    return np.argsort(-np.asarray(x), kind="stable")


def lmo_with_order(oracle: SetFunctionOracle,
                   x: np.ndarray | BasePoint) -> tuple[BasePoint, np.ndarray]:
    """lmo plus the build order it swept; prefix sums of the vertex along that
    order are the f-values of all sorted prefixes, which extraction reuses."""
    vec = x.x if isinstance(x, BasePoint) else np.asarray(x, dtype=float)
    if vec.shape != (oracle.n,):
        raise ValueError("point length must match the ground set")
    build = _sorted_build_order(oracle, vec)
    return edmonds_greedy(oracle, build[::-1]), build


def lmo(oracle: SetFunctionOracle, x: np.ndarray | BasePoint) -> BasePoint:
    """Vertex d of B(f) minimizing <d, x>, via a sorted greedy sweep."""
    return lmo_with_order(oracle, x)[0]


def duality_gap(oracle: SetFunctionOracle, x: np.ndarray | BasePoint) -> float:
    """||x||^2 - min_{q in B(f)} <q, x>; zero exactly at the minimum norm point."""
    vec = x.x if isinstance(x, BasePoint) else np.asarray(x, dtype=float)
    d = lmo(oracle, vec)
    return float(vec @ vec - d.x @ vec)


def prefix_values(oracle: SetFunctionOracle, build_order: Sequence[int]) -> np.ndarray:
    """f of every prefix of ``build_order`` in one telescoping sweep.

    Entry i holds f({order[0], ..., order[i]}).
    """
    order = np.asarray(build_order, dtype=np.int64)
    state = oracle.peeler()
    margs = np.zeros(order.size)
    for j in range(order.size - 1, -1, -1):
        v = int(order[j])
        margs[j] = state.marginal(v)
        state.remove(v)
    return np.cumsum(margs)


def max_base_norm_bound(oracle: SetFunctionOracle) -> float:
    """Diagnostic upper estimate of max_{q in B(f)} ||q||: index-order vertex norm."""
    d = edmonds_greedy(oracle, np.arange(oracle.n))
    return float(np.linalg.norm(d.x))


def max_singleton_marginal(oracle: SetFunctionOracle) -> float:
    """Diagnostic: max_v |f(v | V - v)|, the peel-scale of the instance."""
    state = oracle.peeler()
    return max(abs(state.marginal(v)) for v in range(oracle.n))
