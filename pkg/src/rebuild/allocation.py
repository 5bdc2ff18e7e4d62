from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import structlog

from src.core.errors import InfeasibleRebuild
from src.core.types import RunConfig
from src.corrtensor.tensor import CorrelationTensorR, CorrelationTensorT
from src.hosvd.singular import smin
from src.qcore.pauli import PauliString
from src.rebuild.weights import AxisTuple, WeightVector, compose_weights, hidden_strength

log = structlog.get_logger(mod="rebuild")

TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GroupResult:
    axes: AxisTuple
    consumed: tuple[PauliString, ...]
    weights: WeightVector
    t_hat: float
    actual: float
    uses_actual: bool

    @property
    def t_add(self) -> float:
        if self.uses_actual:
            return max(0.0, self.t_hat - abs(self.actual))
        return self.t_hat

    def to_payload(self) -> dict:
        return {
            "axes": str(self.axes),
            "consumed": [str(p) for p in self.consumed],
            "l": dict(self.weights.nonzero()),
            "t_hat": self.t_hat,
            "actual": self.actual,
            "uses_actual": self.uses_actual,
            "t_add": self.t_add,
        }


@dataclass(frozen=True)
class InfeasibleEvent:
    axes: AxisTuple
    dropped: tuple[PauliString, ...]
    total: float

    def to_payload(self) -> dict:
        err = InfeasibleRebuild(
            f"weights along {self.axes} sum to {self.total:.6g} > 1",
            axes=str(self.axes),
            dropped=[str(p) for p in self.dropped],
        )
        return err.to_payload()


@dataclass(frozen=True, eq=False)
class RebuildResult:
    t_core: CorrelationTensorT
    t_add: CorrelationTensorT
    groups: tuple[GroupResult, ...]
    leftovers: Mapping[PauliString, float]
    infeasible: tuple[InfeasibleEvent, ...] = ()
    strategy: str = "none"
    candidates: int = 0

    @property
    def allocation(self) -> dict[AxisTuple, frozenset[PauliString]]:
        return {g.axes: frozenset(g.consumed) for g in self.groups}

    @property
    def consumed(self) -> frozenset[PauliString]:
        return frozenset(p for g in self.groups for p in g.consumed)

    @property
    def sum_t_add(self) -> float:
        return float(np.sum(self.t_add.entries))

    @property
    def leftover_strength(self) -> float:
        return float(sum(abs(v) for v in self.leftovers.values()))

    def to_payload(self) -> dict:
        return {
            "strategy": self.strategy,
            "candidates": self.candidates,
            "groups": [g.to_payload() for g in self.groups],
            "leftovers": {str(p): v for p, v in self.leftovers.items()},
            "leftover_strength": self.leftover_strength,
            "infeasible": [e.to_payload() for e in self.infeasible],
            "sum_t_add": self.sum_t_add,
        }


def _subset_of(p: PauliString) -> tuple[int, ...]:
    return tuple(sorted(p.support))


def compose_group(
    a: AxisTuple, coeffs: Mapping[PauliString, float], actual: float
) -> GroupResult | None:
    """Best feasible composition of `coeffs` along a, or None if none is feasible."""
    by_subset = {_subset_of(p): t for p, t in coeffs.items()}
    consumed = tuple(sorted(coeffs, key=lambda p: p.indices))
    if actual:
        w = compose_weights(a, by_subset, actual)
        if w.feasible:
            return GroupResult(a, consumed, w, hidden_strength(a, w), actual, True)
    w = compose_weights(a, by_subset)
    if w.feasible:
        return GroupResult(a, consumed, w, hidden_strength(a, w), actual, False)
    return None


def candidate_tuples(coeffs: Mapping[PauliString, float]) -> dict[AxisTuple, frozenset[PauliString]]:
    out: dict[AxisTuple, set[PauliString]] = {}
    for p in coeffs:
        for a in AxisTuple.completions(p):
            out.setdefault(a, set()).add(p)
    return {a: frozenset(ps) for a, ps in sorted(out.items())}


def _count_allocations(coeffs: Mapping[PauliString, float]) -> int:
    n = next(iter(coeffs)).n_qubits
    return math.prod(3 ** (n - p.weight) for p in coeffs)


def _better(total: float, key: tuple, best: tuple[float, tuple] | None) -> bool:
    if best is None:
        return True
    if total < best[0] - TIE_TOL:
        return True
    return abs(total - best[0]) <= TIE_TOL and key < best[1]


def shares_fiber(a: AxisTuple, b: AxisTuple) -> bool:
    """True when a and b differ in exactly one qubit."""
    return sum(x != y for x, y in zip(a.axes, b.axes)) == 1


def _fiber_disjoint(groups: list[GroupResult], floor: float) -> bool:
    live = [g.axes for g in groups if g.t_add > floor]
    return not any(shares_fiber(a, b) for a, b in itertools.combinations(live, 2))


def _t_add_entries(groups: list[GroupResult], n: int) -> np.ndarray:
    t_add = np.zeros((3,) * n)
    for g in groups:
        t_add[tuple(x - 1 for x in g.axes.axes)] = g.t_add
    return t_add


def _exhaustive(
    coeffs: Mapping[PauliString, float],
    actual_of,
    compat: dict[AxisTuple, frozenset[PauliString]],
    floor: float,
) -> list[GroupResult] | None:
    """Allocation with the smallest slice sum of T_add among fiber-disjoint ones."""
    strings = sorted(coeffs, key=lambda p: p.indices)
    n = strings[0].n_qubits
    options = [[a for a in compat if p in compat[a]] for p in strings]
    cache: dict[tuple[AxisTuple, frozenset[PauliString]], GroupResult | None] = {}
    scores: dict[tuple, float] = {}
    best: tuple[float, tuple] | None = None
    best_groups: list[GroupResult] | None = None
    for choice in itertools.product(*options):
        groups: dict[AxisTuple, set[PauliString]] = {}
        for p, a in zip(strings, choice):
            groups.setdefault(a, set()).add(p)
        results = []
        for a, members in sorted(groups.items()):
            key = (a, frozenset(members))
            if key not in cache:
                cache[key] = compose_group(a, {p: coeffs[p] for p in members}, actual_of(a))
            if cache[key] is None:
                break
            results.append(cache[key])
        else:
            if not _fiber_disjoint(results, floor):
                continue
            placed = tuple((g.axes.axes, g.t_add) for g in results)
            if placed not in scores:
                scores[placed] = smin(_t_add_entries(results, n), floor=floor).smin
            order_key = (len(results), tuple(g.axes.axes for g in results))
            if _better(scores[placed], order_key, best):
                best, best_groups = (scores[placed], order_key), results
    return best_groups


def _greedy(
    coeffs: Mapping[PauliString, float],
    actual_of,
    compat: dict[AxisTuple, frozenset[PauliString]],
    floor: float,
) -> tuple[list[GroupResult], list[InfeasibleEvent]]:
    consumed: set[PauliString] = set()
    used: set[AxisTuple] = set()
    groups: list[GroupResult] = []
    events: list[InfeasibleEvent] = []

    def blocked(a: AxisTuple) -> bool:
        return any(shares_fiber(a, g.axes) for g in groups if g.t_add > floor)

    while True:
        open_ = [(a, ps - consumed) for a, ps in compat.items() if a not in used]
        open_ = [(a, ps) for a, ps in open_ if ps and not blocked(a)]
        if not open_:
            break
        a, members = min(open_, key=lambda x: (-len(x[1]), x[0].distinct_axes(), x[0].axes))
        used.add(a)
        order = sorted(members, key=lambda p: (p.weight, p.indices))
        dropped: list[PauliString] = []
        group = None
        while order:
            group = compose_group(a, {p: coeffs[p] for p in order}, actual_of(a))
            if group is not None:
                break
            dropped.append(order.pop())
        if dropped:
            w = compose_weights(a, {_subset_of(p): coeffs[p] for p in members})
            events.append(InfeasibleEvent(a, tuple(dropped), w.total()))
            log.info("rebuild.infeasible", axes=str(a), dropped=[str(p) for p in dropped])
        if group is not None and order:
            groups.append(group)
            consumed.update(group.consumed)
    return groups, events


def rebuild(R: CorrelationTensorR, cfg: RunConfig | None = None) -> RebuildResult:
    cfg = cfg or RunConfig.from_settings()
    n = R.n_qubits
    T = R.to_T()
    coeffs = R.nonglobal(floor=cfg.svd_floor)

    def actual_of(a: AxisTuple) -> float:
        v = T[a.axes]
        return v if abs(v) > cfg.svd_floor else 0.0

    if not coeffs:
        return RebuildResult(T, CorrelationTensorT.zeros(n), (), {})
    if n == 2:
        # local Bloch terms of two qubits carry no hidden correlation
        return RebuildResult(T, CorrelationTensorT.zeros(n), (), coeffs, strategy="two-qubit")

    compat = candidate_tuples(coeffs)
    events: list[InfeasibleEvent] = []
    groups = None
    strategy = "greedy"
    if len(compat) <= cfg.exhaustive_limit and _count_allocations(coeffs) <= cfg.max_allocations:
        groups = _exhaustive(coeffs, actual_of, compat, cfg.svd_floor)
        strategy = "exhaustive"
        if groups is None:
            log.info("rebuild.exhaustive_empty", candidates=len(compat))
    if groups is None:
        strategy = "greedy"
        groups, events = _greedy(coeffs, actual_of, compat, cfg.svd_floor)
        log.debug("rebuild.greedy", candidates=len(compat), groups=len(groups))

    consumed = {p for g in groups for p in g.consumed}
    assert len(consumed) == sum(len(g.consumed) for g in groups), "string consumed twice"
    assert _fiber_disjoint(groups, cfg.svd_floor), "hidden elements share a fiber"
    leftovers = {p: v for p, v in coeffs.items() if p not in consumed}
    return RebuildResult(
        t_core=T,
        t_add=CorrelationTensorT(n, _t_add_entries(groups, n)),
        groups=tuple(sorted(groups, key=lambda g: g.axes)),
        leftovers=leftovers,
        infeasible=tuple(events),
        strategy=strategy,
        candidates=len(compat),
    )
