"""Exact minimum station cover solvers.

``solve_naive`` enumerates covers by increasing size and is the independent
oracle for everything else.  ``solve_exact`` is a component-wise
branch-and-bound that branches on a smallest uncovered connection.
``solve_pipeline`` runs the reduction rules first and solves the core.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .model import Instance, connected_components
from .reduce import ReductionReport, reduce_to_core

NAIVE_LIMIT = 25


class BudgetExhausted(RuntimeError):
    """Search budget ran out; carries the best upper bound found so far."""

    def __init__(self, best_cover: frozenset[str]):
        super().__init__(f"budget exhausted; best cover so far has size {len(best_cover)}")
        self.best_cover = best_cover


@dataclass(frozen=True)
class Budget:
    """Caps for the branch-and-bound search; ``None`` means unlimited."""

    max_nodes: int | None = None
    max_seconds: float | None = None


def verify_cover(instance: Instance, cover: Iterable[str]) -> bool:
    chosen = set(cover)
    unknown = chosen - instance.stations
    if unknown:
        raise ValueError(f"unknown stations in cover: {sorted(unknown)[:5]}")
    return all(chosen & c for c in instance.connection_sets)


def solve_naive(instance: Instance) -> frozenset[str]:
    """Minimum cover by subset enumeration in increasing cardinality.

    Ties are broken by the lexicographically smallest token sequence.  Only
    admissible for small instances.
    """
    if instance.n_stations > NAIVE_LIMIT:
        raise ValueError(f"naive solver is limited to {NAIVE_LIMIT} stations")
    stations = instance.sorted_stations()
    conn_sets = instance.connection_sets
    for r in range(len(stations) + 1):
        for combo in combinations(stations, r):
            chosen = set(combo)
            if all(chosen & c for c in conn_sets):
                return frozenset(combo)
    raise AssertionError("unreachable: the full station set covers everything")


def _greedy_cover(conn_sets: list[frozenset[str]]) -> set[str]:
    """Deterministic greedy cover used as the initial upper bound."""
    uncovered = list(conn_sets)
    cover: set[str] = set()
    while uncovered:
        counts: dict[str, int] = {}
        for c in uncovered:
            for s in c:
                counts[s] = counts.get(s, 0) + 1
        best = min(counts, key=lambda s: (-counts[s], s))
        cover.add(best)
        uncovered = [c for c in uncovered if best not in c]
    return cover


def _disjoint_lower_bound(uncovered: list[frozenset[str]]) -> int:
    """Greedy packing of pairwise disjoint connections; each needs its own station."""
    taken: set[str] = set()
    count = 0
    for c in sorted(uncovered, key=len):
        if not (c & taken):
            count += 1
            taken |= c
    return count


class _BudgetState:
    def __init__(self, budget: Budget):
        self.max_nodes = budget.max_nodes
        self.deadline = (
            time.monotonic() + budget.max_seconds if budget.max_seconds is not None else None
        )
        self.nodes = 0

    def spent(self) -> bool:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            return True
        return False


class _Search:
    def __init__(self, conn_sets: list[frozenset[str]], state: _BudgetState):
        self.conn_sets = conn_sets
        self.state = state
        self.best: set[str] = _greedy_cover(conn_sets)

    def run(self) -> set[str]:
        self._branch(set(), self.conn_sets)
        return self.best

    def _branch(self, chosen: set[str], uncovered: list[frozenset[str]]) -> None:
        if self.state.spent():
            raise BudgetExhausted(frozenset(self.best))
        if not uncovered:
            if len(chosen) < len(self.best):
                self.best = set(chosen)
            return
        if len(chosen) + _disjoint_lower_bound(uncovered) >= len(self.best):
            return
        target = min(uncovered, key=lambda c: (len(c), sorted(c)))
        for s in sorted(target):
            chosen.add(s)
            remaining = [c for c in uncovered if s not in c]
            self._branch(chosen, remaining)
            chosen.discard(s)


def solve_exact(instance: Instance, budget: Budget | None = None) -> frozenset[str]:
    """Minimum cover via branch-and-bound, one component at a time.

    Branches on a minimum-cardinality uncovered connection, pruning against
    the best cover found so far.  Raises :class:`BudgetExhausted` (with the
    best upper bound assembled across components) when the budget runs out.
    """
    budget = budget or Budget()
    state = _BudgetState(budget)
    cover: set[str] = set()
    parts = connected_components(instance)
    for k, part in enumerate(parts):
        if not part.connections:
            continue
        search = _Search(list(part.connection_sets), state)
        try:
            cover |= search.run()
        except BudgetExhausted:
            # Assemble a valid global upper bound: the interrupted
            # component's incumbent plus greedy covers for the rest.
            bound = set(cover) | search.best
            for rest in parts[k + 1 :]:
                if rest.connections:
                    bound |= _greedy_cover(list(rest.connection_sets))
            raise BudgetExhausted(frozenset(bound)) from None
    assert verify_cover(instance, cover)
    return frozenset(cover)


def solve_pipeline(
    instance: Instance, budget: Budget | None = None
) -> tuple[frozenset[str], ReductionReport]:
    """Reduce to the core, solve each core component exactly, lift the union.

    The returned cover is checked against the original instance, which every
    cover of the core is guaranteed to satisfy.
    """
    report = reduce_to_core(instance)
    cover = solve_exact(report.core, budget)
    assert verify_cover(instance, cover)
    return cover, report
