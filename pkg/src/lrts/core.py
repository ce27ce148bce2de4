"""Domain-agnostic real-time search primitives.

The pieces every agent builds on: the problem interface, a learned-heuristic
table layered over a base heuristic, and exact-depth neighborhood expansion
with hash-based duplicate pruning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, List, Optional, Tuple

StateId = Hashable
ActionId = int

# A neighborhood member: (state, reach_cost, action sequence from the origin).
Member = Tuple[StateId, float, Tuple[ActionId, ...]]


class DomainViolation(RuntimeError):
    """The problem broke a contract the algorithms rely on (e.g. a state
    with no neighbors in a space that is supposed to be connected)."""


class DownwardWriteError(RuntimeError):
    """An upward-only heuristic table was asked to lower a stored value.

    The monotone algorithms never lower an estimate, so raising this means
    the calling code is buggy, not the table.
    """


class EmptyNeighborhoodError(ValueError):
    """best_frontier was handed a neighborhood with no members; the caller
    must treat that depth as trapped."""


class SearchProblem:
    """A finite search task: states, reversible actions, positive costs.

    Subclasses provide the initial state, the goal test, successor
    generation and action inversion. Contracts the agents rely on:
    every successor cost is strictly positive, every action is reversible
    (applying invert(a) in the successor leads back to the source), and at
    least one goal is reachable from the initial state.
    """

    initial_state: StateId

    def is_goal(self, s: StateId) -> bool:
        raise NotImplementedError

    def successors(self, s: StateId) -> List[Tuple[ActionId, StateId, float]]:
        """All (action, next_state, cost) triples applicable in s, in a
        fixed deterministic order."""
        raise NotImplementedError

    def invert(self, a: ActionId) -> ActionId:
        raise NotImplementedError

    def apply(self, s: StateId, a: ActionId) -> Tuple[StateId, float]:
        """Apply one action. Default scans successors(); concrete domains
        usually override with something O(1)."""
        for act, nxt, cost in self.successors(s):
            if act == a:
                return nxt, cost
        raise ValueError(f"action {a!r} not applicable in state {s!r}")


class HeuristicTable:
    """Learned heuristic: a sparse overlay over a base function.

    lookup(s) returns the overlay value when one was written and
    weight * base(s) otherwise (weight 1 leaves the base untouched, so
    integer-valued heuristics stay integers). stored_count is the number
    of distinct states ever written, which is the memory figure the
    benchmarks report; base evaluations are computed, not stored.
    update_count_this_trial counts value-changing writes and is reset by
    the trial runner.
    """

    __slots__ = ("base", "weight", "overlay", "update_count_this_trial")

    def __init__(self, base: Callable[[StateId], float], weight: float = 1.0):
        if weight < 1.0:
            raise ValueError(f"weight must be >= 1, got {weight}")
        self.base = base
        self.weight = float(weight)
        self.overlay: dict = {}
        self.update_count_this_trial = 0

    @property
    def stored_count(self) -> int:
        return len(self.overlay)

    def lookup(self, s: StateId) -> float:
        v = self.overlay.get(s)
        if v is not None:
            return v
        if self.weight == 1.0:
            return self.base(s)
        return self.weight * self.base(s)

    def write(self, s: StateId, v: float, upward_only: bool = False) -> None:
        """Store v as the learned value of s.

        Counts toward stored_count on the first write to s and toward the
        trial update count whenever the effective value actually changes.
        With upward_only, attempts to lower the current value raise
        DownwardWriteError.
        """
        if v < 0:
            raise ValueError(f"heuristic values are nonnegative, got {v}")
        cur = self.lookup(s)
        if upward_only and v < cur:
            raise DownwardWriteError(
                f"upward-only write of {v} over current value {cur} at {s!r}"
            )
        if v != cur:
            self.update_count_this_trial += 1
        self.overlay[s] = v


@dataclass
class Neighborhood:
    """The exactly-depth-d slice of the space around origin.

    members holds (state, reach_cost, actions): reach_cost is the minimal
    cumulative action cost among the explored length-depth paths, and
    actions is one cheapest such sequence. States are deduplicated; a
    state appears in the single layer matching its minimal action distance
    from the origin.
    """

    origin: StateId
    depth: int
    members: List[Member]


def iter_layers(
    problem: SearchProblem,
    origin: StateId,
    d_max: int,
    blocked: frozenset = frozenset(),
) -> Iterator[List[Member]]:
    """Yield the exact-depth member list for d = 1..d_max.

    Breadth-first layering with a global visited set (hash-based duplicate
    pruning), built incrementally so depth d reuses the depth d-1 frontier.
    Stops as soon as a layer comes up empty. States in `blocked` are never
    entered or expanded.
    """
    visited = {origin} | set(blocked)
    frontier: List[Member] = [(origin, 0, ())]
    for _ in range(d_max):
        found: dict = {}
        for state, cost, acts in frontier:
            for a, nxt, c in problem.successors(state):
                if nxt in visited:
                    continue
                reach = cost + c
                prev = found.get(nxt)
                if prev is None or reach < prev[0]:
                    found[nxt] = (reach, acts + (a,))
        if not found:
            return
        visited.update(found)
        frontier = [(s, rc, acts) for s, (rc, acts) in found.items()]
        yield frontier


def neighborhood(problem: SearchProblem, s: StateId, d: int) -> Neighborhood:
    """Exactly the states whose minimal action distance from s is d.

    An empty member list is a legal result: it means the frontier was
    exhausted before reaching depth d.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    members: List[Member] = []
    for depth, layer in enumerate(iter_layers(problem, s, d), start=1):
        if depth == d:
            members = layer
    return Neighborhood(origin=s, depth=d, members=members)


def best_frontier(
    nbhd: Neighborhood,
    table: HeuristicTable,
    gamma: float,
    rng: Optional[random.Random] = None,
) -> Tuple[StateId, float, Tuple[ActionId, ...]]:
    """The member minimizing gamma * reach_cost + lookup(member).

    Ties are broken by the supplied seeded generator (first minimum when
    rng is None). Returns (state, value, actions).
    """
    if not nbhd.members:
        raise EmptyNeighborhoodError(
            f"no members at depth {nbhd.depth} around {nbhd.origin!r}"
        )
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    best, ties = _score_layer(nbhd.members, table, gamma)
    if len(ties) > 1 and rng is not None:
        state, acts = rng.choice(ties)
    else:
        state, acts = ties[0]
    return state, best, acts


def _score_layer(
    members: List[Member], table: HeuristicTable, gamma: float
) -> Tuple[float, List[Tuple[StateId, Tuple[ActionId, ...]]]]:
    """Minimal gamma*reach + h over a layer, with the list of tied members."""
    lookup = table.lookup
    best = None
    ties: List[Tuple[StateId, Tuple[ActionId, ...]]] = []
    for state, reach, acts in members:
        v = gamma * reach + lookup(state)
        if best is None or v < best:
            best = v
            ties = [(state, acts)]
        elif v == best:
            ties.append((state, acts))
    return best, ties
