"""Ground-truth optimal solution costs.

Two independent solvers: exhaustive breadth-first search over the whole
reachable space (practical for the 8-puzzle, 181440 states) and
iterative-deepening A* with Manhattan distance (any size, budgeted).
"""

from __future__ import annotations

from collections import deque
from typing import Dict, Iterable, List, Optional, Tuple

from .tiles import State, TileBoard, TilePuzzle, goal_board, is_solvable

# Full-space distance maps are expensive to build and immutable once built;
# cache per board size within the process.
_BFS_CACHE: Dict[Tuple[int, int], Dict[State, int]] = {}

_MAX_BFS_CELLS = 9  # 3x3 and smaller; 4x4 has ~1e13 states


def full_bfs_distances(width: int, height: int) -> Dict[State, int]:
    """Optimal cost from every reachable state to the goal.

    Breadth-first from the goal outward; slide moves are symmetric, so the
    distance from the goal equals the distance to it. Covers exactly the
    solvable half of the permutation space.
    """
    key = (width, height)
    cached = _BFS_CACHE.get(key)
    if cached is not None:
        return cached
    if width * height > _MAX_BFS_CELLS:
        raise ValueError(
            f"full-space tabulation is limited to {_MAX_BFS_CELLS} cells, "
            f"got {width}x{height}"
        )
    puzzle = TilePuzzle(goal_board(width, height))
    moves = puzzle._moves
    goal = puzzle.goal
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        s = queue.popleft()
        d = dist[s] + 1
        blank = s.index(0)
        for _, target in moves[blank]:
            lst = list(s)
            lst[blank] = lst[target]
            lst[target] = 0
            nxt = tuple(lst)
            if nxt not in dist:
                dist[nxt] = d
                queue.append(nxt)
    _BFS_CACHE[key] = dist
    return dist


def bfs_optimal(problem: TilePuzzle, s: State) -> int:
    """Exact optimal cost via the full-space table."""
    dist = full_bfs_distances(problem.width, problem.height)
    try:
        return dist[s]
    except KeyError:
        raise ValueError(f"state {s!r} cannot reach the goal") from None


class _BudgetExceeded(Exception):
    pass


def ida_star_optimal(problem: TilePuzzle, s: State, budget: int = 10**8) -> Optional[int]:
    """Exact optimal cost via iterative-deepening A* with Manhattan distance.

    Generates at most `budget` nodes; returns None once the budget is
    exhausted. Unsolvable starts are rejected up front by the parity test
    rather than by a doomed search.
    """
    if not is_solvable(TileBoard(problem.width, problem.height, s)):
        raise ValueError(f"state {s!r} cannot reach the goal")
    md = problem._md
    moves = problem._moves
    h0 = problem.manhattan(s)
    if h0 == 0:
        return 0
    generated = 0
    tiles = list(s)

    def dfs(blank: int, g: int, h: int, bound: int, skip: int) -> int:
        """Returns the smallest f seen beyond the bound, or -1 on success."""
        nonlocal generated
        minimum_over = -2
        for a, target in moves[blank]:
            if target == skip:
                continue  # never undo the move that got us here
            generated += 1
            if generated > budget:
                raise _BudgetExceeded
            t = tiles[target]
            nh = h - md[t][target] + md[t][blank]
            nf = g + 1 + nh
            if nf > bound:
                if minimum_over == -2 or nf < minimum_over:
                    minimum_over = nf
                continue
            if nh == 0:
                return -1  # Manhattan is 0 exactly at the goal
            tiles[target] = 0
            tiles[blank] = t
            r = dfs(target, g + 1, nh, bound, blank)
            tiles[blank] = 0
            tiles[target] = t
            if r == -1:
                return -1
            if minimum_over == -2 or (r != -2 and r < minimum_over):
                minimum_over = r
        return minimum_over

    bound = h0
    blank = s.index(0)
    try:
        while True:
            r = dfs(blank, 0, h0, bound, -1)
            if r == -1:
                return bound
            if r == -2:
                raise RuntimeError(f"search space exhausted below bound {bound}")
            bound = r
    except _BudgetExceeded:
        return None


def encode_tiles(tiles: Iterable[int]) -> str:
    return ",".join(str(t) for t in tiles)


class OptimalCostCache:
    """A persistent map from board encodings to known optimal costs.

    Text format, one entry per line: "<encoding> <cost> <provenance>",
    where provenance names the solver that produced the value (e.g. "bfs",
    "ida"). Recording a conflicting cost for a known board raises; the two
    solvers must agree exactly.
    """

    def __init__(self):
        self._entries: Dict[str, Tuple[int, str]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, tiles: Iterable[int]) -> Optional[int]:
        entry = self._entries.get(encode_tiles(tiles))
        return entry[0] if entry else None

    def record(self, tiles: Iterable[int], cost: int, provenance: str) -> None:
        if cost < 0:
            raise ValueError(f"cost must be nonnegative, got {cost}")
        if not provenance or any(c.isspace() for c in provenance):
            raise ValueError(f"provenance must be a single token, got {provenance!r}")
        key = encode_tiles(tiles)
        prev = self._entries.get(key)
        if prev is not None and prev[0] != cost:
            raise ValueError(
                f"conflicting costs for {key}: {prev[0]} ({prev[1]}) vs {cost} ({provenance})"
            )
        if prev is None:
            self._entries[key] = (cost, provenance)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key in sorted(self._entries):
                cost, prov = self._entries[key]
                fh.write(f"{key} {cost} {prov}\n")

    @classmethod
    def load(cls, path: str) -> "OptimalCostCache":
        cache = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError(
                        f"{path}:{lineno}: expected 'encoding cost provenance', got {line!r}"
                    )
                key, cost_text, prov = parts
                try:
                    cost = int(cost_text)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: cost is not an integer") from None
                tiles = [int(t) for t in key.split(",")]
                cache.record(tiles, cost, prov)
        return cache


def optimal_cost(problem: TilePuzzle, s: State, ida_budget: int = 10**8,
                 cache: Optional[OptimalCostCache] = None) -> Optional[int]:
    """Best-effort exact cost: full BFS where feasible, else cache, else
    budgeted IDA*. None when nothing within budget can certify a value."""
    if problem.width * problem.height <= _MAX_BFS_CELLS:
        return bfs_optimal(problem, s)
    if cache is not None:
        known = cache.get(s)
        if known is not None:
            return known
    if ida_budget <= 0:
        return None
    cost = ida_star_optimal(problem, s, budget=ida_budget)
    if cost is not None and cache is not None:
        cache.record(s, cost, "ida")
    return cost
