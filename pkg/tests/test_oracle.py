import random

import pytest

from lrts.oracle import (
    OptimalCostCache,
    bfs_optimal,
    encode_tiles,
    full_bfs_distances,
    ida_star_optimal,
    optimal_cost,
)
from lrts.tiles import TileBoard, TilePuzzle, goal_board, manhattan, random_solvable

from oracles import bfs_goal_distance

HARD8 = (8, 0, 6, 5, 4, 7, 2, 3, 1)  # one of the two deepest configurations


def test_full_space_covers_exactly_the_solvable_half(p8_dist):
    assert len(p8_dist) == 362880 // 2
    assert p8_dist[tuple(range(9))] == 0
    assert max(p8_dist.values()) == 31


def test_full_space_is_cached_per_process(p8_dist):
    assert full_bfs_distances(3, 3) is p8_dist


def test_bfs_optimal_matches_independent_forward_search(p8_dist):
    rng = random.Random(1)
    for _ in range(15):
        board = random_solvable(3, 3, rng)
        problem = TilePuzzle(board)
        cost = bfs_optimal(problem, board.tiles)
        assert cost == bfs_goal_distance(problem, board.tiles)
        assert cost == p8_dist[board.tiles]


def test_bfs_optimal_rejects_unsolvable():
    board = TileBoard(3, 3, (0, 2, 1, 3, 4, 5, 6, 7, 8))
    with pytest.raises(ValueError):
        bfs_optimal(TilePuzzle(board), board.tiles)


def test_ida_agrees_with_bfs_on_random_boards(p8_dist, p8_states):
    rng = random.Random(6)
    problem = TilePuzzle(goal_board(3, 3))
    for tiles in rng.sample(p8_states, 60):
        assert ida_star_optimal(problem, tiles) == p8_dist[tiles]


def test_ida_solves_the_deep_corner_case(p8_dist):
    problem = TilePuzzle(TileBoard(3, 3, HARD8))
    true = p8_dist[HARD8]
    assert ida_star_optimal(problem, HARD8) == true == 31


def test_ida_handles_goal_and_unsolvable():
    problem = TilePuzzle(goal_board(3, 3))
    assert ida_star_optimal(problem, problem.goal) == 0
    with pytest.raises(ValueError):
        ida_star_optimal(problem, (0, 2, 1, 3, 4, 5, 6, 7, 8))


def test_ida_returns_none_when_budget_runs_out():
    problem = TilePuzzle(TileBoard(3, 3, HARD8))
    assert ida_star_optimal(problem, HARD8, budget=50) is None


def test_ida_on_easy_15_puzzle_walks():
    # scramble the goal by a short random walk; the optimum is at most the
    # walk length and must match Manhattan parity
    rng = random.Random(9)
    problem = TilePuzzle(goal_board(4, 4))
    for _ in range(5):
        tiles = problem.goal
        for _ in range(14):
            _, tiles, _ = rng.choice(problem.successors(tiles))
        cost = ida_star_optimal(problem, tiles, budget=10**6)
        h = problem.manhattan(tiles)
        assert cost is not None and h <= cost <= 14
        assert (cost - h) % 2 == 0


# --- persistent cache --------------------------------------------------------

def test_cache_roundtrip(tmp_path):
    cache = OptimalCostCache()
    cache.record((1, 0, 2, 3, 4, 5, 6, 7, 8), 1, "bfs")
    cache.record(range(9), 0, "bfs")
    cache.record((1, 0, 2, 3, 4, 5, 6, 7, 8), 1, "ida")  # same cost: fine
    path = str(tmp_path / "costs.txt")
    cache.save(path)
    loaded = OptimalCostCache.load(path)
    assert len(loaded) == 2
    assert loaded.get((1, 0, 2, 3, 4, 5, 6, 7, 8)) == 1
    assert loaded.get(range(9)) == 0
    assert loaded.get((2, 0, 1, 3, 4, 5, 6, 7, 8)) is None


def test_cache_rejects_conflicts_and_junk(tmp_path):
    cache = OptimalCostCache()
    cache.record(range(9), 4, "bfs")
    with pytest.raises(ValueError):
        cache.record(range(9), 5, "ida")
    with pytest.raises(ValueError):
        cache.record(range(9), -1, "bfs")
    with pytest.raises(ValueError):
        cache.record(range(9), 4, "two words")
    bad = tmp_path / "bad.txt"
    bad.write_text("0,1,2 x bfs\n", encoding="utf-8")
    with pytest.raises(ValueError):
        OptimalCostCache.load(str(bad))
    bad.write_text("0,1,2 4\n", encoding="utf-8")
    with pytest.raises(ValueError):
        OptimalCostCache.load(str(bad))


def test_cache_file_format_is_stable(tmp_path):
    cache = OptimalCostCache()
    cache.record((1, 0, 2, 3, 4, 5, 6, 7, 8), 1, "bfs")
    path = str(tmp_path / "c.txt")
    cache.save(path)
    assert open(path, encoding="utf-8").read() == "1,0,2,3,4,5,6,7,8 1 bfs\n"
    assert encode_tiles((1, 0, 2)) == "1,0,2"


def test_optimal_cost_prefers_table_then_cache_then_search(p8_dist):
    problem8 = TilePuzzle(goal_board(3, 3))
    board = random_solvable(3, 3, random.Random(2))
    assert optimal_cost(problem8, board.tiles) == p8_dist[board.tiles]

    problem15 = TilePuzzle(goal_board(4, 4))
    tiles = problem15.goal
    for _ in range(12):
        _, tiles, _ = random.Random(3).choice(problem15.successors(tiles))
    # budget 0 and no cache: unavailable
    assert optimal_cost(problem15, tiles, ida_budget=0) is None
    # cached value wins without any search
    cache = OptimalCostCache()
    cache.record(tiles, 99, "bfs")  # deliberately wrong to prove no search ran
    assert optimal_cost(problem15, tiles, ida_budget=0, cache=cache) == 99
    # with budget, the search result lands in the cache
    cache2 = OptimalCostCache()
    cost = optimal_cost(problem15, tiles, ida_budget=10**6, cache=cache2)
    assert cost is not None and cache2.get(tiles) == cost
