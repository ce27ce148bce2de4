import pytest

from lrts.oracle import full_bfs_distances


@pytest.fixture(scope="session")
def p8_dist():
    """Optimal cost for every reachable 8-puzzle state (built once)."""
    return full_bfs_distances(3, 3)


@pytest.fixture(scope="session")
def p8_states(p8_dist):
    """Deterministically ordered pool of all reachable 8-puzzle states."""
    return sorted(p8_dist)
