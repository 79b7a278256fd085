import pytest

from qlgs import Params, SolverOptions, find_ground_state
from qlgs.nondegeneracy import VerifyOptions, verify


@pytest.fixture(scope="session")
def solve():
    """Session-wide cache of ground-state solves keyed by configuration."""
    cache = {}

    def get(dim, p, omega=1.0, nodes=None, radius=None):
        key = (dim, p, omega, nodes, radius)
        if key not in cache:
            kw = {}
            if nodes is not None:
                kw["nodes"] = nodes
            if radius is not None:
                kw["radius"] = radius
            cache[key] = find_ground_state(Params(dim, p, omega), SolverOptions(**kw))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def verified():
    """Session-wide cache of full verification runs at default settings."""
    cache = {}

    def get(dim, p, omega=1.0, nodes=None):
        key = (dim, p, omega, nodes)
        if key not in cache:
            solver = SolverOptions() if nodes is None else SolverOptions(nodes=nodes)
            cache[key] = verify(Params(dim, p, omega), VerifyOptions(solver=solver))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def gs121(solve):
    return solve(1, 2.0)


@pytest.fixture(scope="session")
def gs221(solve):
    return solve(2, 2.0)


@pytest.fixture(scope="session")
def gs221_fine(solve):
    return solve(2, 2.0, nodes=6001)
