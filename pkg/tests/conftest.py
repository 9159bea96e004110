import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import tricensus as tc

# first call into a compiled kernel pays JIT time; never let hypothesis
# mistake that for a slow property
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def table():
    return tc.TRICODE_TABLE


@pytest.fixture(scope="session", autouse=True)
def _compile_kernels():
    from tricensus import _kernels

    _kernels.warm_up()


@pytest.fixture
def cycle4_graph():
    """4 nodes, directed 3-cycle on {1,2,3}, node 0 isolated."""
    edges = tc.EdgeList.from_pairs([(1, 2), (2, 3), (3, 1)])
    return tc.build_graph(edges, node_count=4)


def build_from_pairs(pairs, n=None):
    return tc.build_graph(tc.EdgeList.from_pairs(pairs), node_count=n)


def random_graph(seed, n=None, max_n=120, model="uniform", gamma=2.3):
    """Seeded random test graph spanning sparse to near-complete densities."""
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(3, max_n + 1))
    cap = n * (n - 1)
    if model == "uniform":
        m = int(rng.integers(0, cap + 1))
        spec = tc.GenSpec("uniform", n, m, seed=seed)
    else:
        m = int(rng.integers(n, max(n + 1, min(cap, 20 * n)) + 1))
        spec = tc.GenSpec("powerlaw", n, m, exponent=gamma, seed=seed)
    return tc.build_graph(tc.generate(spec), node_count=n)
