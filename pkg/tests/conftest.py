import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mpcgraph.graph import ParentMap, generate, random_parent_map

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SHAPES = ("recursive", "path", "star", "binary", "broom")


@st.composite
def trees(draw, min_n=1, max_n=300, shapes=SHAPES):
    n = draw(st.integers(min_n, max_n))
    shape = draw(st.sampled_from(shapes))
    seed = draw(st.integers(0, 2**31))
    return random_parent_map(n, seed, shape)


@st.composite
def graphs(draw, min_n=2, max_n=60, density=3):
    n = draw(st.integers(min_n, max_n))
    top = min(density * n, n * (n - 1) // 2)
    m = draw(st.integers(min(n - 1, top), top))
    seed = draw(st.integers(0, 2**31))
    return generate("gnm", n, seed=seed, m=m)


def star(k):
    """Root 1 with children 2..k+1."""
    return ParentMap.from_dict({1: 1, **{v: 1 for v in range(2, k + 2)}})


def path_tree(n):
    """1 <- 2 <- ... <- n."""
    return ParentMap.from_dict({1: 1, **{v: v - 1 for v in range(2, n + 1)}})


@pytest.fixture
def caterpillar():
    return ParentMap.from_dict({1: 1, 2: 1, 3: 1, 4: 2, 5: 2})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
