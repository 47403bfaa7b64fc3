"""Shared fixtures: canonical small configurations and the generated corpus."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from l22embed import PointSet, WeightedGraph, validated
from l22embed.generators import hypercube_subset, l1_embeddable, line_sqrt, simplex
from l22embed.pointset import num_pairs

settings.register_profile(
    "ci", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")


@pytest.fixture
def square():
    """Vertices of {0,1}^2 in index order (0,0), (1,0), (0,1), (1,1)."""
    return validated(np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float))


@pytest.fixture
def triangle():
    """Equilateral triangle with side 1 in the plane."""
    return validated(
        np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
    )


@pytest.fixture
def two_points():
    return validated(np.array([[0.0], [3.0]]))


@pytest.fixture
def collinear():
    """0, 1, 2 on a line: the canonical invalid configuration."""
    return PointSet(np.array([[0.0], [1.0], [2.0]]))


def corpus(count: int, seed: int = 2024, max_n: int = 20, max_d: int = 8):
    """Seeded mix of exactly-valid configurations (hypercube subsets,
    simplices, line metrics, random cut combinations)."""
    rng = np.random.default_rng(seed)
    sets = []
    for idx in range(count):
        kind = idx % 4
        sub_seed = int(rng.integers(0, 2**63 - 1))
        if kind == 0:
            d = int(rng.integers(2, max_d + 1))
            n = int(rng.integers(3, min(max_n, 2**d) + 1))
            ps = hypercube_subset(n, d, seed=sub_seed)
        elif kind == 1:
            n = int(rng.integers(3, max_d + 1))  # simplex on n points sits in n dims
            ps = simplex(n, side=float(rng.uniform(0.5, 2.0)))
        elif kind == 2:
            n = int(rng.integers(3, max_d + 2))  # line metric on n points needs n-1 dims
            s = np.cumsum(rng.uniform(0.1, 2.0, size=n))
            ps = line_sqrt(s)
        else:
            n = int(rng.integers(3, max_n + 1))
            cuts = int(rng.integers(2, max_d + 1))
            ps = l1_embeddable(n, cuts=cuts, seed=sub_seed)
        sets.append(ps)
    return sets


def random_demand(n: int, seed: int = 0, sparse: bool = False) -> WeightedGraph:
    """Seeded demand graph; optionally with a zeroed-out fraction of pairs."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.05, 1.0, size=num_pairs(n))
    if sparse and n > 2:
        mask = rng.uniform(size=w.size) < 0.3
        if mask.all():
            mask[0] = False
        w[mask] = 0.0
    return WeightedGraph(n, w)


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(24, seed=7)
