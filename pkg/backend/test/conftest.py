"""
Pytest configuration and fixtures for testing.
"""

import os
import sys

import numpy as np
import pytest

# Add backend to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from app.core.config import settings
from app.core.logging import configure_logging
from app.models.behavior import SimMatrix
from app.models.graph import Graph
from app.services.graph_service import build_graph


def make_sim(size, pairs=None, default=0.0):
    """SimMatrix of `size` nodes with `pairs[(u, v)]` set and `default` elsewhere."""
    values = np.full((size, size), float(default))
    for (u, v), value in (pairs or {}).items():
        values[u, v] = value
        values[v, u] = value
    return SimMatrix(values)


def random_sim(size, seed):
    rng = np.random.default_rng(seed)
    upper = rng.random(size * (size - 1) // 2)
    return SimMatrix.from_upper(upper, size)


def clique_edges(nodes):
    nodes = list(nodes)
    return [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]]


@pytest.fixture(scope="session", autouse=True)
def configure_test_logging():
    """Configure logging for all tests."""
    configure_logging()


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Keep tests away from any developer cache or output directory."""
    monkeypatch.setattr(settings, "SIM_CACHE_PATH", None)
    monkeypatch.setattr(settings, "OUTPUT_PATH", str(tmp_path / "bench_output"))
    monkeypatch.setattr(settings, "MODULARITY_VARIANT", "newman")
    monkeypatch.setattr(settings, "LOUVAIN_AGGREGATE", False)
    monkeypatch.setattr(settings, "SWEEP_WORKERS", 1)


@pytest.fixture
def two_triangles() -> Graph:
    """Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3."""
    return build_graph([(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


@pytest.fixture
def path_graph() -> Graph:
    """0 - 1 - 2 - 3"""
    return build_graph([(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def four_cycle() -> Graph:
    return build_graph([(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def barbell() -> Graph:
    """Two K8 cliques, 0..7 and 8..15, joined by the edge 7-8."""
    edges = clique_edges(range(8)) + clique_edges(range(8, 16)) + [(7, 8)]
    return build_graph(edges)


@pytest.fixture
def two_pair_sim() -> SimMatrix:
    """Nodes {0,1} and {2,3} are identical within pairs and unrelated across."""
    return make_sim(4, {(0, 1): 1.0, (2, 3): 1.0})


@pytest.fixture
def sim_of():
    """Factory fixture: sim_of(size, pairs, default) -> SimMatrix."""
    return make_sim


@pytest.fixture
def random_sim_of():
    """Factory fixture: random_sim_of(size, seed) -> SimMatrix with uniform [0, 1) entries."""
    return random_sim


@pytest.fixture
def clique():
    """Factory fixture: clique(nodes) -> every edge among `nodes`."""
    return clique_edges
