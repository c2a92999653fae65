"""Shared fixtures: tiny closed-form graphs and the bundled data files."""

from pathlib import Path

import numpy as np
import pytest

from heatlab import assemble, build_graph

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(np.uint64(0))


@pytest.fixture
def single_edge():
    """Two vertices, b=1, m=1, c=0; eigenvalues {0, 2}."""
    return build_graph(["1", "2"], [("1", "2", 1.0)])


@pytest.fixture
def single_edge_op(single_edge):
    return assemble(single_edge)


@pytest.fixture
def path3():
    return build_graph(["1", "2", "3"], [("1", "2", 1.0), ("2", "3", 1.0)])


@pytest.fixture
def path3_killed():
    """Path with a killing term at the first vertex; gapped, E0 > 0."""
    return build_graph(["1", "2", "3"],
                       [("1", "2", 1.0), ("2", "3", 1.0)],
                       c=[5.0, 0.0, 0.0])


@pytest.fixture
def k4():
    verts = ["a", "b", "c", "d"]
    edges = [(u, v, 1.0) for i, u in enumerate(verts)
             for v in verts[i + 1:]]
    return build_graph(verts, edges)


@pytest.fixture
def two_triangles():
    verts = ["a", "b", "c", "d", "e", "f"]
    edges = [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0),
             ("d", "e", 1.0), ("e", "f", 1.0), ("d", "f", 1.0)]
    return build_graph(verts, edges)


@pytest.fixture
def data_dir():
    return DATA
