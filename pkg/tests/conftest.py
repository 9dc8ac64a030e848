"""
Shared fixtures for the fourcycle test suites.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from modules.graph.layered import LayeredGraph, MatrixId, Op, UpdateEvent  # noqa: E402
from modules.graph.reduction import GeneralUpdate  # noqa: E402
from modules.params.thresholds import Thresholds  # noqa: E402


def ins(u, v):
    return GeneralUpdate(Op.INSERT, u, v)


def rem(u, v):
    return GeneralUpdate(Op.DELETE, u, v)


def ev(op, matrix, a, b):
    return UpdateEvent(Op(op), MatrixId[matrix], a, b)


@pytest.fixture
def square_stream():
    """The 4-cycle 0-1-2-3, closed by the last insert."""
    return [ins(0, 1), ins(1, 2), ins(2, 3), ins(3, 0)]


@pytest.fixture
def k4_stream():
    """All six edges of K4, which holds three 4-cycles."""
    return [ins(u, v) for u in range(4) for v in range(u + 1, 4)]


@pytest.fixture
def canon_graph():
    """
    Two 3-paths 0 -> w -> 0 -> 0 through w = 0 and w = 1, plus a dangling B edge.
    """
    g = LayeredGraph()
    for event in [
        ev("+", "A", 0, 0), ev("+", "A", 0, 1),
        ev("+", "B", 0, 0), ev("+", "B", 1, 0), ev("+", "B", 1, 1),
        ev("+", "C", 0, 0),
    ]:
        g.apply(event)
    return g


@pytest.fixture
def small_thresholds():
    """Hand-sized thresholds that put hubs of a few vertices into every class."""
    return Thresholds(
        m_hat=0,
        tiny=1,
        medium=2,
        high=4,
        chunk_size=4,
        chunk_sparse=2,
        phase_size=20,
        per_update_budget=10**6,
    )
