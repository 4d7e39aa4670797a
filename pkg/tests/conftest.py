from __future__ import annotations

from pathlib import Path

import pytest

from coopnet.graph import CollaborationGraph

FIXTURE_DIR = Path(__file__).parent / "data" / "fixture"
GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


def make_graph(firms: dict[str, str], edges=(), window: str = "w") -> CollaborationGraph:
    """Build a graph directly from a node->firm map and edge pairs."""
    normalized = frozenset(tuple(sorted(e)) for e in edges)
    for u, v in normalized:
        assert u in firms and v in firms, "edge endpoint missing from node map"
        assert u != v, "self-loop in test input"
    return CollaborationGraph(window=window, firms=dict(firms), edges=normalized)


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR
