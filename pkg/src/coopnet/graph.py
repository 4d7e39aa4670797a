"""Per-window collaboration graphs.

Developers are nodes (carrying their firm), and an undirected, unweighted
edge connects two developers iff they modified at least one common file
within the window. Graphs are simple: no self-loops, no duplicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .identity import DeveloperIdentity
from .ingest import CommitRecord

Edge = tuple[str, str]  # canonical ids, lexicographically ordered


class GraphError(Exception):
    pass


@dataclass(frozen=True)
class FirmFilter:
    firms: frozenset[str]

    def __post_init__(self):
        if not self.firms:
            raise GraphError("firm filter must be non-empty")


@dataclass(frozen=True)
class CollaborationGraph:
    window: str
    firms: dict[str, str] = field(default_factory=dict)  # node id -> firm
    edges: frozenset[Edge] = frozenset()

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.firms)

    @property
    def node_count(self) -> int:
        return len(self.firms)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {node: set() for node in self.firms}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def make_edge(u: str, v: str) -> Edge:
    if u == v:
        raise GraphError(f"self-loop on {u}")
    return (u, v) if u < v else (v, u)


def build_collaboration_graph(
    window: str,
    records: Iterable[CommitRecord],
    identities: dict[str, DeveloperIdentity],
    firm_filter: FirmFilter | None = None,
) -> CollaborationGraph:
    """Build the collaboration graph for one release window.

    Records whose author is not in ``identities`` (bots, unresolvable
    emails) are skipped. With a firm filter, developers outside the
    filtered firms are dropped entirely, nodes and edges both. Isolated
    contributors remain nodes.
    """
    firms: dict[str, str] = {}
    touched: dict[str, set[str]] = {}  # file -> node ids
    for record in records:
        identity = identities.get(record.author_email)
        if identity is None:
            continue
        if firm_filter is not None and identity.firm not in firm_filter.firms:
            continue
        node = identity.canonical_id
        firms[node] = identity.firm
        for path in record.files:
            touched.setdefault(path, set()).add(node)
    edges: set[Edge] = set()
    for devs in touched.values():
        ordered = sorted(devs)
        for i, u in enumerate(ordered):
            for v in ordered[i + 1 :]:
                edges.add((u, v))
    return CollaborationGraph(window=window, firms=firms, edges=frozenset(edges))


def induced_by_firms(g: CollaborationGraph, firms: set[str]) -> CollaborationGraph:
    """Node-induced subgraph on developers whose firm is in ``firms``."""
    if not firms:
        raise GraphError("induced_by_firms requires a non-empty firm set")
    kept = {node: firm for node, firm in g.firms.items() if firm in firms}
    edges = frozenset(e for e in g.edges if e[0] in kept and e[1] in kept)
    return CollaborationGraph(window=g.window, firms=kept, edges=edges)


def merge_graphs(graphs: Iterable[CollaborationGraph], window: str = "merged") -> CollaborationGraph:
    """Union of nodes and edges across windows (firms must agree per node)."""
    firms: dict[str, str] = {}
    edges: set[Edge] = set()
    for g in graphs:
        for node, firm in g.firms.items():
            if firms.setdefault(node, firm) != firm:
                raise GraphError(f"node {node} has conflicting firms across windows")
        edges.update(g.edges)
    return CollaborationGraph(window=window, firms=firms, edges=frozenset(edges))
