"""Simmelian backbone extraction and sub-community detection.

The strength of a tie is its embeddedness: the number of triangles the
edge participates in. The backbone keeps an edge only when it is strongly
embedded and reciprocally among both endpoints' top-k strongest ties.
Sub-communities are the backbone's connected components above a minimum
size.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .graph import CollaborationGraph, Edge


@dataclass(frozen=True)
class BackboneParams:
    max_rank_k: int = 5
    min_embeddedness: int = 1

    def __post_init__(self):
        if self.max_rank_k < 1:
            raise ValueError("max_rank_k must be >= 1")
        if self.min_embeddedness < 0:
            raise ValueError("min_embeddedness must be >= 0")


@dataclass(frozen=True)
class SubCommunity:
    members: frozenset[str]
    firms: Counter  # firm -> member count


def edge_embeddedness(g: CollaborationGraph) -> dict[Edge, int]:
    """Triangle count per edge: |N(u) & N(v)| for each edge {u, v}."""
    adj = g.neighbors()
    return {(u, v): len(adj[u] & adj[v]) for u, v in g.edges}


def extract_backbone(g: CollaborationGraph, params: BackboneParams) -> CollaborationGraph:
    """Keep edges that pass the embeddedness floor and the reciprocal top-k rule.

    Each node ranks its incident edges by embeddedness descending, ties
    broken by lexicographic neighbor id; an edge survives only if each
    endpoint ranks the other within the top max_rank_k. The node set is
    preserved.
    """
    embeddedness = edge_embeddedness(g)
    adj = g.neighbors()
    top: dict[str, set[str]] = {}
    for node, nbrs in adj.items():
        ranked = sorted(
            nbrs,
            key=lambda other: (-embeddedness[_edge(node, other)], other),
        )
        top[node] = set(ranked[: params.max_rank_k])
    kept = frozenset(
        (u, v)
        for (u, v), strength in embeddedness.items()
        if strength >= params.min_embeddedness and v in top[u] and u in top[v]
    )
    return CollaborationGraph(window=g.window, firms=dict(g.firms), edges=kept)


def detect_subcommunities(
    backbone: CollaborationGraph, min_size: int = 3
) -> list[SubCommunity]:
    """Connected components of the backbone with at least min_size members.

    Sorted by size descending, then by lexicographically smallest member.
    """
    adj = backbone.neighbors()
    seen: set[str] = set()
    communities = []
    for start in sorted(adj):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for other in adj[node]:
                if other not in component:
                    component.add(other)
                    frontier.append(other)
        seen |= component
        if len(component) >= min_size:
            communities.append(
                SubCommunity(
                    members=frozenset(component),
                    firms=Counter(backbone.firms[m] for m in component),
                )
            )
    communities.sort(key=lambda c: (-len(c.members), min(c.members)))
    return communities


def firm_overlap(communities: list[SubCommunity]) -> dict[str, int]:
    """How many communities each firm appears in (absent firms omitted)."""
    counts: dict[str, int] = {}
    for community in communities:
        for firm in community.firms:
            counts[firm] = counts.get(firm, 0) + 1
    return counts


def _edge(u: str, v: str) -> Edge:
    return (u, v) if u < v else (v, u)
