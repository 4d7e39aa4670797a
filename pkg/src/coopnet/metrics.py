"""Cohesion and homophily measures on collaboration graphs.

Undefined values (density of a < 2 node graph, homophily of an edgeless
graph) are None, never 0 -- downstream serialization renders them as the
explicit "UND" literal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .graph import CollaborationGraph


@dataclass(frozen=True)
class GraphMetrics:
    node_count: int
    edge_count: int
    density: float | None
    degree: dict[str, int]
    normalized_degree: dict[str, float | None]


@dataclass(frozen=True)
class HomophilyReport:
    same_firm_edge_fraction: float | None
    assortativity: float | None


class EvolutionRow(NamedTuple):
    release: str
    node_count: int
    edge_count: int
    density: float | None


def density(g: CollaborationGraph) -> float | None:
    """2|E| / (|V| (|V|-1)); None when fewer than 2 nodes."""
    n = g.node_count
    if n < 2:
        return None
    return 2.0 * g.edge_count / (n * (n - 1))


def degree_centrality(g: CollaborationGraph) -> dict[str, tuple[int, float | None]]:
    """Per node: raw degree and degree/(n-1) (None when n < 2)."""
    n = g.node_count
    adj = g.neighbors()
    return {
        node: (len(nbrs), len(nbrs) / (n - 1) if n >= 2 else None)
        for node, nbrs in adj.items()
    }


def graph_metrics(g: CollaborationGraph) -> GraphMetrics:
    centrality = degree_centrality(g)
    return GraphMetrics(
        node_count=g.node_count,
        edge_count=g.edge_count,
        density=density(g),
        degree={node: deg for node, (deg, _) in centrality.items()},
        normalized_degree={node: norm for node, (_, norm) in centrality.items()},
    )


def same_firm_edge_fraction(g: CollaborationGraph) -> float | None:
    """Share of edges whose endpoints belong to the same firm; None if no edges."""
    if not g.edges:
        return None
    same = sum(1 for u, v in g.edges if g.firms[u] == g.firms[v])
    return same / len(g.edges)


def firm_assortativity(g: CollaborationGraph) -> float | None:
    """Categorical assortativity over the firm attribute.

    r = (sum_i e_ii - sum_i a_i^2) / (1 - sum_i a_i^2), where e_ii is the
    fraction of edges within firm i and a_i the fraction of edge ends in
    firm i. None when there are no edges or only one firm touches edges.
    """
    m = len(g.edges)
    if m == 0:
        return None
    within = 0
    end_counts: dict[str, int] = {}
    for u, v in g.edges:
        fu, fv = g.firms[u], g.firms[v]
        if fu == fv:
            within += 1
        end_counts[fu] = end_counts.get(fu, 0) + 1
        end_counts[fv] = end_counts.get(fv, 0) + 1
    sum_eii = within / m
    sum_ab = sum((c / (2 * m)) ** 2 for c in end_counts.values())
    denominator = 1.0 - sum_ab
    if denominator == 0.0:
        return None
    return (sum_eii - sum_ab) / denominator


def homophily_report(g: CollaborationGraph) -> HomophilyReport:
    return HomophilyReport(
        same_firm_edge_fraction=same_firm_edge_fraction(g),
        assortativity=firm_assortativity(g),
    )


def evolution_series(graphs: Iterable[CollaborationGraph]) -> list[EvolutionRow]:
    """One (release, nodes, edges, density) row per graph, in input order."""
    return [
        EvolutionRow(g.window, g.node_count, g.edge_count, density(g)) for g in graphs
    ]
