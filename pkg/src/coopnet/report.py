"""Pipeline orchestration and deterministic serialization.

Everything written by :func:`run_pipeline` is byte-deterministic for
identical inputs: nodes, edges, rows and JSON keys are emitted in sorted
or release order, reals are fixed to six decimals, and undefined values
are serialized as the literal "UND" in CSV (null in JSON).
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.etree import ElementTree
from xml.sax.saxutils import escape, quoteattr

from .backbone import BackboneParams, SubCommunity, detect_subcommunities, extract_backbone, firm_overlap
from .coopetition import DensityComparison, RevenueStream, compare_revenue_stream, load_revenue_models
from .graph import CollaborationGraph, FirmFilter, build_collaboration_graph, merge_graphs
from .identity import UNAFFILIATED, canonicalize_identities, load_affiliation_map
from .ingest import CommitRecord, ValidationReport, parse_commit_log
from .metrics import EvolutionRow, density, evolution_series, homophily_report
from .slicing import POST_RELEASE, assign_release, load_releases

ALL_FORMATS = frozenset({"graphml", "dot", "csv", "json"})

MERGED_LABEL = "merged"

UND = "UND"


class ConfigError(Exception):
    """Bad run configuration (not a per-module load error)."""


@dataclass(frozen=True)
class RunConfig:
    commit_log: Path
    releases: Path
    affiliations: Path
    out_dir: Path
    firms: Path | None = None
    revenue_models: Path | None = None
    backbone: BackboneParams = field(default_factory=BackboneParams)
    community_min_size: int = 3
    time_field: str = "committer"
    formats: frozenset[str] = ALL_FORMATS
    jobs: int = 1

    def __post_init__(self):
        if not self.formats:
            raise ConfigError("format set must be non-empty")
        unknown = self.formats - ALL_FORMATS
        if unknown:
            raise ConfigError(f"unknown formats: {sorted(unknown)}")
        if self.time_field not in ("committer", "author"):
            raise ConfigError(f"invalid time field {self.time_field!r}")
        inputs = [self.commit_log, self.releases, self.affiliations, self.firms, self.revenue_models]
        for path in inputs:
            if path is not None and Path(path).resolve() == Path(self.out_dir).resolve():
                raise ConfigError("output directory must be distinct from input paths")


@dataclass
class RunResult:
    files_written: list[Path]
    summary: dict


# ---------------------------------------------------------------------------
# value formatting

def format_real(value: float | None) -> str:
    """Six fixed decimals, or the UND literal for undefined values."""
    if value is None:
        return UND
    return f"{value:.6f}"


def _csv_cell(value) -> str:
    if value is None:
        return UND
    if isinstance(value, float):
        return format_real(value)
    text = str(value)
    if any(c in text for c in ',"\n\r'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def export_metrics_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """RFC 4180 CSV with LF endings; None cells become UND."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def evolution_csv(rows: list[EvolutionRow]) -> str:
    return export_metrics_csv(["release", "nodes", "edges", "density"], rows)


def homophily_csv(rows: list[tuple[str, float | None, float | None]]) -> str:
    return export_metrics_csv(["release", "same_firm_fraction", "assortativity"], rows)


def comparisons_csv(rows: list[tuple[str, str, str, int, float | None, int, float | None]]) -> str:
    header = ["scope", "release", "stream", "n_alpha", "den_alpha", "n_beta", "den_beta"]
    return export_metrics_csv(header, rows)


# ---------------------------------------------------------------------------
# graph serialization

def export_graphml(g: CollaborationGraph) -> str:
    """GraphML with a "firm" node attribute, stable lexicographic ordering."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="firm" for="node" attr.name="firm" attr.type="string"/>',
        f'  <graph id={quoteattr(g.window)} edgedefault="undirected">',
    ]
    for node in sorted(g.firms):
        lines.append(f"    <node id={quoteattr(node)}>")
        lines.append(f'      <data key="firm">{escape(g.firms[node])}</data>')
        lines.append("    </node>")
    for u, v in sorted(g.edges):
        lines.append(f"    <edge source={quoteattr(u)} target={quoteattr(v)}/>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def read_graphml(text: str) -> CollaborationGraph:
    """Internal GraphML reader, used to check export round-trips."""
    ns = "{http://graphml.graphdrawing.org/xmlns}"
    root = ElementTree.fromstring(text)
    graph = root.find(f"{ns}graph")
    if graph is None:
        raise ValueError("no <graph> element")
    firms: dict[str, str] = {}
    edges = set()
    for node in graph.findall(f"{ns}node"):
        firm = ""
        for data in node.findall(f"{ns}data"):
            if data.get("key") == "firm":
                firm = data.text or ""
        firms[node.get("id")] = firm
    for edge in graph.findall(f"{ns}edge"):
        u, v = edge.get("source"), edge.get("target")
        edges.add((u, v) if u < v else (v, u))
    return CollaborationGraph(window=graph.get("id"), firms=firms, edges=frozenset(edges))


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: CollaborationGraph) -> str:
    """Undirected DOT with the firm as a node attribute, stable ordering."""
    lines = [f"graph {_dot_quote(g.window)} {{"]
    for node in sorted(g.firms):
        lines.append(f"  {_dot_quote(node)} [firm={_dot_quote(g.firms[node])}];")
    for u, v in sorted(g.edges):
        lines.append(f"  {_dot_quote(u)} -- {_dot_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# pipeline

def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]", "_", name)


def _load_firm_filter(text: str) -> FirmFilter:
    firms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            firms.add(line)
    if not firms:
        raise ConfigError("firm filter file lists no firms")
    return FirmFilter(firms=frozenset(firms))


def _community_payload(release: str, communities: list[SubCommunity]) -> dict:
    return {
        "release": release,
        "communities": [
            {"members": sorted(c.members), "firms": dict(sorted(c.firms.items()))}
            for c in communities
        ],
        "firm_overlap": firm_overlap(communities),
    }


@dataclass
class _WindowResult:
    graph: CollaborationGraph
    backbone: CollaborationGraph
    communities: list[SubCommunity]
    comparisons: list[DensityComparison]


def _analyze_graph(
    g: CollaborationGraph,
    streams: list[RevenueStream],
    universe: set[str],
    params: BackboneParams,
    min_size: int,
) -> _WindowResult:
    bb = extract_backbone(g, params)
    return _WindowResult(
        graph=g,
        backbone=bb,
        communities=detect_subcommunities(bb, min_size),
        comparisons=[compare_revenue_stream(g, s, universe) for s in streams],
    )


def run_pipeline(cfg: RunConfig) -> RunResult:
    """Run the full analysis and write all artifacts under cfg.out_dir.

    Raises the originating module's error on bad inputs (the CLI maps
    these to exit codes); partial outputs are removed on write failure.
    """
    log_text = Path(cfg.commit_log).read_text(encoding="utf-8")
    releases_text = Path(cfg.releases).read_text(encoding="utf-8")
    affiliations_text = Path(cfg.affiliations).read_text(encoding="utf-8")
    firms_text = Path(cfg.firms).read_text(encoding="utf-8") if cfg.firms else None
    revenue_text = (
        Path(cfg.revenue_models).read_text(encoding="utf-8") if cfg.revenue_models else None
    )

    records, report = parse_commit_log(log_text)
    windows = load_releases(releases_text)
    amap = load_affiliation_map(affiliations_text)
    identities, excluded_shas = canonicalize_identities(records, amap)
    firm_filter = _load_firm_filter(firms_text) if firms_text is not None else None

    if firm_filter is not None:
        universe = set(firm_filter.firms)
    else:
        universe = {i.firm for i in identities.values()} - {UNAFFILIATED}
    streams = load_revenue_models(revenue_text, universe) if revenue_text is not None else []

    excluded = set(excluded_shas)
    per_window: dict[str, list[CommitRecord]] = {w.name: [] for w in windows}
    post_release = 0
    analyzed = 0
    for record in records:
        if record.sha in excluded:
            continue
        label = assign_release(record.timestamp, windows)
        if label == POST_RELEASE:
            post_release += 1
        else:
            per_window[label].append(record)
            analyzed += 1

    def build_window(name: str) -> _WindowResult:
        g = build_collaboration_graph(name, per_window[name], identities, firm_filter)
        return _analyze_graph(g, streams, universe, cfg.backbone, cfg.community_min_size)

    names = [w.name for w in windows]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = dict(zip(names, pool.map(build_window, names)))
    else:
        results = {name: build_window(name) for name in names}

    window_graphs = [results[name].graph for name in names]
    merged = merge_graphs(window_graphs, MERGED_LABEL)
    merged_result = _analyze_graph(merged, streams, universe, cfg.backbone, cfg.community_min_size)

    outputs: dict[str, str] = {}

    if "graphml" in cfg.formats or "dot" in cfg.formats:
        labeled = [(f"{i:02d}_{_slug(name)}", results[name]) for i, name in enumerate(names, 1)]
        labeled.append((MERGED_LABEL, merged_result))
        for stem, result in labeled:
            if "graphml" in cfg.formats:
                outputs[f"graphs/{stem}.graphml"] = export_graphml(result.graph)
                outputs[f"backbones/{stem}.graphml"] = export_graphml(result.backbone)
            if "dot" in cfg.formats:
                outputs[f"graphs/{stem}.dot"] = export_dot(result.graph)
                outputs[f"backbones/{stem}.dot"] = export_dot(result.backbone)

    evolution = evolution_series(window_graphs)
    homophily_rows = []
    comparison_rows = []
    for name in names:
        hom = homophily_report(results[name].graph)
        homophily_rows.append((name, hom.same_firm_edge_fraction, hom.assortativity))
        for cmp in results[name].comparisons:
            comparison_rows.append(
                ("window", name, cmp.stream, cmp.n_alpha, cmp.den_alpha, cmp.n_beta, cmp.den_beta)
            )
    for cmp in merged_result.comparisons:
        comparison_rows.append(
            (MERGED_LABEL, "all", cmp.stream, cmp.n_alpha, cmp.den_alpha, cmp.n_beta, cmp.den_beta)
        )

    if "csv" in cfg.formats:
        outputs["evolution.csv"] = evolution_csv(evolution)
        outputs["homophily.csv"] = homophily_csv(homophily_rows)
        outputs["comparisons.csv"] = comparisons_csv(comparison_rows)

    summary = _build_summary(cfg, report, identities, excluded_shas, names, per_window,
                             results, merged, post_release, analyzed, universe)

    if "json" in cfg.formats:
        outputs["communities.json"] = _json_text(
            {
                "min_size": cfg.community_min_size,
                "params": {
                    "max_rank_k": cfg.backbone.max_rank_k,
                    "min_embeddedness": cfg.backbone.min_embeddedness,
                },
                "windows": [_community_payload(name, results[name].communities) for name in names]
                + [_community_payload(MERGED_LABEL, merged_result.communities)],
            }
        )
        outputs["validation_report.json"] = _json_text(
            {
                "accepted": report.accepted,
                "rejected": [[line, reason] for line, reason in report.rejected],
                "cleaned": [[sha, fix] for sha, fix in report.cleaned],
            }
        )
        outputs["run_summary.json"] = _json_text(summary)

    written: list[Path] = []
    out_dir = Path(cfg.out_dir)
    try:
        for rel_path in sorted(outputs):
            target = out_dir / rel_path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(outputs[rel_path], encoding="utf-8")
            written.append(target)
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return RunResult(files_written=written, summary=summary)


def _build_summary(
    cfg: RunConfig,
    report: ValidationReport,
    identities,
    excluded_shas: list[str],
    names: list[str],
    per_window,
    results,
    merged: CollaborationGraph,
    post_release: int,
    analyzed: int,
    universe: set[str],
) -> dict:
    return {
        "commits": {
            "accepted": report.accepted,
            "rejected": len(report.rejected),
            "excluded": len(excluded_shas),
            "post_release": post_release,
            "analyzed": analyzed,
        },
        "excluded_shas": sorted(set(excluded_shas)),
        "identities": len({i.canonical_id for i in identities.values()}),
        "firms": sorted(universe),
        "windows": [
            {
                "release": name,
                "commits": len(per_window[name]),
                "nodes": results[name].graph.node_count,
                "edges": results[name].graph.edge_count,
                "density": density(results[name].graph),
            }
            for name in names
        ],
        "merged": {
            "nodes": merged.node_count,
            "edges": merged.edge_count,
            "density": density(merged),
        },
        "backbone": {
            "max_rank_k": cfg.backbone.max_rank_k,
            "min_embeddedness": cfg.backbone.min_embeddedness,
            "community_min_size": cfg.community_min_size,
        },
        "time_field": cfg.time_field,
        "formats": sorted(cfg.formats),
    }
