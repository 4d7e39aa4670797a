"""coopnet: firm-level collaboration network analysis over commit histories."""

from .backbone import (
    BackboneParams,
    SubCommunity,
    detect_subcommunities,
    edge_embeddedness,
    extract_backbone,
    firm_overlap,
)
from .coopetition import (
    DensityComparison,
    RevenueStream,
    compare_revenue_stream,
    load_revenue_models,
)
from .graph import (
    CollaborationGraph,
    FirmFilter,
    build_collaboration_graph,
    induced_by_firms,
    merge_graphs,
)
from .identity import (
    BOT,
    UNAFFILIATED,
    AffiliationMap,
    DeveloperIdentity,
    canonicalize_identities,
    load_affiliation_map,
    resolve_affiliation,
)
from .ingest import (
    CommitRecord,
    ValidationReport,
    convert_vcs_log,
    parse_commit_log,
    validate_commits,
)
from .metrics import (
    EvolutionRow,
    GraphMetrics,
    HomophilyReport,
    degree_centrality,
    density,
    evolution_series,
    firm_assortativity,
    graph_metrics,
    homophily_report,
    same_firm_edge_fraction,
)
from .report import RunConfig, RunResult, run_pipeline
from .slicing import ReleaseWindow, assign_release, load_releases

__version__ = "0.1.0"
