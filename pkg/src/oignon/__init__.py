"""Citation graph builder with dual-path ranking and a year-grid layout."""

from .builder import (
    CitationGraph,
    Diagnostics,
    GraphConfig,
    GraphNode,
    NodeRole,
    build_author_graph,
    build_graph,
)
from .corpus import CitationIndex, Work, WorkId, build_index
from .errors import (
    EmptySnapshotError,
    InconsistentInputsError,
    NotFoundError,
    OignonError,
    RateLimitedError,
    TransportError,
    UnknownSelectionError,
)
from .export import export_document, export_dot, render_svg
from .layout import LayoutConfig, LayoutedGraph, layout_graph, radius_for, style_roles
from .openalex import (
    ClientConfig,
    FetchStats,
    MockTransport,
    OpenAlexClient,
    dump_snapshot,
    load_snapshot,
)
from .ranking import (
    BranchMetrics,
    RecencyParams,
    RootMetrics,
    rank_branch_candidate,
    rank_root_candidate,
    recency_weight,
    select_top_k,
)

__version__ = "0.1.0"

__all__ = [
    "BranchMetrics",
    "CitationGraph",
    "CitationIndex",
    "ClientConfig",
    "Diagnostics",
    "EmptySnapshotError",
    "FetchStats",
    "GraphConfig",
    "GraphNode",
    "InconsistentInputsError",
    "LayoutConfig",
    "LayoutedGraph",
    "MockTransport",
    "NodeRole",
    "NotFoundError",
    "OignonError",
    "OpenAlexClient",
    "RateLimitedError",
    "RecencyParams",
    "RootMetrics",
    "TransportError",
    "UnknownSelectionError",
    "Work",
    "WorkId",
    "build_author_graph",
    "build_graph",
    "build_index",
    "dump_snapshot",
    "export_document",
    "export_dot",
    "layout_graph",
    "load_snapshot",
    "radius_for",
    "rank_branch_candidate",
    "rank_root_candidate",
    "recency_weight",
    "render_svg",
    "select_top_k",
    "style_roles",
]
