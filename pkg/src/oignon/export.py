"""Serialize layouted graphs: canonical JSON document, DOT, and SVG.

Exports are byte-deterministic: keys appear in a fixed order, node and
edge lists are sorted, and every real number is rendered with exactly six
decimal digits.  Given the same graph and a frozen build timestamp, two
exports compare equal byte for byte on any platform.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

from .builder import CitationGraph, GraphConfig, NodeRole
from .corpus import WorkId
from .errors import InconsistentInputsError
from .layout import (
    TOKEN_DEFAULT,
    TOKEN_RELATED,
    TOKEN_SELECTED,
    TOKEN_SOURCE,
    LayoutConfig,
    LayoutedGraph,
)
from .ranking import BranchMetrics, RootMetrics

SCHEMA_VERSION = 1

# Single source of truth for fill colours; the viewer's token table is
# generated from this mapping.
COLORS = {
    TOKEN_SOURCE: "#4a4a4a",
    TOKEN_SELECTED: "#f5e6a3",
    TOKEN_RELATED: "#7bc47f",
    TOKEN_DEFAULT: "#cfd8dc",
}

_SVG_MARGIN_LEFT = 80.0  # room for year tick labels
_SVG_MARGIN = 40.0


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _canonical_json(value: object) -> str:
    """JSON with insertion-ordered keys and fixed-precision reals."""
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = (
            json.dumps(str(k), ensure_ascii=False) + ":" + _canonical_json(v)
            for k, v in value.items()
        )
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _metrics_payload(metrics: RootMetrics | BranchMetrics | None) -> dict | None:
    if metrics is None:
        return None
    if isinstance(metrics, RootMetrics):
        return {
            "kind": "root",
            "cited_count": metrics.cited_count,
            "cocited_count": metrics.cocited_count,
            "cociting_count": metrics.cociting_count,
            "total_rank": metrics.total_rank,
        }
    return {
        "kind": "branch",
        "citing_count": metrics.citing_count,
        "cociting_count": metrics.cociting_count,
        "weighted_cocited": metrics.weighted_cocited,
        "total_rank": metrics.total_rank,
    }


def format_built_at(moment: datetime | None = None) -> str:
    if moment is None:
        moment = datetime.now(timezone.utc)
    return moment.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def export_document(
    layouted: LayoutedGraph,
    graph: CitationGraph,
    graph_config: GraphConfig | None = None,
    layout_config: LayoutConfig | None = None,
    built_at: str | None = None,
) -> bytes:
    """Render the canonical graph document as UTF-8 bytes.

    ``built_at`` defaults to the current UTC time and is the one field
    excluded from determinism comparisons; freeze it for golden tests.
    """
    if layouted.node_ids() != set(graph.nodes):
        raise InconsistentInputsError("layout and graph disagree on the node set")
    graph_config = graph_config or GraphConfig()
    layout_config = layout_config or LayoutConfig()

    node_payloads = []
    for node in sorted(layouted.nodes, key=lambda n: (n.y, n.x, n.id)):
        info = graph.nodes[node.id]
        node_payloads.append(
            {
                "id": node.id,
                "title": info.work.title,
                "year": info.work.publication_year,
                "doi": info.work.doi,
                "authors": list(info.work.authors),
                "citations": info.work.global_citation_count,
                "role": info.role.value,
                "metrics": _metrics_payload(info.metrics),
                "x": node.x,
                "y": node.y,
                "radius": node.radius,
            }
        )

    diag = graph.diagnostics
    document = {
        "schema_version": SCHEMA_VERSION,
        "source": graph.source,
        "built_at": built_at if built_at is not None else format_built_at(),
        "config": {
            "top_roots_k": graph_config.top_roots_k,
            "top_branches_k": graph_config.top_branches_k,
            "branch_seed_cap": graph_config.branch_seed_cap,
            "candidate_pool_cap": graph_config.candidate_pool_cap,
            "half_life": float(graph_config.recency.half_life),
            "reference_year": graph_config.recency.reference_year,
            "row_height": float(layout_config.row_height),
            "column_width": float(layout_config.column_width),
            "radius_min": float(layout_config.radius_min),
            "radius_max": float(layout_config.radius_max),
        },
        "nodes": node_payloads,
        "edges": [
            {"from": citer, "to": cited} for citer, cited in sorted(layouted.edges)
        ],
        "year_ticks": [
            {"year": year, "y": float(y)} for year, y in layouted.year_ticks
        ],
        "diagnostics": {
            "network_requests": diag.fetch.network_requests,
            "cache_hits": diag.fetch.cache_hits,
            "works_fetched": diag.fetch.works_fetched,
            "truncated_listings": diag.fetch.truncated_listings,
            "branch_seeds_truncated": diag.branch_seeds_truncated,
            "root_pool_truncated": diag.root_pool_truncated,
            "branch_pool_truncated": diag.branch_pool_truncated,
            "notes": list(diag.notes),
        },
    }
    return _canonical_json(document).encode("utf-8")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _node_label(graph: CitationGraph, work_id: WorkId, max_title: int = 40) -> str:
    work = graph.nodes[work_id].work
    title = work.title or work_id
    if len(title) > max_title:
        title = title[: max_title - 3] + "..."
    if work.publication_year is not None:
        return f"{title} ({work.publication_year})"
    return title


def export_dot(graph: CitationGraph) -> str:
    """Directed graph in DOT syntax, edges pointing citer to cited."""
    lines = ["digraph citations {"]
    for wid in sorted(graph.nodes):
        label = _dot_escape(_node_label(graph, wid))
        lines.append(f'  "{_dot_escape(wid)}" [label="{label}"];')
    for citer, cited in sorted(graph.edges):
        lines.append(f'  "{_dot_escape(citer)}" -> "{_dot_escape(cited)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_svg(
    layouted: LayoutedGraph,
    styles: dict[WorkId, str],
    config: LayoutConfig | None = None,
) -> str:
    """Static SVG of the layout: edge lines under role-coloured circles.

    Uses only circle, line, and text elements.  Node order and number
    formatting match the document export, so output is byte-stable.
    """
    if config is None:
        config = LayoutConfig()
    missing = [n.id for n in layouted.nodes if n.id not in styles]
    if missing:
        raise ValueError(f"styles missing for nodes: {missing[:5]}")

    b = layouted.bounds
    tx = _SVG_MARGIN_LEFT - b.min_x
    ty = _SVG_MARGIN - b.min_y
    width = (b.max_x - b.min_x) + _SVG_MARGIN_LEFT + _SVG_MARGIN
    height = (b.max_y - b.min_y) + 2 * _SVG_MARGIN

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    ]

    positions = {n.id: n for n in layouted.nodes}
    for citer, cited in sorted(layouted.edges):
        a, c = positions[citer], positions[cited]
        out.append(
            f'<line x1="{_fmt(a.x + tx)}" y1="{_fmt(a.y + ty)}" '
            f'x2="{_fmt(c.x + tx)}" y2="{_fmt(c.y + ty)}" '
            'stroke="#b0bec5" stroke-width="1.000000"/>'
        )

    for year, y in layouted.year_ticks:
        label = str(year) if year is not None else "?"
        out.append(
            f'<text x="8.000000" y="{_fmt(y + ty + 4.0)}" '
            'font-family="sans-serif" font-size="12.000000" '
            f'fill="#607d8b">{label}</text>'
        )

    for node in sorted(layouted.nodes, key=lambda n: (n.y, n.x, n.id)):
        fill = COLORS[styles[node.id]]
        out.append(
            f'<circle cx="{_fmt(node.x + tx)}" cy="{_fmt(node.y + ty)}" '
            f'r="{_fmt(node.radius)}" fill="{fill}"/>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
