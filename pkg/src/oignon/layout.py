"""Deterministic year-grid placement.

Every node lands on a row for its publication year, newest year in the
top row and gap years compressed away (the tick list keeps the axis
readable).  Within a row, better-ranked nodes sit closer to the centre
column, alternating right and left.  No physics, no randomness: the same
graph always lays out to the same coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .builder import CitationGraph, NodeRole
from .corpus import WorkId
from .errors import UnknownSelectionError

# Style tokens consumed by the exporters and the viewer.
TOKEN_SOURCE = "source-grey"
TOKEN_SELECTED = "selected-yellow"
TOKEN_RELATED = "related-green"
TOKEN_DEFAULT = "default"


@dataclass(frozen=True)
class LayoutConfig:
    row_height: float = 60.0
    column_width: float = 48.0
    radius_min: float = 4.0
    radius_max: float = 24.0
    unknown_year_row: str = "bottom"

    def __post_init__(self) -> None:
        if self.row_height <= 0 or self.column_width <= 0:
            raise ValueError("row_height and column_width must be positive")
        if not 0 < self.radius_min < self.radius_max:
            raise ValueError("need 0 < radius_min < radius_max")
        if self.unknown_year_row != "bottom":
            raise ValueError("only bottom placement of the unknown-year row is supported")


@dataclass(frozen=True)
class PositionedNode:
    id: WorkId
    x: float
    y: float
    radius: float
    year: int | None


@dataclass(frozen=True)
class Bounds:
    min_x: float
    min_y: float
    max_x: float
    max_y: float


@dataclass(frozen=True)
class LayoutedGraph:
    nodes: tuple[PositionedNode, ...]
    edges: tuple[tuple[WorkId, WorkId], ...]
    year_ticks: tuple[tuple[int | None, float], ...]
    bounds: Bounds

    def node_ids(self) -> frozenset[WorkId]:
        return frozenset(n.id for n in self.nodes)


def radius_for(citation_count: int, counts_max: int, config: LayoutConfig) -> float:
    """Circle radius for a citation count, log-scaled into the radius band.

    Citation counts span orders of magnitude; a linear scale would make
    everything but the top node invisible.  Anchors are exact: zero maps
    to ``radius_min`` and ``counts_max`` maps to ``radius_max``.
    """
    if counts_max < 1:
        raise ValueError("counts_max must be >= 1")
    span = config.radius_max - config.radius_min
    scale = math.log1p(citation_count) / math.log1p(counts_max)
    return config.radius_min + span * min(scale, 1.0)


def _row_sort_key(graph: CitationGraph, work_id: WorkId):
    node = graph.nodes[work_id]
    rank = node.metrics.total_rank if node.metrics is not None else math.inf
    return (
        0 if node.role is NodeRole.SOURCE else 1,
        -rank,
        -node.work.global_citation_count,
        work_id,
    )


def _alternating_offsets(n: int) -> list[int]:
    """0, +1, -1, +2, -2, ... for n slots."""
    offsets = [0]
    step = 1
    while len(offsets) < n:
        offsets.append(step)
        if len(offsets) < n:
            offsets.append(-step)
        step += 1
    return offsets[:n]


def layout_graph(graph: CitationGraph, config: LayoutConfig | None = None) -> LayoutedGraph:
    """Place every graph node on the year grid.

    Pure function of its inputs; raises ValueError on an empty graph.
    """
    if config is None:
        config = LayoutConfig()
    if not graph.nodes:
        raise ValueError("cannot lay out an empty graph")

    counts_max = max(
        (n.work.global_citation_count for n in graph.nodes.values()), default=0
    )
    counts_max = max(counts_max, 1)

    by_year: dict[int | None, list[WorkId]] = {}
    for wid, node in graph.nodes.items():
        by_year.setdefault(node.work.publication_year, []).append(wid)

    known_years = sorted((y for y in by_year if y is not None), reverse=True)
    rows: list[int | None] = list(known_years)
    if None in by_year:
        rows.append(None)

    positioned: list[PositionedNode] = []
    ticks: list[tuple[int | None, float]] = []
    for row_index, year in enumerate(rows):
        y = row_index * config.row_height
        ticks.append((year, y))
        members = sorted(by_year[year], key=lambda w: _row_sort_key(graph, w))
        for wid, offset in zip(members, _alternating_offsets(len(members))):
            work = graph.nodes[wid].work
            positioned.append(
                PositionedNode(
                    id=wid,
                    x=offset * config.column_width,
                    y=y,
                    radius=radius_for(work.global_citation_count, counts_max, config),
                    year=year,
                )
            )

    if config.column_width >= 2 * config.radius_max:
        _assert_no_row_overlap(positioned, config)

    bounds = Bounds(
        min_x=min(n.x - n.radius for n in positioned),
        min_y=min(n.y - n.radius for n in positioned),
        max_x=max(n.x + n.radius for n in positioned),
        max_y=max(n.y + n.radius for n in positioned),
    )
    edges = tuple(sorted(graph.edges))
    return LayoutedGraph(
        nodes=tuple(positioned),
        edges=edges,
        year_ticks=tuple(ticks),
        bounds=bounds,
    )


def _assert_no_row_overlap(nodes: list[PositionedNode], config: LayoutConfig) -> None:
    rows: dict[float, list[float]] = {}
    for node in nodes:
        rows.setdefault(node.y, []).append(node.x)
    for xs in rows.values():
        xs.sort()
        for left, right in zip(xs, xs[1:]):
            if right - left < 2 * config.radius_max:
                raise AssertionError("row overlap despite adequate column width")


def style_roles(
    graph: CitationGraph, selected: WorkId | None = None
) -> dict[WorkId, str]:
    """Map every node to its fill token.

    Precedence: selection beats the source colour, which beats the green
    neighbourhood highlight, which beats the default.  The neighbourhood
    of the selection is read off the graph's edge list in both directions.
    """
    if selected is not None and selected not in graph.nodes:
        raise UnknownSelectionError(f"{selected} is not a node of this graph")

    related: set[WorkId] = set()
    if selected is not None:
        for citer, cited in graph.edges:
            if citer == selected:
                related.add(cited)
            elif cited == selected:
                related.add(citer)

    styles: dict[WorkId, str] = {}
    for wid, node in graph.nodes.items():
        if wid == selected:
            styles[wid] = TOKEN_SELECTED
        elif node.role is NodeRole.SOURCE:
            styles[wid] = TOKEN_SOURCE
        elif wid in related:
            styles[wid] = TOKEN_RELATED
        else:
            styles[wid] = TOKEN_DEFAULT
    return styles
