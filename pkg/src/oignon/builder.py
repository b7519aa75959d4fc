"""Assemble citation graphs around a source work or an author.

The node set for a source build follows one rule: the source itself, all
of its direct references, its direct citers up to a cap, and the top-k
ranked candidates from each direction.  Candidates come from the depth-2
frontier (references of references, citers of citers), which is the
shallowest depth at which non-seed works exist.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .corpus import CitationIndex, Work, WorkId, build_index, stub_work
from .openalex import FetchStats, OpenAlexClient
from .ranking import (
    BranchMetrics,
    Metrics,
    RecencyParams,
    RootMetrics,
    rank_branch_candidate,
    rank_root_candidate,
    select_top_k,
)

logger = logging.getLogger(__name__)

# Floor on the per-seed citer listing cap when splitting the pool budget.
MIN_CITERS_PER_SEED = 5


@dataclass(frozen=True)
class GraphConfig:
    """Build-time knobs: how many candidates to rank in and pool bounds."""

    top_roots_k: int = 20
    top_branches_k: int = 20
    branch_seed_cap: int = 100
    candidate_pool_cap: int = 2000
    recency: RecencyParams = field(default_factory=RecencyParams)

    def __post_init__(self) -> None:
        if self.top_roots_k < 0 or self.top_branches_k < 0:
            raise ValueError("top-k values must be non-negative")
        if self.branch_seed_cap < 1 or self.candidate_pool_cap < 1:
            raise ValueError("caps must be positive")


class NodeRole(enum.Enum):
    """Why a work is in the graph; one role per node, precedence left to right."""

    SOURCE = "Source"
    ROOT_SEED = "RootSeed"
    BRANCH_SEED = "BranchSeed"
    ROOT = "Root"
    BRANCH = "Branch"
    AUTHOR_WORK = "AuthorWork"


# Higher wins when a work qualifies for several roles.
_ROLE_PRECEDENCE = {
    NodeRole.SOURCE: 5,
    NodeRole.ROOT_SEED: 4,
    NodeRole.BRANCH_SEED: 3,
    NodeRole.ROOT: 2,
    NodeRole.BRANCH: 1,
    NodeRole.AUTHOR_WORK: 0,
}


@dataclass(frozen=True)
class GraphNode:
    work: Work
    role: NodeRole
    metrics: Metrics | None = None


@dataclass
class Diagnostics:
    """What got truncated or went sideways during a build."""

    fetch: FetchStats = field(default_factory=FetchStats)
    branch_seeds_truncated: bool = False
    root_pool_truncated: bool = False
    branch_pool_truncated: bool = False
    notes: list[str] = field(default_factory=list)


@dataclass
class CitationGraph:
    """Selected nodes plus every citation edge among them.

    ``edges`` holds (citer, cited) pairs; both endpoints are always nodes.
    ``source`` is None for author-mode graphs.
    """

    source: WorkId | None
    nodes: dict[WorkId, GraphNode]
    edges: set[tuple[WorkId, WorkId]]
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def role_of(self, work_id: WorkId) -> NodeRole:
        return self.nodes[work_id].role


def _ordered_truncate(
    works: dict[WorkId, Work], ids: set[WorkId], cap: int
) -> tuple[list[WorkId], bool]:
    """Deterministic pool truncation: citation count descending, id ascending."""
    ordered = sorted(ids, key=lambda i: (-(works[i].global_citation_count if i in works else 0), i))
    return ordered[:cap], len(ordered) > cap


def collect_root_candidates(
    root_seeds: list[WorkId],
    source: WorkId,
    client: OpenAlexClient,
    config: GraphConfig,
) -> tuple[list[WorkId], bool]:
    """Depth-2 backward frontier: references of the seeds, minus seeds and source."""
    seed_works, missing = (
        client.fetch_many(root_seeds) if root_seeds else ({}, [])
    )
    if missing:
        logger.info("root seeds without metadata: %d", len(missing))
    pool: set[WorkId] = set()
    for seed in root_seeds:
        work = seed_works.get(seed)
        if work is not None:
            pool |= work.referenced_works
    pool -= set(root_seeds)
    pool.discard(source)
    if not pool:
        return [], False
    fetched, _ = client.fetch_many(pool)
    return _ordered_truncate(fetched, pool, config.candidate_pool_cap)


def collect_branch_candidates(
    branch_seeds: list[WorkId],
    source: WorkId,
    client: OpenAlexClient,
    config: GraphConfig,
) -> tuple[list[WorkId], bool]:
    """Depth-2 forward frontier: citers of the capped citers.

    The per-seed listing budget splits the pool cap evenly with a floor of
    ``MIN_CITERS_PER_SEED`` so a large seed set cannot starve each listing.
    """
    if not branch_seeds:
        return [], False
    per_seed_cap = max(MIN_CITERS_PER_SEED, config.candidate_pool_cap // len(branch_seeds))
    pool_works: dict[WorkId, Work] = {}
    for seed in branch_seeds:
        for work in client.fetch_citers(seed, cap=per_seed_cap):
            pool_works[work.id] = work
    for excluded in (*branch_seeds, source):
        pool_works.pop(excluded, None)
    ids, truncated = _ordered_truncate(
        pool_works, set(pool_works), config.candidate_pool_cap
    )
    return ids, truncated


def _edges_among(nodes: dict[WorkId, GraphNode]) -> set[tuple[WorkId, WorkId]]:
    """Citation links restricted to the node set, both directions checked."""
    edges: set[tuple[WorkId, WorkId]] = set()
    for wid, node in nodes.items():
        for ref in node.work.referenced_works:
            if ref in nodes:
                edges.add((wid, ref))
    return edges


def _assign(
    nodes: dict[WorkId, GraphNode],
    work: Work,
    role: NodeRole,
    metrics: Metrics | None = None,
) -> None:
    existing = nodes.get(work.id)
    if existing is not None and _ROLE_PRECEDENCE[existing.role] >= _ROLE_PRECEDENCE[role]:
        return
    nodes[work.id] = GraphNode(work=work, role=role, metrics=metrics)


def build_graph(
    source_id: str,
    config: GraphConfig,
    client: OpenAlexClient,
) -> CitationGraph:
    """Build the ranked citation graph around one source publication."""
    source = client.resolve_work(source_id)
    diagnostics = Diagnostics(fetch=client.stats)

    root_seeds = sorted(source.referenced_works)
    seed_works: dict[WorkId, Work] = {}
    if root_seeds:
        seed_works, missing_seeds = client.fetch_many(root_seeds)
        for wid in missing_seeds:
            # Direct references always become nodes, metadata or not.
            seed_works[wid] = stub_work(wid)
            diagnostics.notes.append(f"reference {wid} has no fetchable metadata")

    before = client.stats.truncated_listings
    branch_seed_works = client.fetch_citers(source.id, cap=config.branch_seed_cap)
    diagnostics.branch_seeds_truncated = client.stats.truncated_listings > before
    branch_seeds = [w.id for w in branch_seed_works]

    root_pool, diagnostics.root_pool_truncated = collect_root_candidates(
        root_seeds, source.id, client, config
    )
    branch_pool, diagnostics.branch_pool_truncated = collect_branch_candidates(
        branch_seeds, source.id, client, config
    )

    # Rank within everything this client has materialised; offline that is
    # the whole snapshot corpus.
    index = build_index(client.known_works().values())

    excluded = set(root_seeds) | {source.id}
    root_metrics = [
        rank_root_candidate(c, root_seeds, index)
        for c in root_pool
        if c not in excluded
    ]
    top_roots = select_top_k(root_metrics, config.top_roots_k, index)

    branch_metrics = [
        rank_branch_candidate(c, branch_seeds, source.id, index, config.recency)
        for c in branch_pool
        if c != source.id
    ]
    top_branches = select_top_k(branch_metrics, config.top_branches_k, index)

    nodes: dict[WorkId, GraphNode] = {}
    for metrics in top_branches:
        _assign(nodes, _work_for(index, metrics.candidate), NodeRole.BRANCH, metrics)
    for metrics in top_roots:
        _assign(nodes, _work_for(index, metrics.candidate), NodeRole.ROOT, metrics)
    for work in branch_seed_works:
        _assign(nodes, work, NodeRole.BRANCH_SEED)
    for wid in root_seeds:
        _assign(nodes, seed_works[wid], NodeRole.ROOT_SEED)
    _assign(nodes, source, NodeRole.SOURCE)

    return CitationGraph(
        source=source.id,
        nodes=nodes,
        edges=_edges_among(nodes),
        diagnostics=diagnostics,
    )


def _work_for(index: CitationIndex, work_id: WorkId) -> Work:
    work = index.works.get(work_id)
    return work if work is not None else stub_work(work_id)


def build_author_graph(
    author: str,
    config: GraphConfig,
    client: OpenAlexClient,
) -> CitationGraph:
    """Graph of one author's works and the citation links among them.

    No ranking runs in this mode; every node carries the AuthorWork role
    and the graph has no source.
    """
    works = client.fetch_author_works(author)
    diagnostics = Diagnostics(fetch=client.stats, notes=list(client.diagnostics))
    nodes = {w.id: GraphNode(work=w, role=NodeRole.AUTHOR_WORK) for w in works}
    return CitationGraph(
        source=None,
        nodes=nodes,
        edges=_edges_among(nodes),
        diagnostics=diagnostics,
    )
