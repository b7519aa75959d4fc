"""Dual-path candidate ranking.

Backward ("root") candidates are scored against the source's direct
references, forward ("branch") candidates against the source's direct
citers.  Each side's rank is a plain sum of three metrics; the branch
co-citation term is weighted by how recently each co-citing work appeared.
"""

from __future__ import annotations

import datetime
import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Union

from .corpus import CitationIndex, WorkId


def _current_year() -> int:
    return datetime.date.today().year


@dataclass(frozen=True)
class RecencyParams:
    """Parameters of the recency weighting curve.

    ``reference_year`` is the epoch ages are measured from.  It defaults to
    the current calendar year; freeze it explicitly whenever reproducible
    output matters.
    """

    half_life: float = 4.0
    reference_year: int = field(default_factory=_current_year)

    def __post_init__(self) -> None:
        if self.half_life <= 0:
            raise ValueError("half_life must be positive")


@dataclass(frozen=True)
class RootMetrics:
    """Per-candidate breakdown for the backward direction."""

    candidate: WorkId
    cocited_count: int
    cociting_count: int
    cited_count: int
    total_rank: int


@dataclass(frozen=True)
class BranchMetrics:
    """Per-candidate breakdown for the forward direction."""

    candidate: WorkId
    citing_count: int
    cociting_count: int
    weighted_cocited: float
    total_rank: float


Metrics = Union[RootMetrics, BranchMetrics]


def recency_weight(t: float, params: RecencyParams) -> float:
    """Weight for an event ``t`` years in the past: 1 + ln(1 + h / max(t, 1)).

    Constant for t <= 1, strictly decreasing beyond, approaching 1 from
    above as t grows.
    """
    clamped = max(t, 1.0)
    return 1.0 + math.log(1.0 + params.half_life / clamped)


def rank_root_candidate(
    candidate: WorkId,
    root_seeds: Iterable[WorkId],
    index: CitationIndex,
) -> RootMetrics:
    """Score a backward candidate against the seed set.

    cited_count counts seeds whose bibliography contains the candidate,
    cocited_count sums per-seed co-appearances in third-party
    bibliographies, cociting_count sums per-seed reference overlaps.
    An empty seed set yields all zeros.
    """
    cited = 0
    cocited = 0
    cociting = 0
    for seed in root_seeds:
        if candidate in index.references_of(seed):
            cited += 1
        cocited += index.cocitation_pairs(candidate, seed)
        cociting += index.shared_references(candidate, seed)
    return RootMetrics(
        candidate=candidate,
        cocited_count=cocited,
        cociting_count=cociting,
        cited_count=cited,
        total_rank=cocited + cociting + cited,
    )


def rank_branch_candidate(
    candidate: WorkId,
    branch_seeds: Iterable[WorkId],
    source: WorkId,
    index: CitationIndex,
    params: RecencyParams,
) -> BranchMetrics:
    """Score a forward candidate against the seeds and the source.

    The co-citation term sums one recency weight per work citing both the
    candidate and the source; a co-citing work of unknown year contributes
    the asymptotic floor weight of exactly 1.
    """
    citing = len(index.references_of(candidate) & frozenset(branch_seeds))
    cociting = index.shared_references(candidate, source)

    weighted = 0.0
    for cociter in index.citers_of(candidate) & index.citers_of(source):
        year = index.year_of(cociter)
        if year is None:
            weighted += 1.0
        else:
            weighted += recency_weight(params.reference_year - year, params)

    return BranchMetrics(
        candidate=candidate,
        citing_count=citing,
        cociting_count=cociting,
        weighted_cocited=weighted,
        total_rank=citing + cociting + weighted,
    )


def select_top_k(metrics: Iterable[Metrics], k: int, index: CitationIndex) -> list[Metrics]:
    """Pick the k best-ranked candidates, deterministically.

    Order: total_rank descending, then global citation count descending,
    then id ascending.  Zero-rank candidates are never selected, even when
    fewer than k remain; a rank of zero means no measured relationship.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    scored = [m for m in metrics if m.total_rank != 0]
    scored.sort(key=lambda m: (-m.total_rank, -index.citation_count(m.candidate), m.candidate))
    return scored[:k]
