"""Publication records and the citation index that ranking metrics query.

A :class:`CitationIndex` stores both directions of every citation edge:
``backward`` maps a work to its references, ``forward`` maps a work to the
works citing it.  The forward map is always the exact transpose of the
backward map, so co-citation and shared-reference counts can be answered
with set operations instead of corpus scans.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

# OpenAlex-style opaque identifier, e.g. "W2741809807".  Plain strings keep
# equality and lexicographic ordering (used for deterministic tie-breaks).
WorkId = str

_EMPTY: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Work:
    """One publication with the metadata the pipeline consumes.

    ``referenced_works`` is normalised on construction: duplicates collapse
    and a self-reference is dropped rather than rejected, since upstream
    records occasionally contain both.
    """

    id: WorkId
    title: str = ""
    publication_year: int | None = None
    doi: str | None = None
    authors: tuple[str, ...] = ()
    global_citation_count: int = 0
    referenced_works: frozenset[WorkId] = _EMPTY
    author_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("work id must be non-empty")
        if self.global_citation_count < 0:
            raise ValueError(f"negative citation count for {self.id}")
        refs = frozenset(self.referenced_works) - {self.id}
        object.__setattr__(self, "referenced_works", refs)
        object.__setattr__(self, "authors", tuple(self.authors))
        object.__setattr__(self, "author_ids", tuple(self.author_ids))


def stub_work(work_id: WorkId) -> Work:
    """Placeholder for an id seen in an edge set but never fetched."""
    return Work(id=work_id)


@dataclass(frozen=True)
class CitationIndex:
    """Immutable bidirectional citation maps over a corpus.

    Safe to share across threads once built.  Ids that appear only inside
    reference lists are tracked in ``stubs``; they participate in counting
    operations exactly like fully fetched works.
    """

    works: dict[WorkId, Work] = field(default_factory=dict)
    backward: dict[WorkId, frozenset[WorkId]] = field(default_factory=dict)
    forward: dict[WorkId, frozenset[WorkId]] = field(default_factory=dict)
    stubs: frozenset[WorkId] = _EMPTY

    def references_of(self, work_id: WorkId) -> frozenset[WorkId]:
        return self.backward.get(work_id, _EMPTY)

    def citers_of(self, work_id: WorkId) -> frozenset[WorkId]:
        return self.forward.get(work_id, _EMPTY)

    def citation_count(self, work_id: WorkId) -> int:
        work = self.works.get(work_id)
        return work.global_citation_count if work is not None else 0

    def year_of(self, work_id: WorkId) -> int | None:
        work = self.works.get(work_id)
        return work.publication_year if work is not None else None

    def cocitation_pairs(self, a: WorkId, b: WorkId) -> int:
        """Number of works whose bibliography contains both ``a`` and ``b``.

        Symmetric in its arguments.  Ids absent from the index simply have
        no citers and contribute zero.
        """
        return len(self.citers_of(a) & self.citers_of(b))

    def shared_references(self, a: WorkId, b: WorkId) -> int:
        """Size of the overlap between the two works' reference lists.

        Symmetric; a missing reference list counts as empty.
        """
        return len(self.references_of(a) & self.references_of(b))


def build_index(works: Iterable[Work]) -> CitationIndex:
    """Build a citation index from a corpus of works.

    Duplicate ids collapse with the last record winning.  Every reference
    target that is not itself in the corpus becomes a stub so the forward
    map stays a complete transpose of the backward map.
    """
    by_id: dict[WorkId, Work] = {}
    for work in works:
        by_id[work.id] = work

    backward: dict[WorkId, frozenset[WorkId]] = {}
    forward: dict[WorkId, set[WorkId]] = {wid: set() for wid in by_id}
    stubs: set[WorkId] = set()

    for wid, work in by_id.items():
        backward[wid] = work.referenced_works
        for ref in work.referenced_works:
            if ref not in by_id:
                stubs.add(ref)
            forward.setdefault(ref, set()).add(wid)

    frozen_forward = {wid: frozenset(citers) for wid, citers in forward.items()}
    return CitationIndex(
        works=by_id,
        backward=backward,
        forward=frozen_forward,
        stubs=frozenset(stubs),
    )
