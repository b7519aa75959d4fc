"""Shared test machinery: synthetic corpora, a fake API, and a fake clock."""

from __future__ import annotations

import json
import random
from pathlib import Path
from urllib.parse import parse_qsl, unquote, urlsplit

from oignon.corpus import Work, build_index
from oignon.openalex import (
    OPENALEX_PREFIX,
    ClientConfig,
    MockTransport,
    OpenAlexClient,
    TransportResponse,
    dump_snapshot,
    normalize_doi,
    normalize_work_id,
    to_api_record,
)

_AUTHOR_POOL = (
    ("A5001", "Mara Ostrom"),
    ("A5002", "Deniz Kaya"),
    ("A5003", "Piotr Hale"),
    ("A5004", "Ines Duarte"),
    ("A5005", "Ravi Menon"),
    ("A5006", "Greta Lund"),
    ("A5007", "Tomas Vela"),
    ("A5008", "June Park"),
    ("A5009", "Olaf Brandt"),
    ("A5010", "Sylvie Arnaud"),
)

_TITLE_WORDS = (
    "sparse", "citation", "retrieval", "graphs", "entropy", "kernels",
    "annealing", "consensus", "lattice", "drift", "sampling", "priors",
    "spectral", "alignment", "pruning", "embeddings",
)


class FakeClock:
    """Monotonic clock whose sleep() just advances time."""

    def __init__(self, start: float = 0.0) -> None:
        self.t = start

    def __call__(self) -> float:
        return self.t

    def sleep(self, seconds: float) -> None:
        self.t += seconds


class RecordingClock(FakeClock):
    """FakeClock that also logs each sleep duration."""

    def __init__(self, start: float = 0.0) -> None:
        super().__init__(start)
        self.sleeps: list[float] = []

    def sleep(self, seconds: float) -> None:
        self.sleeps.append(seconds)
        super().sleep(seconds)


def make_corpus(
    n: int,
    seed: int,
    unknown_year_rate: float = 0.08,
    year_range: tuple[int, int] = (1998, 2024),
) -> list[Work]:
    """Deterministic synthetic corpus: n works with chronological references.

    Later works cite earlier ones preferentially, citation counts correlate
    with in-corpus citers plus coarse noise (so ties happen), and a slice of
    works has no publication year.
    """
    rng = random.Random(seed)
    lo, hi = year_range
    ids = [f"W{i:03d}" for i in range(1, n + 1)]

    years: list[int | None] = []
    for i in range(n):
        base = hi if n == 1 else lo + round(i * (hi - lo) / (n - 1))
        year = min(hi, max(lo, base + rng.randint(-1, 1)))
        years.append(None if rng.random() < unknown_year_rate else year)

    refs: list[set[str]] = []
    for i in range(n):
        earlier = ids[:i] if years[i] is not None else [w for w in ids if w != ids[i]]
        want = rng.randint(0, min(8, len(earlier)))
        refs.append(set(rng.sample(earlier, want)) if want else set())

    citer_counts = {wid: 0 for wid in ids}
    for i in range(n):
        for r in refs[i]:
            citer_counts[r] += 1

    works: list[Work] = []
    for i, wid in enumerate(ids):
        k = rng.randint(1, 3)
        picked = rng.sample(_AUTHOR_POOL, k)
        title = " ".join(rng.sample(_TITLE_WORDS, 3)).capitalize()
        works.append(
            Work(
                id=wid,
                title=title,
                publication_year=years[i],
                doi=f"10.5555/{wid.lower()}" if i % 3 == 0 else None,
                authors=tuple(name for _, name in picked),
                global_citation_count=citer_counts[wid] * 3
                + rng.choice((0, 1, 2, 4, 7, 12, 25, 60)),
                referenced_works=frozenset(refs[i]),
                author_ids=tuple(aid for aid, _ in picked),
            )
        )
    return works


def _json_response(status: int, payload: object) -> TransportResponse:
    return TransportResponse(status, json.dumps(payload))


class FakeOpenAlexAPI:
    """Answers canonical API URLs from an in-memory corpus.

    Used as a MockTransport fallback so online-mode tests do not need one
    scripted route per request.  Listing pages come back in plain id order,
    deliberately different from the client's output ordering.
    """

    def __init__(self, works: list[Work]) -> None:
        self.works = {w.id: w for w in works}
        self.by_doi = {w.doi: w for w in works if w.doi}
        self.index = build_index(works)
        self.authors: dict[str, tuple[str, int]] = {}
        for work in works:
            for i, aid in enumerate(work.author_ids):
                name = work.authors[i] if i < len(work.authors) else aid
                count = self.authors.get(aid, (name, 0))[1]
                self.authors[aid] = (name, count + 1)

    def __call__(self, url: str) -> TransportResponse | None:
        parts = urlsplit(url)
        params = dict(parse_qsl(parts.query, keep_blank_values=True))
        path = parts.path

        if path.startswith("/works/"):
            raw = unquote(path[len("/works/") :])
            if raw.startswith("doi:"):
                work = self.by_doi.get(normalize_doi(raw[len("doi:") :]))
            else:
                work = self.works.get(normalize_work_id(raw))
            if work is None:
                return _json_response(404, {"error": "work not found"})
            return _json_response(200, to_api_record(work))

        if path == "/works":
            expr = params.get("filter", "")
            per_page = int(params.get("per-page", "25"))
            if expr.startswith("openalex_id:"):
                wanted = expr[len("openalex_id:") :].split("|")
                results = [to_api_record(self.works[w]) for w in wanted if w in self.works]
                return _json_response(200, {"results": results, "meta": {"next_cursor": None}})
            if expr.startswith("cites:"):
                members = sorted(self.index.citers_of(expr[len("cites:") :]))
                return self._page(members, params, per_page)
            if expr.startswith("author.id:"):
                aid = expr[len("author.id:") :]
                members = sorted(w.id for w in self.works.values() if aid in w.author_ids)
                return self._page(members, params, per_page)
            return _json_response(400, {"error": f"unsupported filter: {expr}"})

        if path == "/authors":
            wanted = params.get("search", "").strip().lower()
            results = [
                {"id": OPENALEX_PREFIX + aid, "display_name": name, "works_count": count}
                for aid, (name, count) in sorted(self.authors.items())
                if wanted and wanted in name.lower()
            ]
            return _json_response(200, {"results": results})

        return None

    def _page(self, member_ids: list[str], params: dict, per_page: int) -> TransportResponse:
        cursor = params.get("cursor", "*")
        offset = 0 if cursor == "*" else int(cursor[1:])
        chunk = member_ids[offset : offset + per_page]
        done = offset + per_page >= len(member_ids)
        return _json_response(
            200,
            {
                "results": [to_api_record(self.works[w]) for w in chunk],
                "meta": {"next_cursor": None if done else f"o{offset + per_page}"},
            },
        )


def write_snapshot(works: list[Work], directory: Path, name: str = "snapshot.jsonl") -> Path:
    path = Path(directory) / name
    dump_snapshot(works, path)
    return path


def offline_client(works: list[Work], directory: Path, **config_kwargs) -> OpenAlexClient:
    snapshot = write_snapshot(works, directory)
    config = ClientConfig(
        offline_snapshot=snapshot,
        cache_dir=Path(directory) / "cache",
        mailto=None,
        **config_kwargs,
    )
    return OpenAlexClient(config)


def online_client(
    works: list[Work], directory: Path, **config_kwargs
) -> tuple[OpenAlexClient, MockTransport, FakeClock]:
    """Client wired to a fake API over ``works``, with virtual time."""
    transport = MockTransport(fallback=FakeOpenAlexAPI(works))
    clock = FakeClock()
    config_kwargs.setdefault("cache_dir", Path(directory) / "cache")
    config_kwargs.setdefault("mailto", None)
    config = ClientConfig(**config_kwargs)
    client = OpenAlexClient(config, transport=transport, clock=clock, sleep=clock.sleep)
    return client, transport, clock
