"""Client for the OpenAlex works/authors API.

All network traffic funnels through a swappable transport, gets cached on
disk by canonical request URL, and is paced by a sliding-window rate
limiter.  With ``offline_snapshot`` configured the client answers every
query from a local line-delimited corpus file and never touches the
network, which is what the test suite and reproducible builds run on.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from collections import deque
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Callable, NamedTuple
from urllib.parse import parse_qsl, quote, urlencode, urlsplit, urlunsplit

import requests

from .corpus import Work, WorkId, build_index
from .errors import (
    EmptySnapshotError,
    NotFoundError,
    RateLimitedError,
    TransportError,
)

logger = logging.getLogger(__name__)

OPENALEX_PREFIX = "https://openalex.org/"
DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "http://dx.doi.org/", "doi:")

BATCH_SIZE = 50  # ids per OR-filter request
_BACKOFF_DELAYS = (1.0, 2.0, 4.0)  # seconds, on 429 and 5xx
_RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})

# Snapshot schema, one JSON object per line.  Unknown fields are ignored.
_SNAPSHOT_FIELDS = (
    "id",
    "title",
    "publication_year",
    "doi",
    "authors",
    "cited_by_count",
    "referenced_works",
    "author_ids",
)


def _default_cache_dir() -> Path:
    env = os.environ.get("OIGNON_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "oignon"


def _default_mailto() -> str | None:
    return os.environ.get("OIGNON_MAILTO") or None


@dataclass
class ClientConfig:
    """Knobs for the API client; defaults follow OpenAlex polite-pool advice."""

    base_url: str = "https://api.openalex.org"
    mailto: str | None = field(default_factory=_default_mailto)
    max_requests_per_second: float = 5.0
    max_pages_per_listing: int = 10
    page_size: int = 200
    cache_dir: Path = field(default_factory=_default_cache_dir)
    cache_ttl: timedelta = timedelta(days=30)
    offline_snapshot: Path | None = None
    max_concurrency: int = 4

    def __post_init__(self) -> None:
        self.base_url = self.base_url.rstrip("/")
        self.cache_dir = Path(self.cache_dir)
        if self.offline_snapshot is not None:
            self.offline_snapshot = Path(self.offline_snapshot)
        if not 1 <= self.page_size <= 200:
            raise ValueError("page_size must be within [1, 200]")
        if self.max_pages_per_listing < 1:
            raise ValueError("max_pages_per_listing must be >= 1")
        if self.max_requests_per_second <= 0:
            raise ValueError("max_requests_per_second must be positive")


@dataclass
class FetchStats:
    """Counters describing what a client did, for diagnostics and tests."""

    network_requests: int = 0
    cache_hits: int = 0
    works_fetched: int = 0
    truncated_listings: int = 0


# ---------------------------------------------------------------------------
# Identifier normalisation
# ---------------------------------------------------------------------------


def normalize_work_id(value: str) -> WorkId:
    """Strip the OpenAlex URL prefix, returning the bare key (e.g. 'W123')."""
    value = value.strip()
    if value.lower().startswith(OPENALEX_PREFIX):
        value = value[len(OPENALEX_PREFIX) :]
    return value


def normalize_doi(value: str) -> str:
    """Lowercase a DOI and strip resolver prefixes so lookups are stable."""
    doi = value.strip().lower()
    for prefix in DOI_PREFIXES:
        if doi.startswith(prefix):
            doi = doi[len(prefix) :]
            break
    return doi


def looks_like_work_id(value: str) -> bool:
    bare = normalize_work_id(value)
    return len(bare) > 1 and bare[0] in "Ww" and bare[1:].isdigit()


def looks_like_author_id(value: str) -> bool:
    bare = normalize_work_id(value)
    return len(bare) > 1 and bare[0] in "Aa" and bare[1:].isdigit()


def looks_like_doi(value: str) -> bool:
    lowered = value.strip().lower()
    return lowered.startswith(DOI_PREFIXES) or lowered.startswith("10.")


def canonical_url(url: str) -> str:
    """Rewrite a URL with sorted query parameters.

    Cache keys and the mock transport both use this form, so the order in
    which query parameters were assembled never matters.
    """
    scheme, netloc, path, query, fragment = urlsplit(url)
    params = sorted(parse_qsl(query, keep_blank_values=True))
    return urlunsplit((scheme, netloc, path, urlencode(params), fragment))


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------


def parse_api_work(record: dict) -> Work:
    """Convert one OpenAlex work record into a :class:`Work`."""
    wid = normalize_work_id(str(record["id"]))
    authorships = record.get("authorships") or []
    authors: list[str] = []
    author_ids: list[str] = []
    for entry in authorships:
        author = (entry or {}).get("author") or {}
        name = author.get("display_name")
        if name:
            authors.append(str(name))
        aid = author.get("id")
        if aid:
            author_ids.append(normalize_work_id(str(aid)))
    doi = record.get("doi")
    year = record.get("publication_year")
    return Work(
        id=wid,
        title=str(record.get("title") or record.get("display_name") or ""),
        publication_year=int(year) if year is not None else None,
        doi=normalize_doi(str(doi)) if doi else None,
        authors=tuple(authors),
        global_citation_count=int(record.get("cited_by_count") or 0),
        referenced_works=frozenset(
            normalize_work_id(str(r)) for r in record.get("referenced_works") or []
        ),
        author_ids=tuple(author_ids),
    )


def to_api_record(work: Work) -> dict:
    """Inverse of :func:`parse_api_work`; used to build fixtures and mocks."""
    authorships = []
    ids = list(work.author_ids)
    for i, name in enumerate(work.authors):
        author: dict = {"display_name": name}
        if i < len(ids):
            author["id"] = OPENALEX_PREFIX + ids[i]
        authorships.append({"author": author})
    return {
        "id": OPENALEX_PREFIX + work.id,
        "title": work.title,
        "publication_year": work.publication_year,
        "doi": "https://doi.org/" + work.doi if work.doi else None,
        "authorships": authorships,
        "cited_by_count": work.global_citation_count,
        "referenced_works": [OPENALEX_PREFIX + r for r in sorted(work.referenced_works)],
    }


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def _parse_snapshot_record(record: dict) -> Work:
    wid = record.get("id")
    if not isinstance(wid, str) or not wid:
        raise ValueError("missing or invalid id")
    year = record.get("publication_year")
    if year is not None and not isinstance(year, int):
        raise ValueError("publication_year must be an integer or null")
    refs = record.get("referenced_works", [])
    if not isinstance(refs, list):
        raise ValueError("referenced_works must be a list")
    authors = record.get("authors", [])
    author_ids = record.get("author_ids", [])
    if not isinstance(authors, list) or not isinstance(author_ids, list):
        raise ValueError("authors and author_ids must be lists")
    count = record.get("cited_by_count", 0)
    if not isinstance(count, int) or count < 0:
        raise ValueError("cited_by_count must be a non-negative integer")
    doi = record.get("doi")
    return Work(
        id=wid,
        title=str(record.get("title") or ""),
        publication_year=year,
        doi=normalize_doi(str(doi)) if doi else None,
        authors=tuple(str(a) for a in authors),
        global_citation_count=count,
        referenced_works=frozenset(str(r) for r in refs),
        author_ids=tuple(str(a) for a in author_ids),
    )


def load_snapshot(path: Path | str) -> list[Work]:
    """Read a line-delimited corpus file.

    Malformed lines are skipped with a warning instead of failing the load;
    a file with zero valid records raises :class:`EmptySnapshotError`.
    """
    path = Path(path)
    works: list[Work] = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                works.append(_parse_snapshot_record(record))
            except (ValueError, TypeError) as exc:
                skipped += 1
                logger.warning("snapshot %s line %d skipped: %s", path, lineno, exc)
    if skipped:
        logger.warning("snapshot %s: %d malformed line(s) skipped", path, skipped)
    if not works:
        raise EmptySnapshotError(f"no valid records in {path}")
    return works


def dump_snapshot(works: Iterable[Work], path: Path | str) -> None:
    """Write works as snapshot lines; inverse of :func:`load_snapshot`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for work in works:
            record = {
                "id": work.id,
                "title": work.title,
                "publication_year": work.publication_year,
                "doi": work.doi,
                "authors": list(work.authors),
                "cited_by_count": work.global_citation_count,
                "referenced_works": sorted(work.referenced_works),
                "author_ids": list(work.author_ids),
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Transports
# ---------------------------------------------------------------------------


class TransportResponse(NamedTuple):
    status: int
    body: str


class HttpTransport:
    """Thin wrapper over ``requests``; everything above it is transport-agnostic."""

    def __init__(self, timeout: float = 30.0) -> None:
        self._timeout = timeout
        self._session = requests.Session()

    def get(self, url: str) -> TransportResponse:
        try:
            resp = self._session.get(url, timeout=self._timeout)
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        return TransportResponse(resp.status_code, resp.text)


class MockTransport:
    """Scripted in-memory transport for tests and offline development.

    Routes are keyed by canonical URL.  Each route holds a queue of
    responses; the last one repeats once the queue drains, which makes
    scripting a 429-then-200 sequence a one-liner.  A ``fallback``
    callable, when given, answers any URL without a scripted route.
    """

    def __init__(self, fallback: Callable[[str], TransportResponse | None] | None = None) -> None:
        self.requests: list[str] = []
        self._routes: dict[str, list[TransportResponse]] = {}
        self._fallback = fallback

    def add(self, url: str, *responses: TransportResponse) -> None:
        self._routes.setdefault(canonical_url(url), []).extend(responses)

    def add_json(self, url: str, payload: object, status: int = 200) -> None:
        self.add(url, TransportResponse(status, json.dumps(payload)))

    def get(self, url: str) -> TransportResponse:
        key = canonical_url(url)
        self.requests.append(key)
        queue = self._routes.get(key)
        if queue:
            return queue.pop(0) if len(queue) > 1 else queue[0]
        if self._fallback is not None:
            response = self._fallback(key)
            if response is not None:
                return response
        return TransportResponse(404, json.dumps({"error": "no such route"}))

    @property
    def request_count(self) -> int:
        return len(self.requests)


# ---------------------------------------------------------------------------
# Rate limiting and caching
# ---------------------------------------------------------------------------


class RateLimiter:
    """Sliding one-second window limiter, safe under concurrent acquire()."""

    def __init__(
        self,
        max_per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self._max = max_per_second
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self._max:
                    self._stamps.append(now)
                    return
                wait = 1.0 - (now - self._stamps[0])
            self._sleep(max(wait, 0.001))


class ResponseCache:
    """One file per canonical URL under ``cache_dir``; trivially inspectable.

    The stored body is returned verbatim on a hit, so cached and fresh
    responses are byte-identical.
    """

    def __init__(self, cache_dir: Path, ttl: timedelta) -> None:
        self._dir = cache_dir
        self._ttl = ttl.total_seconds()
        self._lock = threading.Lock()

    def _path_for(self, url: str) -> Path:
        digest = hashlib.sha256(canonical_url(url).encode("utf-8")).hexdigest()
        return self._dir / f"{digest}.json"

    def get_fresh(self, url: str, now: float | None = None) -> str | None:
        path = self._path_for(url)
        try:
            with open(path, encoding="utf-8") as fh:
                envelope = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if now is None:
            now = time.time()
        if now - float(envelope.get("fetched_at", 0)) > self._ttl:
            return None
        body = envelope.get("body")
        return body if isinstance(body, str) else None

    def put(self, url: str, body: str, now: float | None = None) -> None:
        envelope = {
            "url": canonical_url(url),
            "fetched_at": time.time() if now is None else now,
            "body": body,
        }
        path = self._path_for(url)
        with self._lock:
            self._dir.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(envelope), encoding="utf-8")
            tmp.replace(path)


# ---------------------------------------------------------------------------
# Client
# ---------------------------------------------------------------------------


class OpenAlexClient:
    """Fetch works, citers, and author listings, online or from a snapshot.

    Listing results are re-sorted client-side (citation count descending,
    then id ascending) because upstream ordering is not stable for ties and
    downstream golden tests need determinism.
    """

    def __init__(
        self,
        config: ClientConfig | None = None,
        transport=None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config or ClientConfig()
        self.stats = FetchStats()
        self.diagnostics: list[str] = []
        self._sleep = sleep
        self._works: dict[WorkId, Work] = {}
        self._doi_index: dict[str, WorkId] = {}
        self._lock = threading.Lock()
        self._offline_index = None

        if self.config.offline_snapshot is not None:
            self._transport = None
            self._cache = None
            self._rate = None
            for work in load_snapshot(self.config.offline_snapshot):
                self._remember(work)
            self._offline_index = build_index(self._works.values())
        else:
            self._transport = transport or HttpTransport()
            self._cache = ResponseCache(self.config.cache_dir, self.config.cache_ttl)
            self._rate = RateLimiter(
                self.config.max_requests_per_second, clock=clock, sleep=sleep
            )

    @property
    def offline(self) -> bool:
        return self._offline_index is not None

    def known_works(self) -> dict[WorkId, Work]:
        """Every work materialised so far; the ranking universe for builds."""
        with self._lock:
            return dict(self._works)

    # -- bookkeeping --------------------------------------------------------

    def _remember(self, work: Work) -> Work:
        with self._lock:
            if work.id not in self._works:
                self.stats.works_fetched += 1
            self._works[work.id] = work
            if work.doi:
                self._doi_index[work.doi] = work.id
        return work

    def _note(self, message: str) -> None:
        self.diagnostics.append(message)
        logger.info("%s", message)

    # -- URL assembly -------------------------------------------------------

    def _url(self, path: str, **params: object) -> str:
        if self.config.mailto:
            params.setdefault("mailto", self.config.mailto)
        query = urlencode(sorted((k, str(v)) for k, v in params.items()))
        url = f"{self.config.base_url}/{path}"
        return f"{url}?{query}" if query else url

    def _work_url(self, work_id: WorkId) -> str:
        return self._url(f"works/{quote(work_id, safe='')}")

    # -- HTTP with retries and cache ----------------------------------------

    def _request(self, url: str) -> str:
        """GET with bounded exponential backoff on 429 and 5xx."""
        assert self._transport is not None and self._rate is not None
        last_status = 0
        for attempt in range(len(_BACKOFF_DELAYS) + 1):
            self._rate.acquire()
            response = self._transport.get(url)
            self.stats.network_requests += 1
            if response.status == 200:
                return response.body
            if response.status == 404:
                raise NotFoundError(f"404 for {url}")
            last_status = response.status
            if response.status in _RETRYABLE_STATUSES:
                if attempt < len(_BACKOFF_DELAYS):
                    self._sleep(_BACKOFF_DELAYS[attempt])
                    continue
                break
            raise TransportError(f"HTTP {response.status} for {url}")
        if last_status == 429:
            raise RateLimitedError(f"rate limited after retries: {url}")
        raise TransportError(f"HTTP {last_status} persisted after retries: {url}")

    def _get_json(self, url: str) -> dict:
        assert self._cache is not None
        cached = self._cache.get_fresh(url)
        if cached is not None:
            self.stats.cache_hits += 1
            body = cached
        else:
            body = self._request(url)
            self._cache.put(url, body)
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            raise TransportError(f"invalid JSON from {url}: {exc}") from exc
        if not isinstance(payload, dict):
            raise TransportError(f"unexpected payload shape from {url}")
        return payload

    # -- listings -----------------------------------------------------------

    def _list_works(self, filter_expr: str, cap: int | None) -> list[Work]:
        """Walk a cursor-paginated works listing, then sort and truncate.

        Stops once ``cap`` results are collected or the page budget runs
        out; either way a remainder upstream counts as a truncation.
        """
        collected: dict[WorkId, Work] = {}
        cursor: str | None = "*"
        pages = 0
        while cursor is not None and pages < self.config.max_pages_per_listing:
            url = self._url(
                "works",
                filter=filter_expr,
                **{"per-page": self.config.page_size, "cursor": cursor},
            )
            payload = self._get_json(url)
            for record in payload.get("results") or []:
                work = self._remember(parse_api_work(record))
                collected[work.id] = work
            cursor = (payload.get("meta") or {}).get("next_cursor")
            pages += 1
            if cap is not None and len(collected) >= cap:
                break

        ordered = sorted(
            collected.values(), key=lambda w: (-w.global_citation_count, w.id)
        )
        truncated = cursor is not None or (cap is not None and len(ordered) > cap)
        if truncated:
            self.stats.truncated_listings += 1
        return ordered[:cap] if cap is not None else ordered

    # -- public operations --------------------------------------------------

    def resolve_work(self, identifier: str) -> Work:
        """Look up one work by OpenAlex id, DOI, or either in URL form."""
        if not identifier or not identifier.strip():
            raise NotFoundError("empty identifier")
        if looks_like_doi(identifier) and not looks_like_work_id(identifier):
            doi = normalize_doi(identifier)
            if self.offline:
                wid = self._doi_index.get(doi)
                if wid is None:
                    raise NotFoundError(f"doi {doi} not in snapshot")
                return self._works[wid]
            url = self._url(f"works/doi:{quote(doi, safe='/')}")
            return self._remember(parse_api_work(self._get_json(url)))
        wid = normalize_work_id(identifier)
        if self.offline:
            work = self._works.get(wid)
            if work is None:
                raise NotFoundError(f"{wid} not in snapshot")
            return work
        with self._lock:
            known = self._works.get(wid)
        if known is not None and known.title:
            return known
        return self._remember(parse_api_work(self._get_json(self._work_url(wid))))

    def fetch_citers(self, work_id: WorkId, cap: int) -> list[Work]:
        """Up to ``cap`` works citing ``work_id``, deterministically ordered."""
        if cap < 1:
            raise ValueError("cap must be >= 1")
        if self.offline:
            assert self._offline_index is not None
            citers = [
                self._works[cid]
                for cid in self._offline_index.citers_of(work_id)
                if cid in self._works
            ]
            citers.sort(key=lambda w: (-w.global_citation_count, w.id))
            if len(citers) > cap:
                self.stats.truncated_listings += 1
            return citers[:cap]
        return self._list_works(f"cites:{work_id}", cap)

    def fetch_many(self, ids: Iterable[WorkId]) -> tuple[dict[WorkId, Work], list[WorkId]]:
        """Resolve many ids at once, returning ``(found, missing)``.

        The cache is consulted per id first; the remainder goes out in
        OR-filter batches of up to 50, with one retry pass for ids a batch
        response failed to include.
        """
        requested = sorted({normalize_work_id(i) for i in ids})
        if not requested:
            raise ValueError("ids must be non-empty")

        found: dict[WorkId, Work] = {}
        if self.offline:
            for wid in requested:
                if wid in self._works:
                    found[wid] = self._works[wid]
            missing = [wid for wid in requested if wid not in found]
            return found, missing

        assert self._cache is not None
        pending: list[WorkId] = []
        for wid in requested:
            cached = self._cache.get_fresh(self._work_url(wid))
            if cached is not None:
                self.stats.cache_hits += 1
                found[wid] = self._remember(parse_api_work(json.loads(cached)))
            else:
                pending.append(wid)

        for round_ids in (pending, None):
            if round_ids is None:  # retry round for whatever the batches missed
                round_ids = [wid for wid in pending if wid not in found]
                if not round_ids:
                    break
            self._fetch_batches(round_ids, found)

        missing = [wid for wid in requested if wid not in found]
        return found, missing

    def _fetch_batches(self, ids: list[WorkId], found: dict[WorkId, Work]) -> None:
        batches = [ids[i : i + BATCH_SIZE] for i in range(0, len(ids), BATCH_SIZE)]
        urls = [
            self._url(
                "works",
                filter="openalex_id:" + "|".join(batch),
                **{"per-page": BATCH_SIZE},
            )
            for batch in batches
        ]
        if len(urls) == 1:
            payloads = [self._get_json(urls[0])]
        else:
            with ThreadPoolExecutor(max_workers=self.config.max_concurrency) as pool:
                payloads = list(pool.map(self._get_json, urls))
        assert self._cache is not None
        for payload in payloads:  # merge in batch order, deterministically
            for record in payload.get("results") or []:
                work = self._remember(parse_api_work(record))
                found[work.id] = work
                self._cache.put(
                    self._work_url(work.id), json.dumps(record, sort_keys=True)
                )

    def fetch_author_works(self, author: str) -> list[Work]:
        """All works by an author, given an author id or a name query."""
        if not author or not author.strip():
            raise NotFoundError("empty author query")
        if self.offline:
            return self._offline_author_works(author)
        if looks_like_author_id(author):
            author_id = normalize_work_id(author)
        else:
            author_id = self._search_author(author)
        return self._list_works(f"author.id:{author_id}", cap=None)

    def _search_author(self, query: str) -> str:
        url = self._url("authors", search=query)
        payload = self._get_json(url)
        results = payload.get("results") or []
        candidates = [
            (
                normalize_work_id(str(r.get("id"))),
                str(r.get("display_name") or ""),
                int(r.get("works_count") or 0),
            )
            for r in results
            if r.get("id")
        ]
        if not candidates:
            raise NotFoundError(f"no author matching {query!r}")
        candidates.sort(key=lambda c: (-c[2], c[0]))
        best = candidates[0]
        if len(candidates) > 1:
            self._note(
                f"author query {query!r} matched {len(candidates)} candidates; "
                f"picked {best[0]} ({best[1]!r}, {best[2]} works)"
            )
        return best[0]

    def _offline_author_works(self, author: str) -> list[Work]:
        if looks_like_author_id(author):
            author_id = normalize_work_id(author)
        else:
            author_id = self._offline_match_author(author)
        works = [w for w in self._works.values() if author_id in w.author_ids]
        if not works:
            raise NotFoundError(f"no works for author {author!r} in snapshot")
        works.sort(key=lambda w: (-w.global_citation_count, w.id))
        return works

    def _offline_match_author(self, query: str) -> str:
        # Snapshot records carry parallel authors / author_ids lists.
        names: dict[str, set[str]] = {}
        counts: dict[str, int] = {}
        for work in self._works.values():
            for i, aid in enumerate(work.author_ids):
                counts[aid] = counts.get(aid, 0) + 1
                if i < len(work.authors):
                    names.setdefault(aid, set()).add(work.authors[i].lower())
        wanted = query.strip().lower()
        exact = [aid for aid, ns in names.items() if wanted in ns]
        matches = exact or [
            aid for aid, ns in names.items() if any(wanted in n for n in ns)
        ]
        if not matches:
            raise NotFoundError(f"no author matching {query!r} in snapshot")
        matches.sort(key=lambda aid: (-counts[aid], aid))
        if len(matches) > 1:
            self._note(
                f"author query {query!r} matched {len(matches)} snapshot authors; "
                f"picked {matches[0]} ({counts[matches[0]]} works)"
            )
        return matches[0]
