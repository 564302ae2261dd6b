"""OpenAlex works client: top-cited corpora and term-prevalence counts.

Requests go through a *transport* object with a single
``get(url, params) -> Reply`` method. :class:`HttpTransport` talks to the
live API; :class:`FixtureTransport` replays recorded responses from a
directory and :class:`RecordingTransport` writes them, so tests never need the
network. A fixture is one JSON document per response, named by a hash of the
request (the ``mailto`` parameter is excluded from the hash).
"""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from interdiv.corpus import Corpus, TermCountRow
from interdiv.errors import FetchError, PayloadError
from interdiv.taxonomy import FIELD_CONCEPT_IDS, FIELDS, N_DOMAINS, N_FIELDS, N_SDGS

logger = logging.getLogger(__name__)

API_ROOT = "https://api.openalex.org"
WORKS_URL = f"{API_ROOT}/works"
MAILTO_ENV = "INTERDIV_MAILTO"
WORK_FIELDS = "id,publication_year,cited_by_count,concepts,sustainable_development_goals"

TERM_SEARCH = (
    "multidisciplinary OR \"multi-disciplinary\" OR interdisciplinary OR "
    "\"inter-disciplinary\" OR transdisciplinary OR \"trans-disciplinary\""
)

_CONCEPT_BY_ID = {cid: i for i, cid in enumerate(FIELD_CONCEPT_IDS)}
_CONCEPT_BY_NAME = {name.casefold(): i for i, name in enumerate(FIELDS)}
_RETRY_STATUSES = {429, 500, 502, 503, 504}


# --- transports -----------------------------------------------------------

@dataclass(frozen=True)
class Reply:
    status: int
    body: object
    headers: dict = field(default_factory=dict)


def request_key(url, params):
    """Stable fixture name for a request."""
    kept = sorted((k, str(v)) for k, v in (params or {}).items() if k != "mailto")
    blob = json.dumps([url, kept], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


class HttpTransport:
    def __init__(self, session=None, timeout=30.0):
        if session is None:
            import requests

            session = requests.Session()
            session.headers["User-Agent"] = "interdiv (https://openalex.org polite pool)"
        self.session = session
        self.timeout = timeout

    def get(self, url, params):
        import requests

        try:
            resp = self.session.get(url, params=params, timeout=self.timeout)
        except requests.RequestException as exc:
            return Reply(0, None, {"error": str(exc)})
        try:
            body = resp.json()
        except ValueError:
            body = None
        return Reply(resp.status_code, body, dict(resp.headers))


class FixtureTransport:
    """Replay responses previously written by :class:`RecordingTransport`."""

    def __init__(self, directory):
        self.directory = os.fspath(directory)

    def get(self, url, params):
        path = os.path.join(self.directory, request_key(url, params) + ".json")
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            return Reply(404, None, {"error": f"no fixture {os.path.basename(path)} for {url} {params}"})
        return Reply(doc.get("status", 200), doc.get("body"), doc.get("headers", {}))


class RecordingTransport:
    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)

    def get(self, url, params):
        reply = self.inner.get(url, params)
        doc = {
            "request": {"url": url, "params": {k: v for k, v in sorted((params or {}).items()) if k != "mailto"}},
            "status": reply.status,
            "headers": {k: v for k, v in reply.headers.items() if k.lower() == "retry-after"},
            "body": reply.body,
        }
        path = os.path.join(self.directory, request_key(url, params) + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        return reply


class RateLimiter:
    """Shared minimum spacing between request starts."""

    def __init__(self, per_second=10.0, clock=time.monotonic, sleep=time.sleep):
        self.interval = 0.0 if not per_second else 1.0 / per_second
        self._next = 0.0
        self._lock = threading.Lock()
        self._clock = clock
        self._sleep = sleep

    def wait(self):
        if self.interval <= 0:
            return
        with self._lock:
            now = self._clock()
            start = max(now, self._next)
            self._next = start + self.interval
        if start > now:
            self._sleep(start - now)


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    backoff_ms: float = 500.0

    def delay(self, attempt, retry_after=None):
        """Seconds to wait before retry number ``attempt`` (1-based)."""
        base = self.backoff_ms / 1000.0 * 2 ** (attempt - 1)
        if retry_after is not None:
            try:
                return max(base, float(retry_after))
            except ValueError:
                pass
        return base


class Client:
    def __init__(self, transport=None, mailto=None, retry=RetryPolicy(), rate_limiter=None,
                 sleep=time.sleep, max_workers=4):
        self.transport = transport if transport is not None else HttpTransport()
        self.mailto = mailto if mailto is not None else os.environ.get(MAILTO_ENV)
        self.retry = retry
        self.rate_limiter = rate_limiter if rate_limiter is not None else RateLimiter()
        self.sleep = sleep
        self.max_workers = max_workers

    def get_json(self, url, params):
        params = dict(params)
        if self.mailto:
            params["mailto"] = self.mailto
        reply = None
        for attempt in range(1, self.retry.max_attempts + 1):
            self.rate_limiter.wait()
            reply = self.transport.get(url, params)
            if reply.status == 200:
                if not isinstance(reply.body, dict):
                    raise PayloadError(f"payload error: non-object JSON body from {url}")
                return reply.body
            if reply.status not in _RETRY_STATUSES and reply.status != 0:
                break
            if attempt < self.retry.max_attempts:
                wait = self.retry.delay(attempt, _header(reply.headers, "retry-after"))
                logger.warning("OpenAlex status %s, retry %d in %.2fs", reply.status, attempt, wait)
                self.sleep(wait)
        detail = reply.headers.get("error", "") if reply else ""
        raise FetchError(f"fetch error: status {reply.status} for {url} {detail}".rstrip(), status=reply.status)


def _header(headers, name):
    for k, v in headers.items():
        if k.lower() == name:
            return v
    return None


# --- payload handling -----------------------------------------------------

def _short_id(value):
    if not value:
        return ""
    return str(value).rstrip("/").rsplit("/", 1)[-1]


def _clamp(value, what):
    v = float(value)
    if not 0.0 <= v <= 1.0:
        logger.warning("score %r for %s outside [0, 1]; clamped", v, what)
        v = min(1.0, max(0.0, v))
    return v


def _sdg_number(goal):
    match = re.search(r"(\d+)\s*$", str(goal.get("id", "")))
    if match:
        return int(match.group(1))
    match = re.match(r"\s*(?:sdg\s*)?(\d+)", str(goal.get("display_name", "")), re.I)
    return int(match.group(1)) if match else None


def extract_scores(work):
    """Map a work's level-0 concept and SDG scores onto the fixed column order.

    Returns ``(field_scores, sdg_scores)`` as tuples; absent entries are 0.
    """
    if not isinstance(work, dict):
        raise PayloadError("payload error: work is not an object")
    if not work.get("id") or work.get("publication_year") is None:
        raise PayloadError(f"payload error: work {work.get('id')!r} lacks id or publication_year")
    fields = [0.0] * N_FIELDS
    for concept in work.get("concepts") or ():
        if concept.get("level", 0) != 0:
            continue
        idx = _CONCEPT_BY_ID.get(_short_id(concept.get("id")))
        if idx is None:
            idx = _CONCEPT_BY_NAME.get(str(concept.get("display_name", "")).casefold())
        if idx is None or concept.get("score") is None:
            continue
        fields[idx] = _clamp(concept["score"], FIELDS[idx])
    sdgs = [0.0] * N_SDGS
    for goal in work.get("sustainable_development_goals") or ():
        number = _sdg_number(goal)
        if number is None or not 1 <= number <= N_SDGS or goal.get("score") is None:
            continue
        sdgs[number - 1] = _clamp(goal["score"], f"SDG {number}")
    return tuple(fields), tuple(sdgs)


def _work_record(work):
    fields, sdgs = extract_scores(work)
    citations = work.get("cited_by_count") or 0
    try:
        citations = int(citations)
        year = int(work["publication_year"])
    except (TypeError, ValueError):
        raise PayloadError(f"payload error: bad year/citations in {work.get('id')!r}") from None
    return _short_id(work["id"]), year, citations, fields, sdgs


# --- fetch operations -----------------------------------------------------

@dataclass(frozen=True)
class FetchSpec:
    field_concept_id: str
    year: int
    per_page: int = 200
    max_records: int = 1000

    def __post_init__(self):
        if not 1 <= self.per_page <= 200:
            raise ValueError("per_page must lie in 1..200")
        if self.max_records < 1:
            raise ValueError("max_records must be >= 1")


def fetch_top_cited(spec, client=None):
    """Most-cited works for one concept and year, via cursor pagination.

    Returns a :class:`Corpus` sorted by citations descending (ties by work id).
    """
    client = client or Client()
    params = {
        "filter": f"concepts.id:{spec.field_concept_id},publication_year:{spec.year}",
        "sort": "cited_by_count:desc",
        "per_page": spec.per_page,
        "select": WORK_FIELDS,
        "cursor": "*",
    }
    rows, seen = [], set()
    while len(rows) < spec.max_records:
        body = client.get_json(WORKS_URL, params)
        results = body.get("results")
        if not isinstance(results, list):
            raise PayloadError("payload error: response has no results list")
        for work in results:
            rec = _work_record(work)
            if rec[0] in seen:
                logger.warning("duplicate work %s across pages; skipped", rec[0])
                continue
            seen.add(rec[0])
            rows.append(rec)
            if len(rows) >= spec.max_records:
                break
        cursor = (body.get("meta") or {}).get("next_cursor")
        if not results or not cursor:
            break
        params = dict(params, cursor=cursor)
    rows.sort(key=lambda r: (-r[2], r[0]))
    return Corpus(
        [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows],
        np.array([r[3] for r in rows]).reshape(-1, N_FIELDS),
        np.array([r[4] for r in rows]).reshape(-1, N_SDGS),
    )


def fetch_corpus(fields, years, client=None, max_records=1000, per_page=200):
    """Top-cited lists for every (field, year), concatenated in (field, year) order.

    ``fields`` are 1-based field numbers. Up to ``client.max_workers`` lists
    are fetched concurrently; a work listed under several fields appears once
    per list, as in the published corpus.
    """
    client = client or Client()
    jobs = [(f, y) for f in fields for y in years]

    def run(job):
        f, y = job
        return fetch_top_cited(FetchSpec(FIELD_CONCEPT_IDS[f - 1], y, per_page, max_records), client)

    workers = max(1, client.max_workers)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return concat(parts)


def concat(parts):
    parts = list(parts)
    return Corpus(
        [w for p in parts for w in p.work_ids],
        np.concatenate([p.years for p in parts]) if parts else [],
        np.concatenate([p.citations for p in parts]) if parts else [],
        np.concatenate([p.field_scores for p in parts]) if parts else np.zeros((0, N_FIELDS)),
        np.concatenate([p.sdg_scores for p in parts]) if parts else np.zeros((0, N_SDGS)),
    )


@dataclass(frozen=True)
class TermQuerySpec:
    year: int
    domain: int | None = None  # OpenAlex domain id 1..4
    search: str = TERM_SEARCH
    domain_filter: str = "primary_topic.domain.id"

    def __post_init__(self):
        if self.year < 1900:
            raise ValueError("year must be >= 1900")
        if self.domain is not None and not 1 <= self.domain <= N_DOMAINS:
            raise ValueError(f"domain must lie in 1..{N_DOMAINS}")


@dataclass(frozen=True)
class TermCount:
    year: int
    domain: int | None
    count: int
    total: int

    @property
    def ratio_pct(self):
        return 100.0 * self.count / self.total if self.total else None


def _meta_count(body):
    try:
        return int(body["meta"]["count"])
    except (KeyError, TypeError, ValueError):
        raise PayloadError("payload error: response lacks meta.count") from None


def count_term_prevalence(spec, client=None):
    """Number of works matching the term search, and all works, for one year/domain."""
    client = client or Client()
    base = [f"publication_year:{spec.year}"]
    if spec.domain is not None:
        base.append(f"{spec.domain_filter}:{spec.domain}")
    total = _meta_count(client.get_json(WORKS_URL, {"filter": ",".join(base), "per_page": 1}))
    matched = ",".join(base + [f"title_and_abstract.search:{spec.search}"])
    count = _meta_count(client.get_json(WORKS_URL, {"filter": matched, "per_page": 1}))
    if count > total:
        raise PayloadError(f"payload error: term count {count} exceeds total {total} for {spec.year}")
    return TermCount(spec.year, spec.domain, count, total)


def fetch_term_counts(years, client=None):
    """Term-count rows (overall plus four domains) for each year."""
    client = client or Client()
    rows = []
    for y in years:
        overall = count_term_prevalence(TermQuerySpec(y), client)
        doms = [count_term_prevalence(TermQuerySpec(y, d), client) for d in range(1, N_DOMAINS + 1)]
        rows.append(TermCountRow(
            year=y, nwork=overall.total, nwork_domain=tuple(d.total for d in doms),
            nidr=overall.count, nidr_domain=tuple(d.count for d in doms),
            pct=overall.ratio_pct, pct_domain=tuple(d.ratio_pct for d in doms),
        ))
    return rows


def retrieval_date():
    return _dt.date.today().isoformat()
