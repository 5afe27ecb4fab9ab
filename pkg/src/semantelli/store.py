"""Per-search result storage, URL canonicalization, and cross-engine merging.

Duplicate detection is exact canonical-URL identity: scheme and host are
lowercased, default ports and fragments dropped, the trailing slash on an
empty path removed, and query parameters sorted by key. Results sharing a
canonical URL collapse into one merged record that keeps every
contributing engine, which is what later feeds the redundancy boost.

The hit count is an interpretation: a page's "hits" are the occurrences
of the query combinations inside its own title and snippet (overlapping
matches across combinations all count). Fixture records may carry a
``hit_hint`` that overrides the computed value, so tests can pin scores.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import asdict, dataclass, field
from operator import itemgetter
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from .backends import FetchReport, RawResult
from .errors import InvalidUrl
from .query import QueryCombination
from .seid import EnginePlan

DEFAULT_SESSION_TTL = 300.0

_DEFAULT_PORTS = {"http": 80, "https": 443}


def normalize_url(url: str) -> str:
    """Canonicalize an absolute http(s) URL for duplicate detection.

    Idempotent: normalizing an already-normalized URL is a no-op. Path and
    parameter values keep their case; only scheme and host fold.
    """
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    if scheme not in _DEFAULT_PORTS or not parts.netloc:
        raise InvalidUrl(f"not an absolute http(s) URL: {url!r}")
    host = parts.hostname
    if not host:
        raise InvalidUrl(f"missing host: {url!r}")
    try:
        port = parts.port
    except ValueError as exc:
        raise InvalidUrl(f"bad port in {url!r}") from exc

    netloc = host.lower()
    if port is not None and port != _DEFAULT_PORTS[scheme]:
        netloc = f"{netloc}:{port}"
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo = f"{userinfo}:{parts.password}"
        netloc = f"{userinfo}@{netloc}"

    path = "" if parts.path == "/" else parts.path
    query = urlencode(sorted(parse_qsl(parts.query, keep_blank_values=True), key=itemgetter(0)))
    return urlunsplit((scheme, netloc, path, query, ""))


def hit_count(
    text: str,
    combinations: tuple[QueryCombination, ...] | list[QueryCombination],
    hint: int | None = None,
) -> int:
    """Count combination-phrase occurrences in ``text`` (case-insensitive).

    Every phrase is counted independently, so spans shared between
    overlapping phrases contribute once per phrase. A non-None ``hint``
    short-circuits the scan entirely.
    """
    if hint is not None:
        return hint
    haystack = text.lower()
    total = 0
    for combo in combinations:
        needle = combo.phrase
        start = haystack.find(needle)
        while start != -1:
            total += 1
            start = haystack.find(needle, start + 1)
    return total


@dataclass(frozen=True)
class Contributor:
    engine_id: str
    origin_rank: int


@dataclass(frozen=True)
class MergedResult:
    """All observations of one canonical URL, collapsed."""

    canonical_url: str
    title: str
    snippet: str
    contributors: tuple[Contributor, ...]
    out_links: int
    hit_count: int
    best_origin_rank: int

    @property
    def redundancy_count(self) -> int:
        return len(self.contributors) - 1


@dataclass
class SearchSession:
    """Everything one search produced before scoring, kept briefly for debugging."""

    session_id: str
    raw_query: str
    combinations: tuple[QueryCombination, ...]
    plan: EnginePlan
    buffers: dict[str, list[RawResult]]
    report: FetchReport
    created_at: float = field(default_factory=time.time)
    ttl: float = DEFAULT_SESSION_TTL

    @classmethod
    def create(
        cls,
        raw_query: str,
        combinations: tuple[QueryCombination, ...],
        plan: EnginePlan,
        buffers: dict[str, list[RawResult]],
        report: FetchReport,
        ttl: float = DEFAULT_SESSION_TTL,
    ) -> "SearchSession":
        return cls(
            session_id=uuid.uuid4().hex,
            raw_query=raw_query,
            combinations=combinations,
            plan=plan,
            buffers=buffers,
            report=report,
            ttl=ttl,
        )

    def expired(self, now: float | None = None) -> bool:
        now = time.time() if now is None else now
        return now - self.created_at > self.ttl

    def to_debug_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "raw_query": self.raw_query,
            "combinations": [combo.phrase for combo in self.combinations],
            "plan": [
                {
                    "engine_id": entry.engine_id,
                    "resolved_weight": entry.resolved_weight,
                    "priority": entry.priority,
                }
                for entry in self.plan.entries
            ],
            "buffers": {
                engine_id: [asdict(result) for result in buffer]
                for engine_id, buffer in self.buffers.items()
            },
            "fetch_records": [asdict(record) for record in self.report.records],
            "created_at": self.created_at,
            "ttl": self.ttl,
        }


class SessionStore:
    """In-memory session keeper; expired entries are pruned on access."""

    def __init__(self) -> None:
        self._sessions: dict[str, SearchSession] = {}
        self._lock = threading.Lock()

    def put(self, session: SearchSession) -> None:
        with self._lock:
            self._prune_locked()
            self._sessions[session.session_id] = session

    def get(self, session_id: str) -> SearchSession | None:
        with self._lock:
            self._prune_locked()
            return self._sessions.get(session_id)

    def __len__(self) -> int:
        with self._lock:
            self._prune_locked()
            return len(self._sessions)

    def _prune_locked(self) -> None:
        now = time.time()
        dead = [sid for sid, session in self._sessions.items() if session.expired(now)]
        for sid in dead:
            del self._sessions[sid]


class _EngineObservation:
    """Best view one engine has of one canonical URL."""

    __slots__ = ("best", "out_links")

    def __init__(self, result: RawResult):
        self.best = result
        self.out_links = result.out_links

    def absorb(self, result: RawResult) -> None:
        self.out_links = max(self.out_links, result.out_links)
        if result.origin_rank < self.best.origin_rank:
            self.best = result


def filter_and_merge(session: SearchSession) -> list[MergedResult]:
    """Collapse the session's buffers into one merged record per URL.

    Results from engines carrying zero resolved weight (or absent from the
    plan) are dropped first. Within a group, each engine contributes its
    best-ranked observation once; title, snippet, and the hit hint come
    from the engine with the best plan priority, out-links are the max
    seen anywhere, and best_origin_rank is the best rank any contributor
    achieved.
    """
    weight_of = {entry.engine_id: entry.resolved_weight for entry in session.plan.entries}
    priority_of = {entry.engine_id: entry.priority for entry in session.plan.entries}

    groups: dict[str, dict[str, _EngineObservation]] = {}
    ordered_engines = sorted(session.buffers, key=lambda eid: priority_of.get(eid, 1 << 30))
    for engine_id in ordered_engines:
        if weight_of.get(engine_id, 0.0) <= 0.0:
            continue
        for result in session.buffers[engine_id]:
            canonical = normalize_url(result.url)
            per_engine = groups.setdefault(canonical, {})
            if engine_id in per_engine:
                per_engine[engine_id].absorb(result)
            else:
                per_engine[engine_id] = _EngineObservation(result)

    merged: list[MergedResult] = []
    for canonical, per_engine in groups.items():
        engine_ids = sorted(per_engine, key=lambda eid: priority_of[eid])
        representative = per_engine[engine_ids[0]].best
        contributors = tuple(
            Contributor(engine_id=eid, origin_rank=per_engine[eid].best.origin_rank)
            for eid in engine_ids
        )
        text = f"{representative.title} {representative.snippet}"
        merged.append(
            MergedResult(
                canonical_url=canonical,
                title=representative.title,
                snippet=representative.snippet,
                contributors=contributors,
                out_links=max(obs.out_links for obs in per_engine.values()),
                hit_count=hit_count(text, session.combinations, hint=representative.hit_hint),
                best_origin_rank=min(c.origin_rank for c in contributors),
            )
        )
    return merged
