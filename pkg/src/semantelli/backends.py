"""Backend adapters and the concurrent fetch gateway.

Three adapter kinds cover every deployment we care about:

* ``FixtureAdapter`` answers from a bundled corpus file, which is how the
  canonical engine roster ships (two of the original engines no longer
  exist as live services).
* ``ScriptedAdapter`` wraps a callable, mainly for fault injection in
  tests (sleeps, raised errors).
* ``HttpJsonAdapter`` calls a real JSON endpoint described by a URL
  template and field paths, so a live backend can be plugged in.

``dispatch`` fans every (engine, combination) pair out across a thread
pool with a hard per-fetch timeout. Failures are isolated: one broken
backend never disturbs another's buffer, and only the everything-failed
case surfaces as an error.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Protocol
from urllib.parse import quote_plus, urlsplit

import requests

from .errors import (
    AllBackendsFailed,
    BackendError,
    BackendTimeout,
    BackendUnavailable,
    MalformedResponse,
)
from .query import QueryCombination
from .seid import EnginePlan

OUTCOME_OK = "ok"
OUTCOME_TIMED_OUT = "timed_out"
OUTCOME_FAILED = "failed"


@dataclass(frozen=True)
class RawResult:
    """One backend hit, before merging."""

    url: str
    title: str
    snippet: str
    out_links: int
    origin_engine: str
    origin_rank: int
    source_combination: str
    hit_hint: int | None = None


@dataclass(frozen=True)
class GatewayConfig:
    per_engine_timeout: float = 3.0
    max_results_per_engine_per_combination: int = 10
    max_parallel_requests: int = 8

    def __post_init__(self) -> None:
        if self.per_engine_timeout <= 0:
            raise ValueError("per_engine_timeout must be positive")
        if self.max_results_per_engine_per_combination < 1:
            raise ValueError("max_results_per_engine_per_combination must be >= 1")
        if self.max_parallel_requests < 1:
            raise ValueError("max_parallel_requests must be >= 1")


@dataclass(frozen=True)
class FetchRecord:
    """Outcome of one (engine, combination) fetch."""

    engine_id: str
    combination: str
    outcome: str
    result_count: int = 0
    detail: str | None = None


@dataclass
class FetchReport:
    records: list[FetchRecord] = field(default_factory=list)

    def all_failed(self) -> bool:
        return bool(self.records) and all(
            record.outcome != OUTCOME_OK for record in self.records
        )

    def for_engine(self, engine_id: str) -> list[FetchRecord]:
        return [record for record in self.records if record.engine_id == engine_id]


class SearchAdapter(Protocol):
    engine_id: str
    kind: str

    def fetch(self, combination: QueryCombination, limit: int) -> list[RawResult]:
        """Return at most ``limit`` results ranked 1..n for this phrase."""


def _check_limit(limit: int) -> None:
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")


@dataclass(frozen=True)
class FixtureRecord:
    url: str
    title: str
    snippet: str
    out_links: int
    hit_hint: int | None = None


class FixtureAdapter:
    """Answers each phrase from an in-memory corpus, in corpus order."""

    kind = "fixture"

    def __init__(self, engine_id: str, corpus: Mapping[str, list[FixtureRecord]]):
        self.engine_id = engine_id
        self._corpus = {phrase.lower(): list(records) for phrase, records in corpus.items()}

    @classmethod
    def from_file(cls, engine_id: str, path: str | Path) -> "FixtureAdapter":
        return cls(engine_id, load_fixture_corpus(path))

    def fetch(self, combination: QueryCombination, limit: int) -> list[RawResult]:
        _check_limit(limit)
        records = self._corpus.get(combination.phrase.lower(), [])
        return [
            RawResult(
                url=record.url,
                title=record.title,
                snippet=record.snippet,
                out_links=record.out_links,
                origin_engine=self.engine_id,
                origin_rank=rank,
                source_combination=combination.phrase,
                hit_hint=record.hit_hint,
            )
            for rank, record in enumerate(records[:limit], start=1)
        ]


def load_fixture_corpus(path: str | Path) -> dict[str, list[FixtureRecord]]:
    """Parse a corpus file: ``phrase | url | title | snippet | out_links [| hit_hint]``."""
    corpus: dict[str, list[FixtureRecord]] = {}
    for lineno, raw_line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [part.strip() for part in line.split("|")]
        if len(parts) not in (5, 6):
            raise MalformedResponse(
                f"{path}:{lineno}: expected 5 or 6 pipe-separated fields, got {len(parts)}"
            )
        phrase, url, title, snippet, links_text = parts[:5]
        hint: int | None = None
        if len(parts) == 6 and parts[5]:
            hint = _parse_count(parts[5], path, lineno, "hit_hint")
        record = FixtureRecord(
            url=url,
            title=title,
            snippet=snippet,
            out_links=_parse_count(links_text, path, lineno, "out_links"),
            hit_hint=hint,
        )
        corpus.setdefault(phrase.lower(), []).append(record)
    return corpus


def _parse_count(text: str, path: str | Path, lineno: int, name: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise MalformedResponse(f"{path}:{lineno}: bad {name} {text!r}") from exc
    if value < 0:
        raise MalformedResponse(f"{path}:{lineno}: {name} must be >= 0")
    return value


class ScriptedAdapter:
    """Delegates to a callable; the test suite's fault-injection hook."""

    kind = "scripted"

    def __init__(
        self,
        engine_id: str,
        script: Callable[[QueryCombination, int], list[RawResult]],
    ):
        self.engine_id = engine_id
        self._script = script

    def fetch(self, combination: QueryCombination, limit: int) -> list[RawResult]:
        _check_limit(limit)
        return list(self._script(combination, limit))


class HttpJsonAdapter:
    """Generic adapter for JSON search endpoints.

    ``url_template`` must contain a ``{query}`` placeholder. ``results_path``
    locates the hit array in the response body; ``url_path``/``title_path``/
    ``snippet_path`` are dotted paths within one hit. ``links_path`` may
    point at a list whose length becomes the out-link count; without it the
    count is 0 (this adapter has no way to know real out-links).
    """

    kind = "http"

    def __init__(
        self,
        engine_id: str,
        url_template: str,
        *,
        results_path: str = "results",
        url_path: str = "url",
        title_path: str = "title",
        snippet_path: str = "snippet",
        links_path: str | None = None,
        timeout: float = 3.0,
        session: requests.Session | None = None,
    ):
        if "{query}" not in url_template:
            raise ValueError("url_template must contain a {query} placeholder")
        self.engine_id = engine_id
        self._url_template = url_template
        self._results_path = results_path
        self._url_path = url_path
        self._title_path = title_path
        self._snippet_path = snippet_path
        self._links_path = links_path
        self._timeout = timeout
        self._session = session or requests.Session()

    def fetch(self, combination: QueryCombination, limit: int) -> list[RawResult]:
        _check_limit(limit)
        url = self._url_template.replace("{query}", quote_plus(combination.phrase))
        try:
            response = self._session.get(url, timeout=self._timeout)
            response.raise_for_status()
            body = response.json()
        except requests.Timeout as exc:
            raise BackendTimeout(f"{self.engine_id}: request timed out") from exc
        except requests.RequestException as exc:
            raise BackendUnavailable(f"{self.engine_id}: {exc}") from exc
        except ValueError as exc:
            raise MalformedResponse(f"{self.engine_id}: response is not JSON") from exc

        hits = _dig(body, self._results_path)
        if not isinstance(hits, list):
            raise MalformedResponse(
                f"{self.engine_id}: {self._results_path!r} is not a list"
            )
        results: list[RawResult] = []
        for rank, hit in enumerate(hits[:limit], start=1):
            link = str(_dig(hit, self._url_path))
            if not _is_absolute_http(link):
                raise MalformedResponse(f"{self.engine_id}: hit {rank} has bad url {link!r}")
            out_links = 0
            if self._links_path is not None:
                links = _dig(hit, self._links_path)
                out_links = len(links) if isinstance(links, list) else 0
            results.append(
                RawResult(
                    url=link,
                    title=str(_dig(hit, self._title_path)),
                    snippet=str(_dig(hit, self._snippet_path)),
                    out_links=out_links,
                    origin_engine=self.engine_id,
                    origin_rank=rank,
                    source_combination=combination.phrase,
                )
            )
        return results


def _dig(obj: Any, dotted_path: str) -> Any:
    node = obj
    for key in dotted_path.split("."):
        if not isinstance(node, Mapping) or key not in node:
            raise MalformedResponse(f"missing field path {dotted_path!r}")
        node = node[key]
    return node


def _is_absolute_http(url: str) -> bool:
    parts = urlsplit(url)
    return parts.scheme in ("http", "https") and bool(parts.netloc)


class AdapterRegistry:
    """Adapters keyed by engine id, preserving registration order."""

    def __init__(self) -> None:
        self._adapters: dict[str, SearchAdapter] = {}

    def register(self, adapter: SearchAdapter) -> None:
        if adapter.engine_id in self._adapters:
            raise ValueError(f"adapter already registered for {adapter.engine_id!r}")
        self._adapters[adapter.engine_id] = adapter

    def replace(self, adapter: SearchAdapter) -> None:
        self._adapters[adapter.engine_id] = adapter

    def get(self, engine_id: str) -> SearchAdapter | None:
        return self._adapters.get(engine_id)

    def list_adapters(self) -> list[tuple[str, str]]:
        return [(engine_id, adapter.kind) for engine_id, adapter in self._adapters.items()]


def _call_with_timeout(fn: Callable[[], list[RawResult]], timeout: float) -> list[RawResult]:
    """Run ``fn`` in a daemon thread and give up after ``timeout`` seconds.

    A Python thread cannot be killed, so a fetch that overruns is simply
    abandoned; its (discarded) result can no longer affect the search.
    """
    box: dict[str, Any] = {}
    done = threading.Event()

    def runner() -> None:
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the caller's thread
            box["error"] = exc
        finally:
            done.set()

    worker = threading.Thread(target=runner, daemon=True)
    worker.start()
    if not done.wait(timeout):
        raise BackendTimeout(f"no answer within {timeout:g}s")
    if "error" in box:
        raise box["error"]
    return box["value"]


def dispatch(
    plan: EnginePlan,
    registry: AdapterRegistry,
    config: GatewayConfig | None = None,
) -> tuple[dict[str, list[RawResult]], FetchReport]:
    """Fetch every (engine, combination) pair exactly once, concurrently.

    Returns per-engine buffers (combination order, then each engine's own
    rank order) and a report with one record per pair. Raises
    AllBackendsFailed only when no pair succeeded.
    """
    config = config or GatewayConfig()
    limit = config.max_results_per_engine_per_combination
    pairs = [
        (entry.engine_id, index, combo)
        for entry in plan.entries
        for index, combo in enumerate(entry.combinations)
    ]

    outcomes: dict[tuple[str, int], tuple[str, list[RawResult], str | None]] = {}

    def fetch_pair(engine_id: str, combo: QueryCombination) -> tuple[str, list[RawResult], str | None]:
        adapter = registry.get(engine_id)
        if adapter is None:
            return OUTCOME_FAILED, [], "no adapter registered"
        started = time.monotonic()
        try:
            results = _call_with_timeout(
                lambda: adapter.fetch(combo, limit), config.per_engine_timeout
            )
            return OUTCOME_OK, results[:limit], None
        except BackendTimeout:
            elapsed = time.monotonic() - started
            return OUTCOME_TIMED_OUT, [], f"timed out after {elapsed:.1f}s"
        except BackendError as exc:
            return OUTCOME_FAILED, [], str(exc)
        except Exception as exc:  # noqa: BLE001 - adapter bugs stay non-fatal
            return OUTCOME_FAILED, [], f"{type(exc).__name__}: {exc}"

    workers = min(config.max_parallel_requests, max(len(pairs), 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            (engine_id, index): pool.submit(fetch_pair, engine_id, combo)
            for engine_id, index, combo in pairs
        }
        for key, future in futures.items():
            outcomes[key] = future.result()

    buffers: dict[str, list[RawResult]] = {}
    report = FetchReport()
    for entry in plan.entries:
        buffer: list[RawResult] = []
        for index, combo in enumerate(entry.combinations):
            outcome, results, detail = outcomes[(entry.engine_id, index)]
            buffer.extend(results)
            report.records.append(
                FetchRecord(
                    engine_id=entry.engine_id,
                    combination=combo.phrase,
                    outcome=outcome,
                    result_count=len(results),
                    detail=detail,
                )
            )
        buffers[entry.engine_id] = buffer

    if report.all_failed():
        raise AllBackendsFailed("every backend fetch failed or timed out")
    return buffers, report
