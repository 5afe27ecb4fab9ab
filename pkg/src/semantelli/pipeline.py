"""End-to-end search orchestration.

One ``SearchService`` owns the engine registry state, the adapter
registry, and the tuning knobs. A search is a single pass:

    normalize -> generate_combinations -> resolve_plan -> dispatch
              -> filter_and_merge -> rank

The response dict built here is the one external contract shared by the
HTTP API, the CLI, and the report writer, and its JSON serialization is
deliberately canonical so identical searches produce identical bytes
(modulo ``timing_ms``).
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Any

from .backends import AdapterRegistry, FixtureAdapter, GatewayConfig, dispatch
from .backends import OUTCOME_FAILED, OUTCOME_OK, OUTCOME_TIMED_OUT
from .config import AppConfig, apply_stopwords
from .query import QCGConfig, generate_combinations, normalize
from .ranking import ScoreParams, ScoredResult, rank
from .seid import EnginePlan, SeidState, load_seid, resolve_plan, save_seid, set_engine_weight
from .store import DEFAULT_SESSION_TTL, SearchSession, SessionStore, filter_and_merge

DEFAULT_RESULT_LIMIT = 20


def build_registry(state: SeidState, fixture_dir: str | Path) -> AdapterRegistry:
    """One fixture adapter per engine; engines without a corpus answer empty."""
    registry = AdapterRegistry()
    fixture_dir = Path(fixture_dir)
    for engine in state.engines:
        corpus_file = fixture_dir / f"{engine.engine_id}.txt"
        if corpus_file.exists():
            registry.register(FixtureAdapter.from_file(engine.engine_id, corpus_file))
        else:
            registry.register(FixtureAdapter(engine.engine_id, {}))
    return registry


class SearchService:
    """Holds shared state and runs searches against it.

    Engine-registry mutations are serialized behind a lock and swap the
    whole immutable state atomically, so a concurrent search sees either
    the old registry or the new one, never a mixture.
    """

    def __init__(
        self,
        state: SeidState,
        registry: AdapterRegistry,
        *,
        gateway: GatewayConfig | None = None,
        score: ScoreParams | None = None,
        qcg: QCGConfig | None = None,
        seid_path: str | Path | None = None,
        result_limit: int = DEFAULT_RESULT_LIMIT,
        session_ttl: float = DEFAULT_SESSION_TTL,
    ):
        self._state = state
        self._state_lock = threading.Lock()
        self.registry = registry
        self.gateway = gateway or GatewayConfig()
        self.score = score or ScoreParams()
        self.qcg = qcg or QCGConfig()
        self.seid_path = Path(seid_path) if seid_path else None
        self.result_limit = result_limit
        self.session_ttl = session_ttl
        self.sessions = SessionStore()

    @classmethod
    def from_config(cls, config: AppConfig) -> "SearchService":
        config = apply_stopwords(config)
        state = load_seid(config.seid_path)
        return cls(
            state,
            build_registry(state, config.fixture_dir),
            gateway=config.gateway,
            score=config.score,
            qcg=config.qcg,
            seid_path=config.seid_path,
            result_limit=config.result_limit,
        )

    @property
    def state(self) -> SeidState:
        return self._state

    def search(
        self, raw_query: str, *, limit: int | None = None, verbose: bool = False
    ) -> dict[str, Any]:
        response, _ = self.execute(raw_query, limit=limit, verbose=verbose)
        return response

    def execute(
        self, raw_query: str, *, limit: int | None = None, verbose: bool = False
    ) -> tuple[dict[str, Any], SearchSession]:
        """Run the full pipeline; returns the response and its session."""
        started = time.perf_counter()
        state = self._state
        tokens = normalize(raw_query, self.qcg)
        combinations = tuple(generate_combinations(tokens, self.qcg))
        plan = resolve_plan(combinations, state)
        buffers, report = dispatch(plan, self.registry, self.gateway)
        session = SearchSession.create(
            raw_query.strip(), combinations, plan, buffers, report, ttl=self.session_ttl
        )
        self.sessions.put(session)
        merged = filter_and_merge(session)
        scored = rank(merged, plan, self.score)
        timing_ms = int((time.perf_counter() - started) * 1000)

        effective_limit = self.result_limit if limit is None else limit
        response = build_response(
            raw_query=session.raw_query,
            plan=plan,
            scored=scored[:effective_limit] if effective_limit >= 0 else scored,
            session=session,
            timing_ms=timing_ms,
            verbose=verbose,
        )
        return response, session

    def engines(self) -> list[dict[str, Any]]:
        kinds = dict(self.registry.list_adapters())
        return [
            {
                "engine_id": engine.engine_id,
                "display_name": engine.display_name,
                "weight": engine.initial_weight,
                "enabled": engine.enabled,
                "adapter": kinds.get(engine.engine_id),
            }
            for engine in self._state.engines
        ]

    def set_weight(self, engine_id: str, weight: float) -> dict[str, Any]:
        """Update one engine's weight; persists when a registry file is configured."""
        with self._state_lock:
            new_state = set_engine_weight(self._state, engine_id, weight)
            self._state = new_state
            if self.seid_path is not None:
                save_seid(new_state, self.seid_path)
        return {"engine_id": engine_id, "weight": weight}

    def enabled_engine_count(self) -> int:
        return sum(1 for engine in self._state.engines if engine.enabled)


def build_response(
    *,
    raw_query: str,
    plan: EnginePlan,
    scored: list[ScoredResult],
    session: SearchSession,
    timing_ms: int,
    verbose: bool = False,
) -> dict[str, Any]:
    priority_of = {entry.engine_id: entry.priority for entry in plan.entries}

    results = []
    for item in scored:
        contributors = sorted(item.merged.contributors, key=lambda c: priority_of[c.engine_id])
        row: dict[str, Any] = {
            "final_rank": item.final_rank,
            "canonical_url": item.merged.canonical_url,
            "title": item.merged.title,
            "snippet": item.merged.snippet,
            "telli_factor": round(item.telli_factor, 3),
            "engines": [
                {"engine_id": c.engine_id, "origin_rank": c.origin_rank} for c in contributors
            ],
            "hit_count": item.merged.hit_count,
            "out_links": item.merged.out_links,
            "effective_weight": round(item.effective_weight, 3),
            "relevance_factor": round(item.relevance_factor, 3),
        }
        if verbose:
            row["telli_factor_exact"] = item.telli_factor
        results.append(row)

    return {
        "query": raw_query,
        "combinations": [combo.phrase for combo in session.combinations],
        "engine_plan": [
            {
                "engine_id": entry.engine_id,
                "priority": entry.priority,
                "weight": round(entry.resolved_weight, 3),
            }
            for entry in plan.entries
        ],
        "results": results,
        "fetch_report": _summarize_report(session, plan),
        "timing_ms": timing_ms,
    }


def _summarize_report(session: SearchSession, plan: EnginePlan) -> list[dict[str, Any]]:
    """Per-engine rollup of the per-pair fetch records (worst outcome wins)."""
    summary = []
    for entry in plan.entries:
        records = session.report.for_engine(entry.engine_id)
        outcomes = {record.outcome for record in records}
        if OUTCOME_TIMED_OUT in outcomes:
            status = OUTCOME_TIMED_OUT
        elif OUTCOME_FAILED in outcomes:
            status = OUTCOME_FAILED
        else:
            status = OUTCOME_OK
        row: dict[str, Any] = {
            "engine_id": entry.engine_id,
            "status": status,
            "results": sum(record.result_count for record in records),
        }
        detail = next((r.detail for r in records if r.detail), None)
        if detail is not None:
            row["detail"] = detail
        summary.append(row)
    return summary


def to_json(response: dict[str, Any]) -> str:
    """The canonical serialization used by both the CLI and the HTTP API."""
    return json.dumps(response, ensure_ascii=False, indent=2)
