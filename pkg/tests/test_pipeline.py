import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from semantelli.backends import GatewayConfig, ScriptedAdapter
from semantelli.config import AppConfig
from semantelli.errors import AllBackendsFailed, EmptyQuery, NoEnginesEnabled
from semantelli.pipeline import SearchService, to_json
from semantelli.seid import load_seid, save_seid, set_engine_weight

GOLDEN = Path(__file__).parent / "golden" / "search_semantic_web.json"


def without_timing(response: dict) -> dict:
    clone = json.loads(json.dumps(response))
    clone.pop("timing_ms", None)
    return clone


def load_golden() -> dict:
    return without_timing(json.loads(GOLDEN.read_text(encoding="utf-8")))


class TestSearch:
    def test_golden_query_matches_frozen_response(self, fixture_service):
        response = fixture_service.search("semantic web")
        assert without_timing(response) == load_golden()

    def test_three_runs_identical(self, fixture_service):
        runs = [without_timing(fixture_service.search("semantic web")) for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]

    def test_empty_query_rejected(self, fixture_service):
        with pytest.raises(EmptyQuery):
            fixture_service.search("")

    def test_all_engines_disabled(self, seid_copy):
        state = load_seid(seid_copy)
        engines = tuple(
            type(e)(e.engine_id, e.display_name, e.initial_weight, enabled=False)
            for e in state.engines
        )
        save_seid(type(state)(engines=engines, affinities=state.affinities), seid_copy)
        service = SearchService.from_config(AppConfig(seid_path=seid_copy))
        with pytest.raises(NoEnginesEnabled):
            service.search("semantic web")

    def test_all_backends_failing(self, fixture_service):
        def boom(combination, limit):
            raise RuntimeError("wire cut")

        for engine_id, _ in fixture_service.registry.list_adapters():
            fixture_service.registry.replace(ScriptedAdapter(engine_id, boom))
        with pytest.raises(AllBackendsFailed):
            fixture_service.search("semantic web")

    def test_limit_truncates_after_ranking(self, fixture_service):
        full = fixture_service.search("semantic web")
        limited = fixture_service.search("semantic web", limit=2)
        assert limited["results"] == full["results"][:2]
        assert [r["final_rank"] for r in limited["results"]] == [1, 2]

    def test_verbose_adds_exact_scores(self, fixture_service):
        response = fixture_service.search("semantic web", verbose=True)
        top = response["results"][0]
        assert "telli_factor_exact" in top
        assert abs(top["telli_factor_exact"] - 0.369) < 1e-9

    def test_no_hits_yields_empty_results(self, fixture_service):
        response = fixture_service.search("zebra xylophone")
        assert response["results"] == []
        assert all(entry["status"] == "ok" for entry in response["fetch_report"])

    def test_session_recorded_with_dump_payload(self, fixture_service):
        response, session = fixture_service.execute("semantic web")
        assert fixture_service.sessions.get(session.session_id) is session
        payload = session.to_debug_dict()
        assert payload["combinations"] == response["combinations"]
        assert set(payload["buffers"]) == {"duckduckgo", "hakia", "sensebot"}
        json.dumps(payload)  # must be serializable as-is

    def test_buffers_only_for_planned_engines(self, fixture_service):
        _, session = fixture_service.execute("semantic web")
        assert set(session.buffers) == set(session.plan.engine_ids())


class TestFaultIsolation:
    def test_timeout_leaves_other_engines_untouched(self, fixture_service):
        baseline = fixture_service.search("semantic web")
        fixture_service.gateway = GatewayConfig(per_engine_timeout=0.15)
        fixture_service.registry.replace(
            ScriptedAdapter("sensebot", lambda c, n: time.sleep(0.5) or [])
        )
        faulted = fixture_service.search("semantic web")

        statuses = {e["engine_id"]: e["status"] for e in faulted["fetch_report"]}
        assert statuses == {"duckduckgo": "ok", "hakia": "ok", "sensebot": "timed_out"}

        # every baseline result not involving the faulted engine is unchanged
        faulted_urls = {r["canonical_url"]: r for r in faulted["results"]}
        for row in baseline["results"]:
            engines = {e["engine_id"] for e in row["engines"]}
            if "sensebot" in engines:
                continue
            survivor = faulted_urls[row["canonical_url"]]
            assert survivor["telli_factor"] == row["telli_factor"]
            assert survivor["engines"] == row["engines"]
        assert not any(
            "sensebot" in {e["engine_id"] for e in r["engines"]}
            for r in faulted["results"]
        )


class TestConcurrency:
    def test_parallel_identical_searches_agree(self, fixture_service):
        with ThreadPoolExecutor(max_workers=6) as pool:
            futures = [pool.submit(fixture_service.search, "semantic web") for _ in range(6)]
            responses = [without_timing(f.result()) for f in futures]
        assert all(response == responses[0] for response in responses)

    def test_weight_update_during_searches_is_atomic(self, fixture_service):
        def run_search(_):
            return fixture_service.search("semantic web")["engine_plan"]

        with ThreadPoolExecutor(max_workers=4) as pool:
            mutate = pool.submit(fixture_service.set_weight, "hakia", 0.5)
            plans = list(pool.map(run_search, range(8)))
            mutate.result()
        for plan in plans:
            weights = {entry["engine_id"]: entry["weight"] for entry in plan}
            assert weights["hakia"] in (0.2, 0.5)  # old or new state, never a mix


class TestEngineAdmin:
    def test_roster(self, fixture_service):
        roster = fixture_service.engines()
        assert [(e["engine_id"], e["weight"], e["adapter"]) for e in roster] == [
            ("duckduckgo", 0.3, "fixture"),
            ("hakia", 0.2, "fixture"),
            ("sensebot", 0.1, "fixture"),
        ]

    def test_set_weight_persists_across_restart(self, seid_copy):
        service = SearchService.from_config(AppConfig(seid_path=seid_copy))
        service.set_weight("hakia", 0.45)
        reloaded = SearchService.from_config(AppConfig(seid_path=seid_copy))
        weights = {e["engine_id"]: e["weight"] for e in reloaded.engines()}
        assert weights["hakia"] == 0.45

    def test_set_weight_changes_ranking(self, fixture_service):
        fixture_service.set_weight("sensebot", 0.5)
        response = fixture_service.search("semantic web")
        top = response["results"][0]
        assert "sensebot" in {e["engine_id"] for e in top["engines"]}


def test_to_json_stable_bytes(fixture_service):
    first = fixture_service.search("semantic web")
    second = fixture_service.search("semantic web")
    first["timing_ms"] = second["timing_ms"] = 0
    assert to_json(first) == to_json(second)
