import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_combos
from semantelli.ranking import (
    NUMERATOR_HIT_PLUS_ONE,
    ScoreParams,
    effective_weight,
    rank,
    relevance_factor,
    telli_factor,
)
from semantelli.seid import EngineDescriptor, SeidState, resolve_plan
from semantelli.store import Contributor, MergedResult

PARAMS = ScoreParams()
TOL = 1e-9


def merged(url, contributors, *, hits=0, links=0, best_rank=None):
    contribs = tuple(Contributor(eid, rank_) for eid, rank_ in contributors)
    return MergedResult(
        canonical_url=url,
        title=f"title {url}",
        snippet="",
        contributors=contribs,
        out_links=links,
        hit_count=hits,
        best_origin_rank=min(r for _, r in contributors) if best_rank is None else best_rank,
    )


def plan_for(weights: dict[str, float]):
    state = SeidState(
        engines=tuple(EngineDescriptor(eid, eid, w) for eid, w in weights.items())
    )
    return resolve_plan(make_combos("x"), state)


DEFAULT_PLAN_WEIGHTS = {"duckduckgo": 0.3, "hakia": 0.2, "sensebot": 0.1}


class TestRelevanceFactor:
    def test_zero_case(self):
        assert relevance_factor(0, 0, PARAMS) == 0.0

    def test_five_five(self):
        assert abs(relevance_factor(5, 5, PARAMS) - 0.010) < TOL

    def test_cap_applies_per_component(self):
        assert abs(relevance_factor(10000, 0, PARAMS) - 0.5) < TOL
        assert abs(relevance_factor(10000, 10000, PARAMS) - 1.0) < TOL

    def test_upper_bound(self):
        cap_total = 2 * PARAMS.component_cap / PARAMS.relevance_divisor
        assert relevance_factor(10**6, 10**6, PARAMS) <= cap_total

    def test_hit_plus_one_mode_ignores_links(self):
        params = ScoreParams(relevance_numerator=NUMERATOR_HIT_PLUS_ONE)
        assert abs(relevance_factor(5, 999, params) - 0.006) < TOL
        assert abs(relevance_factor(0, 0, params) - 0.001) < TOL

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            relevance_factor(-1, 0, PARAMS)


class TestEffectiveWeight:
    def test_single_engine_weight_unchanged(self):
        assert abs(effective_weight(0.3, 0, PARAMS) - 0.3) < TOL

    def test_one_duplicate_adds_increment(self):
        assert abs(effective_weight(0.3, 1, PARAMS) - 0.4) < TOL

    def test_clamped_at_one(self):
        assert effective_weight(0.95, 2, PARAMS) == 1.0

    def test_bad_base_rejected(self):
        with pytest.raises(ValueError):
            effective_weight(1.2, 0, PARAMS)


class TestTelliFactor:
    def test_weight_only(self):
        assert abs(telli_factor(0.3, 0.0, PARAMS) - 0.255) < TOL

    def test_weight_plus_relevance(self):
        assert abs(telli_factor(0.2, 0.010, PARAMS) - 0.180) < TOL

    def test_zero(self):
        assert telli_factor(0.0, 0.0, PARAMS) == 0.0

    def test_custom_damping(self):
        params = ScoreParams(damping=0.5)
        assert abs(telli_factor(0.4, 0.0, params) - 0.2) < TOL


class TestRank:
    def test_engine_trust_orders_equal_pages(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        results = [
            merged("https://a.example/ddg", [("duckduckgo", 1)]),
            merged("https://a.example/hakia", [("hakia", 1)]),
        ]
        ordered = rank(results, plan, PARAMS)
        assert [r.merged.canonical_url for r in ordered] == [
            "https://a.example/ddg",
            "https://a.example/hakia",
        ]
        assert abs(ordered[0].telli_factor - 0.255) < TOL
        assert abs(ordered[1].telli_factor - 0.170) < TOL

    def test_identical_scores_fall_back_to_origin_rank(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        results = [
            merged("https://a.example/worse", [("duckduckgo", 3)], hits=2, links=2),
            merged("https://a.example/better", [("duckduckgo", 1)], hits=2, links=2),
        ]
        ordered = rank(results, plan, PARAMS)
        assert ordered[0].merged.canonical_url == "https://a.example/better"
        assert ordered[0].telli_factor == ordered[1].telli_factor

    def test_remaining_tie_broken_by_url(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        results = [
            merged("https://b.example/x", [("duckduckgo", 1)]),
            merged("https://a.example/x", [("duckduckgo", 1)]),
        ]
        ordered = rank(results, plan, PARAMS)
        assert [r.merged.canonical_url for r in ordered] == [
            "https://a.example/x",
            "https://b.example/x",
        ]

    def test_empty_input(self):
        assert rank([], plan_for(DEFAULT_PLAN_WEIGHTS), PARAMS) == []

    def test_final_ranks_contiguous(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        results = [
            merged(f"https://a.example/{i}", [("duckduckgo", i + 1)], hits=i)
            for i in range(5)
        ]
        ordered = rank(results, plan, PARAMS)
        assert [r.final_rank for r in ordered] == [1, 2, 3, 4, 5]

    def test_base_weight_is_best_contributor(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        result = merged("https://a.example/x", [("hakia", 1), ("sensebot", 2)])
        ordered = rank([result], plan, PARAMS)
        # max(0.2, 0.1) + one duplicate increment = 0.3
        assert abs(ordered[0].effective_weight - 0.3) < TOL

    def test_duplicate_dominance_shift(self):
        plan = plan_for(DEFAULT_PLAN_WEIGHTS)
        solo = merged("https://a.example/x", [("duckduckgo", 1)], hits=3, links=4)
        boosted = merged("https://a.example/x", [("duckduckgo", 1), ("hakia", 2)],
                         hits=3, links=4)
        solo_score = rank([solo], plan, PARAMS)[0].telli_factor
        boosted_score = rank([boosted], plan, PARAMS)[0].telli_factor
        assert abs(boosted_score - solo_score - 0.085) < TOL


contributor_sets = st.lists(
    st.tuples(st.sampled_from(list(DEFAULT_PLAN_WEIGHTS)), st.integers(1, 9)),
    min_size=1,
    max_size=3,
    unique_by=lambda pair: pair[0],
)


@st.composite
def merged_results(draw, index):
    contributors = draw(contributor_sets)
    return merged(
        f"https://gen.example/{index}-{draw(st.integers(0, 99))}",
        contributors,
        hits=draw(st.integers(0, 600)),
        links=draw(st.integers(0, 600)),
    )


@st.composite
def merged_lists(draw):
    size = draw(st.integers(min_value=0, max_value=8))
    return [draw(merged_results(i)) for i in range(size)]


@given(merged_lists())
def test_scores_non_increasing(results):
    ordered = rank(results, plan_for(DEFAULT_PLAN_WEIGHTS), PARAMS)
    scores = [r.telli_factor for r in ordered]
    assert all(a >= b for a, b in zip(scores, scores[1:]))


@given(merged_lists(), st.integers(0, 2**32 - 1))
def test_rank_is_stable_under_shuffle(results, seed):
    plan = plan_for(DEFAULT_PLAN_WEIGHTS)
    baseline = rank(results, plan, PARAMS)
    shuffled = list(results)
    random.Random(seed).shuffle(shuffled)
    assert rank(shuffled, plan, PARAMS) == baseline


@given(merged_lists(), st.integers(0, 400))
def test_monotonic_in_hits_below_cap(results, extra):
    plan = plan_for(DEFAULT_PLAN_WEIGHTS)
    if not results:
        return
    target = results[0]
    if target.hit_count + extra > PARAMS.component_cap:
        extra = max(0, PARAMS.component_cap - target.hit_count)
    bumped = merged(
        target.canonical_url,
        [(c.engine_id, c.origin_rank) for c in target.contributors],
        hits=target.hit_count + extra,
        links=target.out_links,
    )
    before = rank(results, plan, PARAMS)
    after = rank([bumped] + results[1:], plan, PARAMS)
    position_before = [r.merged.canonical_url for r in before].index(target.canonical_url)
    position_after = [r.merged.canonical_url for r in after].index(target.canonical_url)
    assert position_after <= position_before
