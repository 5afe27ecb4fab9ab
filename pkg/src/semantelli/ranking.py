"""telliFactor scoring and final result ordering.

Each merged result gets a score

    telli_factor = effective_weight * damping + relevance_factor

where the effective weight starts from the best contributing engine's
plan weight and gains a fixed increment per additional engine that
returned the same page (clamped to 1.0), and the relevance factor is

    relevance_factor = (hit_count + out_links) / relevance_divisor

with both counts capped so a single spammy page cannot run away. The
damping constant scales the engine-trust term in one shot; there is no
iteration. An alternative numerator, (hit_count + 1), is selectable for
comparison via ``relevance_numerator``.

Results are ordered by descending telli_factor; exact ties fall back to
the best rank the page achieved on its own engine, then to the canonical
URL so the order is total and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .seid import EnginePlan
from .store import MergedResult

NUMERATOR_HIT_PLUS_LINKS = "h_plus_l"
NUMERATOR_HIT_PLUS_ONE = "h_plus_one"
_NUMERATORS = (NUMERATOR_HIT_PLUS_LINKS, NUMERATOR_HIT_PLUS_ONE)


@dataclass(frozen=True)
class ScoreParams:
    damping: float = 0.85
    redundancy_increment: float = 0.1
    relevance_divisor: float = 1000.0
    component_cap: int = 500
    relevance_numerator: str = NUMERATOR_HIT_PLUS_LINKS

    def __post_init__(self) -> None:
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")
        if self.redundancy_increment < 0.0:
            raise ValueError("redundancy_increment must be >= 0")
        if self.relevance_divisor <= 0.0:
            raise ValueError("relevance_divisor must be positive")
        if self.component_cap < 0:
            raise ValueError("component_cap must be >= 0")
        if self.relevance_numerator not in _NUMERATORS:
            raise ValueError(
                f"relevance_numerator must be one of {_NUMERATORS}, "
                f"got {self.relevance_numerator!r}"
            )


@dataclass(frozen=True)
class ScoredResult:
    merged: MergedResult
    effective_weight: float
    relevance_factor: float
    telli_factor: float
    final_rank: int


def relevance_factor(hit_count: int, out_links: int, params: ScoreParams) -> float:
    """(capped hits + capped out-links) / divisor, or hits + 1 in alt mode."""
    if hit_count < 0 or out_links < 0:
        raise ValueError("hit_count and out_links must be >= 0")
    hits = min(hit_count, params.component_cap)
    if params.relevance_numerator == NUMERATOR_HIT_PLUS_ONE:
        return (hits + 1) / params.relevance_divisor
    links = min(out_links, params.component_cap)
    return (hits + links) / params.relevance_divisor


def effective_weight(base_weight: float, redundancy_count: int, params: ScoreParams) -> float:
    """Base engine weight boosted per duplicate source, clamped to 1.0."""
    if not 0.0 <= base_weight <= 1.0:
        raise ValueError("base_weight must be in [0, 1]")
    if redundancy_count < 0:
        raise ValueError("redundancy_count must be >= 0")
    return min(1.0, base_weight + params.redundancy_increment * redundancy_count)


def telli_factor(weight: float, relevance: float, params: ScoreParams) -> float:
    return weight * params.damping + relevance


def score_result(merged: MergedResult, plan: EnginePlan, params: ScoreParams) -> tuple[float, float, float]:
    """Compute (effective_weight, relevance_factor, telli_factor) for one result."""
    base = max(plan.weight_of(c.engine_id) for c in merged.contributors)
    weight = effective_weight(base, merged.redundancy_count, params)
    relevance = relevance_factor(merged.hit_count, merged.out_links, params)
    return weight, relevance, telli_factor(weight, relevance, params)


def rank(
    merged: list[MergedResult],
    plan: EnginePlan,
    params: ScoreParams | None = None,
) -> list[ScoredResult]:
    """Score and totally order merged results.

    Descending telli_factor, then ascending best origin rank, then
    ascending canonical URL; final_rank runs 1..n with no gaps.
    """
    params = params or ScoreParams()
    scored: list[tuple[float, float, float, MergedResult]] = []
    for result in merged:
        weight, relevance, telli = score_result(result, plan, params)
        scored.append((weight, relevance, telli, result))

    scored.sort(key=lambda item: (-item[2], item[3].best_origin_rank, item[3].canonical_url))
    return [
        ScoredResult(
            merged=result,
            effective_weight=weight,
            relevance_factor=relevance,
            telli_factor=telli,
            final_rank=position,
        )
        for position, (weight, relevance, telli, result) in enumerate(scored, start=1)
    ]
