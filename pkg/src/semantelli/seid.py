"""Engine registry with per-query priority resolution.

The registry (persisted as a small line-oriented text file) holds each
engine's initial weight plus optional keyword affinities that bump an
engine's weight when the query touches its specialty. ``resolve_plan``
turns registry state plus the query combinations into a per-engine plan:
resolved weight and a dense 1..K priority ranking.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import (
    MalformedSeidFile,
    NoEnginesEnabled,
    UnknownEngine,
    UnknownEngineReference,
    WeightOutOfRange,
)
from .query import QueryCombination


@dataclass(frozen=True)
class EngineDescriptor:
    engine_id: str
    display_name: str
    initial_weight: float
    enabled: bool = True


@dataclass(frozen=True)
class DomainAffinity:
    """Keyword-scoped weight override for one engine."""

    keyword: str
    engine_id: str
    weight_override: float


@dataclass(frozen=True)
class SeidState:
    """Immutable snapshot of the engine registry."""

    engines: tuple[EngineDescriptor, ...]
    affinities: tuple[DomainAffinity, ...] = ()

    def get(self, engine_id: str) -> EngineDescriptor:
        for engine in self.engines:
            if engine.engine_id == engine_id:
                return engine
        raise UnknownEngine(f"unknown engine: {engine_id!r}")

    def engine_ids(self) -> list[str]:
        return [engine.engine_id for engine in self.engines]


@dataclass(frozen=True)
class PlanEntry:
    engine_id: str
    resolved_weight: float
    priority: int
    combinations: tuple[QueryCombination, ...]


@dataclass(frozen=True)
class EnginePlan:
    """Enabled engines ranked 1..K by resolved weight for one query."""

    entries: tuple[PlanEntry, ...]

    def weight_of(self, engine_id: str) -> float:
        return self._by_id(engine_id).resolved_weight

    def priority_of(self, engine_id: str) -> int:
        return self._by_id(engine_id).priority

    def engine_ids(self) -> list[str]:
        return [entry.engine_id for entry in self.entries]

    def _by_id(self, engine_id: str) -> PlanEntry:
        for entry in self.entries:
            if entry.engine_id == engine_id:
                return entry
        raise UnknownEngine(f"engine not in plan: {engine_id!r}")


def resolve_plan(
    combinations: list[QueryCombination] | tuple[QueryCombination, ...],
    state: SeidState,
) -> EnginePlan:
    """Rank enabled engines for this query.

    Each engine's resolved weight is the max of its initial weight and any
    affinity override whose keyword occurs (case-insensitive substring) in
    at least one combination phrase. Priorities go 1..K by descending
    weight; equal weights break ties by engine id so plans are stable.
    """
    enabled = [engine for engine in state.engines if engine.enabled]
    if not enabled:
        raise NoEnginesEnabled("no enabled engines in the registry")

    phrases = [combo.phrase.lower() for combo in combinations]
    resolved: dict[str, float] = {}
    for engine in enabled:
        weight = engine.initial_weight
        for affinity in state.affinities:
            if affinity.engine_id != engine.engine_id:
                continue
            if any(affinity.keyword in phrase for phrase in phrases):
                weight = max(weight, affinity.weight_override)
        resolved[engine.engine_id] = weight

    ranked = sorted(resolved, key=lambda eid: (-resolved[eid], eid))
    combos = tuple(combinations)
    entries = tuple(
        PlanEntry(engine_id=eid, resolved_weight=resolved[eid], priority=pos, combinations=combos)
        for pos, eid in enumerate(ranked, start=1)
    )
    return EnginePlan(entries=entries)


def set_engine_weight(state: SeidState, engine_id: str, weight: float) -> SeidState:
    """Return a copy of ``state`` with one engine's initial weight changed."""
    if not 0.0 <= weight <= 1.0:
        raise WeightOutOfRange(f"weight must be in [0, 1], got {weight}")
    state.get(engine_id)  # raises UnknownEngine
    engines = tuple(
        replace(engine, initial_weight=weight) if engine.engine_id == engine_id else engine
        for engine in state.engines
    )
    return replace(state, engines=engines)


# --- persistence -----------------------------------------------------------
#
# File format (UTF-8, '#' starts a comment, values with spaces are quoted):
#
#   [engines]
#   <engine_id> <display_name> <initial_weight> <true|false>
#   [affinities]
#   <keyword> <engine_id> <weight_override>


def loads_seid(text: str) -> SeidState:
    engines: list[EngineDescriptor] = []
    seen_ids: set[str] = set()
    affinities: list[DomainAffinity] = []
    section: str | None = None

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        try:
            fields = shlex.split(raw_line, comments=True)
        except ValueError as exc:
            raise MalformedSeidFile(str(exc), line=lineno) from exc
        if not fields:
            continue
        if fields == ["[engines]"]:
            section = "engines"
            continue
        if fields == ["[affinities]"]:
            section = "affinities"
            continue
        if section is None:
            raise MalformedSeidFile("data before any section header", line=lineno)

        if section == "engines":
            if len(fields) != 4:
                raise MalformedSeidFile(
                    f"expected 4 engine fields, got {len(fields)}", line=lineno
                )
            engine_id, display_name, weight_text, enabled_text = fields
            weight = _parse_weight(weight_text, lineno)
            if enabled_text not in ("true", "false"):
                raise MalformedSeidFile(
                    f"enabled flag must be true or false, got {enabled_text!r}", line=lineno
                )
            if engine_id in seen_ids:
                raise MalformedSeidFile(f"duplicate engine id {engine_id!r}", line=lineno)
            seen_ids.add(engine_id)
            engines.append(
                EngineDescriptor(
                    engine_id=engine_id,
                    display_name=display_name,
                    initial_weight=weight,
                    enabled=enabled_text == "true",
                )
            )
        else:
            if len(fields) != 3:
                raise MalformedSeidFile(
                    f"expected 3 affinity fields, got {len(fields)}", line=lineno
                )
            keyword, engine_id, weight_text = fields
            weight = _parse_weight(weight_text, lineno)
            if engine_id not in seen_ids:
                raise UnknownEngineReference(
                    f"affinity references undeclared engine {engine_id!r}", line=lineno
                )
            affinities.append(
                DomainAffinity(
                    keyword=keyword.lower(), engine_id=engine_id, weight_override=weight
                )
            )

    return SeidState(engines=tuple(engines), affinities=tuple(affinities))


def _parse_weight(text: str, lineno: int) -> float:
    try:
        weight = float(text)
    except ValueError as exc:
        raise MalformedSeidFile(f"bad weight {text!r}", line=lineno) from exc
    if not 0.0 <= weight <= 1.0:
        raise MalformedSeidFile(f"weight {weight} outside [0, 1]", line=lineno)
    return weight


def dumps_seid(state: SeidState) -> str:
    lines = ["[engines]"]
    for engine in state.engines:
        lines.append(
            f"{_quote(engine.engine_id)} {_quote(engine.display_name)} "
            f"{engine.initial_weight:.3f} {'true' if engine.enabled else 'false'}"
        )
    lines.append("[affinities]")
    for affinity in state.affinities:
        lines.append(
            f"{_quote(affinity.keyword)} {_quote(affinity.engine_id)} "
            f"{affinity.weight_override:.3f}"
        )
    return "\n".join(lines) + "\n"


def _quote(value: str) -> str:
    if value and not any(ch.isspace() for ch in value) and '"' not in value:
        return value
    escaped = value.replace('"', '\\"')
    return f'"{escaped}"'


def load_seid(path: str | Path) -> SeidState:
    return loads_seid(Path(path).read_text(encoding="utf-8"))


def save_seid(state: SeidState, path: str | Path) -> None:
    Path(path).write_text(dumps_seid(state), encoding="utf-8")
