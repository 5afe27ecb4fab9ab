"""Federated metasearch: fan a query out to pluggable engines, merge
duplicates across them, and order everything by the telliFactor score."""

from .backends import (
    AdapterRegistry,
    FixtureAdapter,
    GatewayConfig,
    HttpJsonAdapter,
    RawResult,
    ScriptedAdapter,
    dispatch,
)
from .config import AppConfig, load_config
from .errors import SemantelliError
from .pipeline import SearchService, to_json
from .query import QCGConfig, QueryCombination, expand, generate_combinations, normalize
from .ranking import ScoreParams, ScoredResult, rank
from .seid import (
    DomainAffinity,
    EngineDescriptor,
    EnginePlan,
    SeidState,
    load_seid,
    resolve_plan,
    save_seid,
    set_engine_weight,
)
from .store import MergedResult, SearchSession, filter_and_merge, hit_count, normalize_url

__version__ = "0.1.0"

__all__ = [
    "AdapterRegistry",
    "AppConfig",
    "DomainAffinity",
    "EngineDescriptor",
    "EnginePlan",
    "FixtureAdapter",
    "GatewayConfig",
    "HttpJsonAdapter",
    "MergedResult",
    "QCGConfig",
    "QueryCombination",
    "RawResult",
    "ScoreParams",
    "ScoredResult",
    "ScriptedAdapter",
    "SearchService",
    "SearchSession",
    "SeidState",
    "SemantelliError",
    "dispatch",
    "expand",
    "filter_and_merge",
    "generate_combinations",
    "hit_count",
    "load_config",
    "load_seid",
    "normalize",
    "normalize_url",
    "rank",
    "resolve_plan",
    "save_seid",
    "set_engine_weight",
    "to_json",
    "__version__",
]
