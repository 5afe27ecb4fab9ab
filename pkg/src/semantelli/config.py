"""Application configuration.

Settings come from a plain ``key=value`` file (``#`` comments allowed),
selected by ``--config`` or the ``SEMANTELLI_CONFIG`` environment
variable; anything not set falls back to the packaged defaults (bundled
engine registry, fixture corpora, and stopword list).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .backends import GatewayConfig
from .errors import ConfigError
from .query import QCGConfig, load_stopwords
from .ranking import ScoreParams

ENV_CONFIG_PATH = "SEMANTELLI_CONFIG"

DEFAULT_LISTEN = "127.0.0.1:8765"
DEFAULT_RESULT_LIMIT = 20


def data_path(*parts: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(str(resources.files("semantelli").joinpath("data", *parts)))


@dataclass
class AppConfig:
    seid_path: Path = field(default_factory=lambda: data_path("seid.txt"))
    fixture_dir: Path = field(default_factory=lambda: data_path("fixtures"))
    stopwords_path: Path = field(default_factory=lambda: data_path("stopwords.txt"))
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    score: ScoreParams = field(default_factory=ScoreParams)
    qcg: QCGConfig = field(default_factory=QCGConfig)
    listen: str = DEFAULT_LISTEN
    result_limit: int = DEFAULT_RESULT_LIMIT
    ui_dir: Path | None = None

    def validate(self) -> "AppConfig":
        for label, path in (
            ("seid_path", self.seid_path),
            ("fixture_dir", self.fixture_dir),
            ("stopwords_path", self.stopwords_path),
        ):
            if not Path(path).exists():
                raise ConfigError(f"{label} does not exist: {path}")
        if self.ui_dir is not None and not Path(self.ui_dir).is_dir():
            raise ConfigError(f"ui_dir is not a directory: {self.ui_dir}")
        return self


_PARSERS = {
    "seid_path": ("seid_path", Path),
    "fixture_dir": ("fixture_dir", Path),
    "stopwords_path": ("stopwords_path", Path),
    "listen": ("listen", str),
    "result_limit": ("result_limit", int),
    "ui_dir": ("ui_dir", Path),
    "per_engine_timeout": ("gateway.per_engine_timeout", float),
    "max_results_per_engine": ("gateway.max_results_per_engine_per_combination", int),
    "max_parallel_requests": ("gateway.max_parallel_requests", int),
    "damping": ("score.damping", float),
    "redundancy_increment": ("score.redundancy_increment", float),
    "relevance_divisor": ("score.relevance_divisor", float),
    "component_cap": ("score.component_cap", int),
    "relevance_numerator": ("score.relevance_numerator", str),
    "max_tokens_per_combination": ("qcg.max_tokens_per_combination", int),
    "min_token_length": ("qcg.min_token_length", int),
    "max_combinations": ("qcg.max_combinations", int),
}


def load_config(path: str | Path | None = None) -> AppConfig:
    """Build an AppConfig from a key=value file, or defaults when absent.

    ``path`` wins over ``SEMANTELLI_CONFIG``; with neither set the
    packaged defaults are used directly.
    """
    if path is None:
        env_path = os.environ.get(ENV_CONFIG_PATH)
        path = Path(env_path) if env_path else None
    if path is None:
        return AppConfig().validate()

    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")

    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value

    config = AppConfig()
    gateway_kwargs: dict[str, object] = {}
    score_kwargs: dict[str, object] = {}
    qcg_kwargs: dict[str, object] = {}
    for key, value in raw.items():
        target, cast = _PARSERS[key]
        try:
            parsed = cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
        if target.startswith("gateway."):
            gateway_kwargs[target.split(".", 1)[1]] = parsed
        elif target.startswith("score."):
            score_kwargs[target.split(".", 1)[1]] = parsed
        elif target.startswith("qcg."):
            qcg_kwargs[target.split(".", 1)[1]] = parsed
        else:
            setattr(config, target, parsed)

    try:
        if gateway_kwargs:
            config.gateway = GatewayConfig(**gateway_kwargs)
        if score_kwargs:
            config.score = ScoreParams(**score_kwargs)
        if qcg_kwargs:
            config.qcg = QCGConfig(**qcg_kwargs)  # type: ignore[arg-type]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()


def apply_stopwords(config: AppConfig) -> AppConfig:
    """Load the configured stopword file into the query settings."""
    words = load_stopwords(config.stopwords_path)
    config.qcg = QCGConfig(
        max_tokens_per_combination=config.qcg.max_tokens_per_combination,
        stopwords=words,
        min_token_length=config.qcg.min_token_length,
        max_combinations=config.qcg.max_combinations,
    )
    return config
