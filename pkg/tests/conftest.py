import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracle` importable

from semantelli.config import AppConfig, data_path
from semantelli.pipeline import SearchService
from semantelli.query import QueryCombination
from semantelli.seid import EngineDescriptor, SeidState


def make_combos(*phrases: str) -> tuple[QueryCombination, ...]:
    """Build combination objects straight from phrases (span is synthetic)."""
    return tuple(
        QueryCombination(tokens=tuple(p.split()), phrase=p, span=(0, len(p.split())))
        for p in phrases
    )


@pytest.fixture
def default_state() -> SeidState:
    return SeidState(
        engines=(
            EngineDescriptor("duckduckgo", "DuckDuckGo", 0.3),
            EngineDescriptor("hakia", "Hakia", 0.2),
            EngineDescriptor("sensebot", "SenseBot", 0.1),
        )
    )


@pytest.fixture
def seid_copy(tmp_path) -> Path:
    """Writable copy of the shipped engine registry."""
    dest = tmp_path / "seid.txt"
    shutil.copy(data_path("seid.txt"), dest)
    return dest


@pytest.fixture
def fixture_service(seid_copy) -> SearchService:
    """Service over the bundled fixtures, with a writable registry copy."""
    config = AppConfig(seid_path=seid_copy)
    return SearchService.from_config(config)
