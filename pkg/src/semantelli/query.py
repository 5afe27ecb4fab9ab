"""Query normalization and combination generation.

A raw user query is normalized into an ordered token list, then expanded
into every contiguous n-gram up to a configured length. Downstream stages
fan each combination out to the backends, so the generator deduplicates
phrases and caps the total count to bound request volume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyQuery, QueryTooLong

MAX_QUERY_CHARS = 1024


@dataclass(frozen=True)
class QueryCombination:
    """One expanded form of the query: a contiguous run of tokens.

    ``span`` is (start, length) within the normalized token list;
    ``phrase`` is the tokens joined by single spaces.
    """

    tokens: tuple[str, ...]
    phrase: str
    span: tuple[int, int]

    @classmethod
    def from_tokens(cls, tokens: tuple[str, ...], start: int) -> "QueryCombination":
        return cls(tokens=tokens, phrase=" ".join(tokens), span=(start, len(tokens)))


@dataclass(frozen=True)
class QCGConfig:
    """Knobs for the combination generator."""

    max_tokens_per_combination: int = 4
    stopwords: frozenset[str] = field(default_factory=frozenset)
    min_token_length: int = 2
    max_combinations: int = 32

    def __post_init__(self) -> None:
        if self.max_tokens_per_combination < 1:
            raise ValueError("max_tokens_per_combination must be >= 1")
        if self.max_combinations < 1:
            raise ValueError("max_combinations must be >= 1")
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword list: one term per line, ``#`` starts a comment."""
    terms: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        term = line.split("#", 1)[0].strip().lower()
        if term:
            terms.add(term)
    return frozenset(terms)


def _strip_punctuation(token: str) -> str:
    return "".join(ch for ch in token if ch.isalnum())


def normalize(text: str, config: QCGConfig | None = None) -> list[str]:
    """Turn raw query text into an ordered, filtered token list.

    Lowercases, drops non-alphanumeric characters from each
    whitespace-separated token, then removes stopwords and tokens shorter
    than ``min_token_length``. If that filtering would leave nothing, the
    unfiltered tokens are kept instead so an all-stopword query still
    searches for something.

    Raises EmptyQuery when the text is blank or contains no alphanumeric
    content at all, and QueryTooLong past 1024 characters.
    """
    config = config or QCGConfig()
    stripped = text.strip()
    if not stripped:
        raise EmptyQuery("query is empty")
    if len(stripped) > MAX_QUERY_CHARS:
        raise QueryTooLong(f"query exceeds {MAX_QUERY_CHARS} characters")

    tokens = [_strip_punctuation(tok) for tok in stripped.lower().split()]
    tokens = [tok for tok in tokens if tok]
    if not tokens:
        raise EmptyQuery("query has no searchable tokens")

    filtered = [
        tok
        for tok in tokens
        if len(tok) >= config.min_token_length and tok not in config.stopwords
    ]
    return filtered if filtered else tokens


def generate_combinations(
    tokens: list[str], config: QCGConfig | None = None
) -> list[QueryCombination]:
    """Enumerate contiguous n-grams, longest first.

    All n-grams with 1 <= n <= min(max_tokens_per_combination, len(tokens)),
    ordered by descending n then by start position. Duplicate phrases keep
    their first occurrence; the list is cut at ``max_combinations``. The
    first entry is always the longest n-gram starting at position 0.
    """
    if not tokens:
        raise ValueError("tokens must be non-empty")
    config = config or QCGConfig()

    longest = min(config.max_tokens_per_combination, len(tokens))
    seen: set[str] = set()
    combos: list[QueryCombination] = []
    for n in range(longest, 0, -1):
        for start in range(len(tokens) - n + 1):
            combo = QueryCombination.from_tokens(tuple(tokens[start : start + n]), start)
            if combo.phrase in seen:
                continue
            seen.add(combo.phrase)
            combos.append(combo)
            if len(combos) >= config.max_combinations:
                return combos
    return combos


def expand(text: str, config: QCGConfig | None = None) -> list[QueryCombination]:
    """normalize + generate_combinations in one call."""
    config = config or QCGConfig()
    return generate_combinations(normalize(text, config), config)
