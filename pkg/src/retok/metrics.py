"""Generation-quality metrics and score bookkeeping.

Spelling is the fraction of multi-character words found in a frequency word
list; grammaticality is 1 - mistakes/words, gated to exactly 0 for generations
whose spelling score is below 0.5 (repetitive gibberish otherwise sneaks
through with zero detected mistakes). Grammar mistakes come from a pluggable
provider so the toolkit never embeds a grammar engine.
"""

from __future__ import annotations

import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

import requests

from .errors import GrammarProviderError

GRAMMAR_GATE = 0.5


def _strip_punctuation(word: str) -> str:
    start, end = 0, len(word)
    while start < end and unicodedata.category(word[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(word[end - 1]).startswith("P"):
        end -= 1
    return word[start:end]


def qualifying_words(text: str) -> list[str]:
    """Whitespace-delimited words, lowercased, surrounding punctuation stripped,
    keeping only words longer than one character."""
    words = []
    for raw in text.split():
        word = _strip_punctuation(raw).lower()
        if len(word) > 1:
            words.append(word)
    return words


def load_wordlist(path: str | Path | None = None) -> frozenset[str]:
    """Frequency word list as a membership set (bundled list by default)."""
    if path is None:
        text = resources.files("retok.data").joinpath("wordlist.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def load_probe_words(path: str | Path | None = None) -> list[str]:
    """Ordered probe word sample (bundled 500-word list by default)."""
    if path is None:
        text = resources.files("retok.data").joinpath("probe_words.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [w.strip() for w in text.splitlines() if w.strip()]


def spelling_score(generation: str, wordlist: frozenset[str] | set[str]) -> float:
    """Fraction of qualifying words present in the word list (0.0 if none qualify)."""
    words = qualifying_words(generation)
    if not words:
        return 0.0
    return sum(w in wordlist for w in words) / len(words)


def grammaticality_score(mistakes: int, words: int, spelling: float) -> float:
    """max(0, 1 - mistakes/words), gated to 0 when spelling < 0.5."""
    if words <= 0:
        raise ValueError("word count must be positive")
    if mistakes < 0:
        raise ValueError("mistake count must be non-negative")
    if spelling < GRAMMAR_GATE:
        return 0.0
    return max(0.0, 1.0 - mistakes / words)


def retention(canon: float, alt: float) -> float:
    """Alternative-over-canonical score, in percent."""
    if canon <= 0:
        raise ValueError("canonical score must be positive")
    return 100.0 * alt / canon


# -- grammar providers --------------------------------------------------------


class GrammarProvider(Protocol):
    def count_mistakes(self, text: str) -> int: ...


class HttpGrammarProvider:
    """Client for a grammar-check endpoint: POST plain text, get a mistake count.

    Accepted response shapes: a bare integer body, {"mistakes": N}, or a
    LanguageTool-style {"matches": [...]} whose length is the count.
    """

    def __init__(self, endpoint: str, timeout: float = 10.0, session=None):
        self.endpoint = endpoint
        self.timeout = timeout
        self._session = session or requests.Session()

    def count_mistakes(self, text: str) -> int:
        try:
            response = self._session.post(
                self.endpoint,
                data=text.encode("utf-8"),
                headers={"Content-Type": "text/plain; charset=utf-8"},
                timeout=self.timeout,
            )
            response.raise_for_status()
        except requests.RequestException as exc:
            raise GrammarProviderError(f"grammar provider failed: {exc}") from exc
        body = response.text.strip()
        try:
            return int(body)
        except ValueError:
            pass
        try:
            payload = response.json()
        except ValueError as exc:
            raise GrammarProviderError(f"unparseable grammar response: {body[:200]!r}") from exc
        if isinstance(payload, dict):
            if isinstance(payload.get("mistakes"), int):
                return payload["mistakes"]
            if isinstance(payload.get("matches"), list):
                return len(payload["matches"])
        raise GrammarProviderError(f"unparseable grammar response: {body[:200]!r}")


def count_mistakes_batch(
    texts: list[str], provider: GrammarProvider, max_workers: int = 4
) -> list[int]:
    """Mistake counts for many texts with bounded concurrent requests."""
    if not texts:
        return []
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(provider.count_mistakes, texts))


# -- aggregated report --------------------------------------------------------


@dataclass
class MetricReport:
    """Aggregate of per-generation scores; grammaticality only when a provider ran."""

    spelling: list[float] = field(default_factory=list)
    grammaticality: list[float] | None = None
    word_counts: list[int] = field(default_factory=list)

    @property
    def mean_spelling(self) -> float:
        return sum(self.spelling) / len(self.spelling) if self.spelling else 0.0

    @property
    def mean_grammaticality(self) -> float | None:
        if not self.grammaticality:
            return None
        return sum(self.grammaticality) / len(self.grammaticality)


def score_generations(
    generations: list[str],
    wordlist: frozenset[str] | set[str],
    provider: GrammarProvider | None = None,
    max_workers: int = 4,
) -> MetricReport:
    """Spelling (always) and grammaticality (when a provider is given) scores."""
    report = MetricReport()
    for text in generations:
        report.spelling.append(spelling_score(text, wordlist))
        report.word_counts.append(len(text.split()))
    if provider is not None:
        mistakes = count_mistakes_batch(generations, provider, max_workers)
        report.grammaticality = []
        for text, n_mistakes, spell in zip(generations, mistakes, report.spelling):
            words = len(text.split())
            if words == 0:
                report.grammaticality.append(0.0)
            else:
                report.grammaticality.append(grammaticality_score(n_mistakes, words, spell))
    return report
