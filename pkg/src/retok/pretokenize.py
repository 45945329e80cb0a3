"""Pattern-based pretokenization: the pre-split inside which BPE merges apply.

Tokens never cross pretoken boundaries, so the pretokenizer decides things
like whether a leading space sticks to the following word and how digit runs
are chunked. Two presets are shipped:

* ``gpt2``   -- words with optional leading space, whole digit runs,
  punctuation runs, whitespace (contraction suffixes split off).
* ``llama3`` -- same family, but digit runs are chunked left-greedily into
  groups of at most three digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .errors import TokenizerFileError

GPT2_PATTERN = r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""

LLAMA3_PATTERN = (
    r"""(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}"""
    r"""| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+"""
)

PRESET_PATTERNS = {
    "gpt2": GPT2_PATTERN,
    "llama3": LLAMA3_PATTERN,
}

SPAN_KINDS = ("word", "whitespace", "digits", "punctuation", "other")


@dataclass(frozen=True)
class PretokenSpan:
    """Half-open byte span [start, end) of one pretoken, with a coarse kind."""

    start: int
    end: int
    kind: str
    text: str

    def __post_init__(self):
        assert self.kind in SPAN_KINDS


@dataclass(frozen=True)
class PretokConfig:
    """Declarative pretokenizer configuration.

    ``pattern`` is a regex (``regex`` module syntax, so ``\\p{L}`` works) whose
    left-to-right matches partition the text. ``byte_level`` selects whether
    vocab files use the byte-to-printable alphabet and whether base units are
    single bytes (True) or single characters (False).
    """

    pattern: str = GPT2_PATTERN
    byte_level: bool = True
    name: str = "gpt2"

    _compiled: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        try:
            compiled = regex.compile(self.pattern)
        except regex.error as exc:
            raise TokenizerFileError(f"bad pretokenizer pattern: {exc}") from exc
        object.__setattr__(self, "_compiled", compiled)

    @classmethod
    def preset(cls, name: str, byte_level: bool = True) -> "PretokConfig":
        if name not in PRESET_PATTERNS:
            raise TokenizerFileError(
                f"unknown pretokenizer preset {name!r}; known: {sorted(PRESET_PATTERNS)}"
            )
        return cls(pattern=PRESET_PATTERNS[name], byte_level=byte_level, name=name)

    @classmethod
    def from_file(cls, path: str | Path) -> "PretokConfig":
        """Load a JSON config: {"preset": "gpt2"} or {"pattern": "...", "byte_level": true}."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise TokenizerFileError(f"cannot read pretokenizer config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise TokenizerFileError(f"pretokenizer config {path} must be a JSON object")
        byte_level = raw.get("byte_level", True)
        if "preset" in raw:
            return cls.preset(raw["preset"], byte_level=byte_level)
        if "pattern" in raw:
            return cls(pattern=raw["pattern"], byte_level=byte_level, name=raw.get("name", "custom"))
        raise TokenizerFileError(f"pretokenizer config {path} needs 'preset' or 'pattern'")


def classify_span(text: str) -> str:
    """Coarse kind of a pretoken: word / whitespace / digits / punctuation / other."""
    if text.isspace():
        return "whitespace"
    core = text.lstrip()
    has_alpha = any(c.isalpha() for c in core)
    has_digit = any(c.isdigit() for c in core)
    if has_alpha and not has_digit:
        return "word"
    if has_digit and not has_alpha:
        return "digits"
    if not has_alpha and not has_digit:
        return "punctuation"
    return "other"


def pretokenize(text: str, config: PretokConfig) -> list[PretokenSpan]:
    """Split ``text`` into spans that partition it (byte offsets, in order).

    Total function: any character not claimed by the pattern is emitted as an
    ``other`` span so the partition invariant always holds.
    """
    spans: list[PretokenSpan] = []
    byte_pos = 0
    char_pos = 0

    def emit(chunk: str, kind: str | None = None):
        nonlocal byte_pos
        nbytes = len(chunk.encode("utf-8"))
        spans.append(
            PretokenSpan(byte_pos, byte_pos + nbytes, kind or classify_span(chunk), chunk)
        )
        byte_pos += nbytes

    for match in config._compiled.finditer(text):
        if match.start() > char_pos:
            emit(text[char_pos : match.start()], "other")
        emit(match.group())
        char_pos = match.end()
    if char_pos < len(text):
        emit(text[char_pos:], "other")
    return spans
