"""BPE tokenizer loading, canonical encoding, and exact decoding.

Loads the vocab.json / merges.txt pair emitted by common tokenizer
distributions, keeps every surface unit as raw bytes internally, and encodes
by applying merges lowest-rank-first within each pretoken. The tokenizer is
immutable after load; every operation here is a pure function over it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from . import _kernels
from .bytemap import printable_to_unit, unit_to_printable
from .errors import TokenizerFileError, UncoverableTextError, UnknownTokenIdError
from .pretokenize import PretokConfig, PretokenSpan, pretokenize


@dataclass(frozen=True)
class Vocabulary:
    """Bijection between surface units (raw bytes) and non-negative integer IDs."""

    unit_to_id: dict[bytes, int]
    id_to_unit: dict[int, bytes]
    byte_level: bool

    @classmethod
    def from_units(cls, unit_to_id: dict[bytes, int], byte_level: bool) -> "Vocabulary":
        ids = list(unit_to_id.values())
        if len(set(ids)) != len(ids):
            raise TokenizerFileError("duplicate token IDs in vocabulary")
        if any(i < 0 for i in ids):
            raise TokenizerFileError("negative token ID in vocabulary")
        if byte_level:
            missing = [b for b in range(256) if bytes([b]) not in unit_to_id]
            if missing:
                raise TokenizerFileError(
                    f"byte-level vocabulary is missing {len(missing)} single-byte units "
                    f"(first: {missing[0]:#04x})"
                )
        return cls(dict(unit_to_id), {i: u for u, i in unit_to_id.items()}, byte_level)

    def __len__(self) -> int:
        return len(self.unit_to_id)

    def __contains__(self, unit: bytes) -> bool:
        return unit in self.unit_to_id

    @cached_property
    def max_unit_len(self) -> int:
        return max(len(u) for u in self.unit_to_id)


@dataclass(frozen=True)
class MergeRules:
    """Ordered merge pairs; rank is the list position."""

    pairs: list[tuple[bytes, bytes]]

    def __len__(self) -> int:
        return len(self.pairs)

    def rank_of(self, left: bytes, right: bytes) -> int | None:
        try:
            return self.pairs.index((left, right))
        except ValueError:
            return None


@dataclass
class TokenSequence:
    """Ordered token IDs with their surface units; concatenation is the source bytes."""

    ids: list[int]
    units: list[bytes]
    provenance: dict | None = None

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, TokenSequence) and self.ids == other.ids

    def byte_text(self) -> bytes:
        return b"".join(self.units)

    def text(self) -> str:
        return self.byte_text().decode("utf-8")

    def printable_units(self) -> list[str]:
        return [unit_to_printable(u) for u in self.units]


@dataclass(frozen=True)
class Tokenizer:
    """Immutable bundle of vocabulary, ranked merges, and the pretokenizer."""

    vocab: Vocabulary
    merges: MergeRules
    pretok: PretokConfig
    _pair_lookup: dict = field(repr=False, compare=False, default=None)
    _fingerprint: str = field(compare=False, default="")

    @property
    def byte_level(self) -> bool:
        return self.vocab.byte_level

    def fingerprint(self) -> str:
        """SHA-256 over the vocab/merges content, for provenance headers."""
        return self._fingerprint

    # -- encoding ----------------------------------------------------------

    def base_ids(self, pretoken: str) -> list[int]:
        """IDs of the base units (bytes or characters) covering one pretoken."""
        if self.byte_level:
            unit_to_id = self.vocab.unit_to_id
            return [unit_to_id[bytes([b])] for b in pretoken.encode("utf-8")]
        ids = []
        for ch in pretoken:
            uid = self.vocab.unit_to_id.get(ch.encode("utf-8"))
            if uid is None:
                raise UncoverableTextError(
                    f"character {ch!r} has no base unit in this vocabulary"
                )
            ids.append(uid)
        return ids

    def encode_pretoken(self, pretoken: str) -> list[int]:
        return _kernels.bpe_merge(self.base_ids(pretoken), self._pair_lookup)

    def sequence_from_ids(self, ids: list[int], provenance: dict | None = None) -> TokenSequence:
        id_to_unit = self.vocab.id_to_unit
        try:
            units = [id_to_unit[i] for i in ids]
        except KeyError as exc:
            raise UnknownTokenIdError(f"token ID {exc.args[0]} not in vocabulary") from None
        return TokenSequence(list(ids), units, provenance)


def _load_vocab_json(path: Path, byte_level: bool) -> Vocabulary:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TokenizerFileError(f"cannot read vocab file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise TokenizerFileError(f"vocab file {path} must be a JSON object")
    unit_to_id: dict[bytes, int] = {}
    for token_str, token_id in raw.items():
        if not isinstance(token_id, int):
            raise TokenizerFileError(f"vocab entry {token_str!r} has non-integer ID")
        unit = printable_to_unit(token_str) if byte_level else token_str.encode("utf-8")
        if unit in unit_to_id:
            raise TokenizerFileError(f"duplicate surface unit {token_str!r} in vocab")
        unit_to_id[unit] = token_id
    return Vocabulary.from_units(unit_to_id, byte_level)


def _load_merges_txt(path: Path, byte_level: bool) -> MergeRules:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise TokenizerFileError(f"cannot read merges file {path}: {exc}") from exc
    pairs: list[tuple[bytes, bytes]] = []
    seen: set[tuple[bytes, bytes]] = set()
    for lineno, line in enumerate(lines, 1):
        if lineno == 1 and line.startswith("#"):
            continue
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise TokenizerFileError(
                f"{path}:{lineno}: expected 'left right', got {line!r}"
            )
        if byte_level:
            pair = (printable_to_unit(parts[0]), printable_to_unit(parts[1]))
        else:
            pair = (parts[0].encode("utf-8"), parts[1].encode("utf-8"))
        if pair in seen:
            raise TokenizerFileError(f"{path}:{lineno}: duplicate merge rule {line!r}")
        seen.add(pair)
        pairs.append(pair)
    return MergeRules(pairs)


def load_tokenizer(
    vocab_file: str | Path,
    merges_file: str | Path,
    pretok_config: PretokConfig | None = None,
) -> Tokenizer:
    """Load and validate a tokenizer from vocab.json + merges.txt.

    Every merge's left/right unit and its concatenation must exist in the
    vocabulary; byte-level vocabularies must contain all 256 single-byte units.
    """
    pretok = pretok_config or PretokConfig()
    vocab_path, merges_path = Path(vocab_file), Path(merges_file)
    vocab = _load_vocab_json(vocab_path, pretok.byte_level)
    merges = _load_merges_txt(merges_path, pretok.byte_level)

    triples = []
    for left, right in merges.pairs:
        if left not in vocab or right not in vocab:
            raise TokenizerFileError(
                f"merge side not in vocabulary: {unit_to_printable(left)!r} "
                f"+ {unit_to_printable(right)!r}"
            )
        merged = left + right
        if merged not in vocab:
            raise TokenizerFileError(
                f"merge result not in vocabulary: {unit_to_printable(merged)!r}"
            )
        triples.append(
            (vocab.unit_to_id[left], vocab.unit_to_id[right], vocab.unit_to_id[merged])
        )

    digest = hashlib.sha256()
    digest.update(vocab_path.read_bytes())
    digest.update(merges_path.read_bytes())
    digest.update(pretok.pattern.encode("utf-8"))

    return Tokenizer(
        vocab=vocab,
        merges=merges,
        pretok=pretok,
        _pair_lookup=_kernels.pack_pair_lookup(triples),
        _fingerprint=digest.hexdigest(),
    )


def encode_canonical(tok: Tokenizer, text: str) -> TokenSequence:
    """Deterministic BPE encoding: ranked merges applied within each pretoken."""
    ids: list[int] = []
    for span in pretokenize(text, tok.pretok):
        ids.extend(tok.encode_pretoken(span.text))
    return tok.sequence_from_ids(ids, provenance={"scheme": "canonical"})


def decode(tok: Tokenizer, seq: TokenSequence) -> str:
    """Map IDs back through the vocabulary and concatenate; exact inverse of encoding."""
    return decode_bytes(tok, seq).decode("utf-8")


def decode_bytes(tok: Tokenizer, seq: TokenSequence) -> bytes:
    id_to_unit = tok.vocab.id_to_unit
    try:
        return b"".join(id_to_unit[i] for i in seq.ids)
    except KeyError as exc:
        raise UnknownTokenIdError(f"token ID {exc.args[0]} not in vocabulary") from None


def spans_of(tok: Tokenizer, text: str) -> list[PretokenSpan]:
    """Pretoken spans of ``text`` under this tokenizer's configuration."""
    return pretokenize(text, tok.pretok)
