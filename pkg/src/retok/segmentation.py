"""Counting, enumerating, and uniformly sampling vocabulary segmentations.

A segmentation of a token is any sequence of vocabulary units that
concatenates to the token's bytes. Counting uses the suffix-count recurrence
counts[i] = sum of counts[j] over unit-covered ends j, with counts[L] = 1;
sampling walks that table choosing each next unit with probability
counts[end_of_unit] / counts[here], which makes every full segmentation
equally likely (probability 1 / counts[0]). Counts can exceed 2**63 for long
tokens, so everything stays in exact big integers, including the weighted
draw itself.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from random import Random

from . import _kernels
from .errors import NoSegmentationError
from .tokenizer import Tokenizer, TokenSequence, Vocabulary, encode_canonical

DEFAULT_CACHE_SIZE = 100_000


@dataclass(frozen=True)
class SegmentationTable:
    """Suffix segmentation counts of one token: counts[i] covers token[i:]."""

    token: bytes
    counts: list[int]

    @property
    def total(self) -> int:
        return self.counts[0]


class SegmentationCache:
    """LRU cache of segmentation tables for one vocabulary.

    Entries are deterministic functions of the token bytes, so concurrent
    recomputation races are benign (last write wins with an identical value).
    """

    def __init__(self, vocab: Vocabulary, max_entries: int = DEFAULT_CACHE_SIZE):
        self.vocab = vocab
        self.max_entries = max_entries
        self._tables: OrderedDict[bytes, SegmentationTable] = OrderedDict()

    def table(self, token: bytes) -> SegmentationTable:
        hit = self._tables.get(token)
        if hit is not None:
            try:
                self._tables.move_to_end(token)
            except KeyError:  # concurrently evicted; the value is still good
                pass
            return hit
        counts = _kernels.segment_counts(
            token, self.vocab.unit_to_id, self.vocab.max_unit_len
        )
        table = SegmentationTable(token, counts)
        self._tables[token] = table
        if len(self._tables) > self.max_entries:
            self._tables.popitem(last=False)
        return table


def build_table(token: bytes, vocab: Vocabulary) -> SegmentationTable:
    """Compute the suffix-count table for one token (no caching)."""
    if not token:
        raise ValueError("token must be non-empty")
    counts = _kernels.segment_counts(token, vocab.unit_to_id, vocab.max_unit_len)
    return SegmentationTable(token, counts)


def count_segmentations(token: bytes, vocab: Vocabulary) -> int:
    """Exact number of vocabulary segmentations of ``token`` (0 if none)."""
    return build_table(token, vocab).total


def enumerate_segmentations(
    token: bytes, vocab: Vocabulary, limit: int = 1_000_000
) -> list[list[bytes]]:
    """All segmentations in lexicographic order of split positions, up to ``limit``.

    The list has exactly ``count_segmentations(token, vocab)`` entries whenever
    that count is below the limit.
    """
    if not token:
        raise ValueError("token must be non-empty")
    if limit <= 0:
        raise ValueError("limit must be positive")
    unit_to_id = vocab.unit_to_id
    max_len = vocab.max_unit_len
    out: list[list[bytes]] = []
    prefix: list[bytes] = []

    def walk(start: int) -> bool:
        if start == len(token):
            out.append(list(prefix))
            return len(out) < limit
        for end in range(start + 1, min(len(token), start + max_len) + 1):
            piece = token[start:end]
            if piece in unit_to_id:
                prefix.append(piece)
                more = walk(end)
                prefix.pop()
                if not more:
                    return False
        return True

    walk(0)
    return out


def sample_segmentation(
    token: bytes,
    vocab: Vocabulary,
    rng: Random,
    *,
    exclude_identity: bool = False,
    cache: SegmentationCache | None = None,
) -> list[bytes]:
    """Draw one segmentation uniformly from the set of valid segmentations.

    With ``exclude_identity`` the single-unit segmentation [token] is removed
    from the support (uniform over the remaining ones) whenever any other
    segmentation exists; a token with no finer segmentation is returned whole.
    """
    if not token:
        raise ValueError("token must be non-empty")
    table = cache.table(token) if cache is not None else build_table(token, vocab)
    counts = table.counts
    total = counts[0]
    if total == 0:
        raise NoSegmentationError(f"no vocabulary segmentation of {token!r}")

    length = len(token)
    unit_to_id = vocab.unit_to_id
    max_len = vocab.max_unit_len

    skip_full = False
    if exclude_identity and token in unit_to_id:
        if total > 1:
            skip_full = True
        # else: the identity segmentation is the only one; keep it.

    units: list[bytes] = []
    pos = 0
    while pos < length:
        here = counts[pos] - (1 if skip_full and pos == 0 else 0)
        pick = rng.randrange(here)
        acc = 0
        hi = min(length, pos + max_len)
        for end in range(pos + 1, hi + 1):
            if skip_full and pos == 0 and end == length:
                continue
            piece = token[pos:end]
            if piece in unit_to_id and counts[end]:
                acc += counts[end]
                if pick < acc:
                    units.append(piece)
                    pos = end
                    break
        else:  # pragma: no cover - unreachable when the table is consistent
            raise AssertionError("segmentation walk exhausted choices")
    return units


def random_tokenize_text(
    tok: Tokenizer,
    text: str,
    rng: Random,
    *,
    exclude_identity: bool = False,
    cache: SegmentationCache | None = None,
) -> TokenSequence:
    """Replace each canonical token with a uniformly sampled segmentation of it.

    Encodes canonically first, then refines tokens independently, so the
    result never merges across canonical token boundaries and is at least as
    long as the canonical sequence.
    """
    canonical = encode_canonical(tok, text)
    if cache is None:
        cache = _shared_cache(tok)
    ids: list[int] = []
    unit_to_id = tok.vocab.unit_to_id
    for unit in canonical.units:
        for piece in sample_segmentation(
            unit, tok.vocab, rng, exclude_identity=exclude_identity, cache=cache
        ):
            ids.append(unit_to_id[piece])
    return tok.sequence_from_ids(ids, provenance={"scheme": "random"})


_caches: dict[int, SegmentationCache] = {}


def _shared_cache(tok: Tokenizer) -> SegmentationCache:
    key = id(tok.vocab)
    cache = _caches.get(key)
    if cache is None or cache.vocab is not tok.vocab:
        cache = SegmentationCache(tok.vocab)
        _caches[key] = cache
        if len(_caches) > 8:
            _caches.pop(next(iter(_caches)))
    return cache
