"""Alternative tokenization schemes and granularity statistics.

Schemes: ``canonical``, ``random`` (uniform refinement of each canonical
token), ``char`` (one token per character), ``dropout`` (each merge
application skipped independently with probability p), and ``digits_right``
(maximal digit runs regrouped into threes counted from the right). Every
scheme decodes byte-exactly to its input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

import regex

from . import _kernels
from .errors import UncoverableTextError
from .segmentation import random_tokenize_text
from .tokenizer import Tokenizer, TokenSequence, encode_canonical, spans_of

SCHEMES = ("canonical", "random", "char", "dropout", "digits_right")


@dataclass(frozen=True)
class SchemeConfig:
    """Which scheme to apply, with its parameters."""

    scheme: str = "canonical"
    p: float = 0.0
    seed: int | None = None
    digit_group_size: int = 3
    char_byte_only: bool = False
    exclude_identity: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; known: {SCHEMES}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"dropout p must be in [0, 1], got {self.p}")
        if self.digit_group_size < 1:
            raise ValueError("digit_group_size must be >= 1")

    def params(self) -> dict:
        out = {"scheme": self.scheme, "seed": self.seed}
        if self.scheme == "dropout":
            out["p"] = self.p
        if self.scheme == "digits_right":
            out["digit_group_size"] = self.digit_group_size
        if self.scheme == "random" and self.exclude_identity:
            out["exclude_identity"] = True
        return out


def char_tokenize(tok: Tokenizer, text: str, *, byte_only: bool = False) -> TokenSequence:
    """One token per character: the single unit covering the character when the
    vocabulary has one, otherwise its byte units (``byte_only`` forces bytes).

    For pure-ASCII text this is the most granular tokenization possible.
    """
    unit_to_id = tok.vocab.unit_to_id
    ids: list[int] = []
    for ch in text:
        encoded = ch.encode("utf-8")
        uid = None if byte_only else unit_to_id.get(encoded)
        if uid is not None:
            ids.append(uid)
            continue
        if not tok.byte_level:
            raise UncoverableTextError(f"character {ch!r} not in vocabulary")
        ids.extend(unit_to_id[bytes([b])] for b in encoded)
    return tok.sequence_from_ids(ids, provenance={"scheme": "char"})


def dropout_encode(tok: Tokenizer, text: str, p: float, rng: Random | None = None) -> TokenSequence:
    """Canonical merge procedure with each merge application skipped with probability p.

    p=0 reproduces canonical encoding bit-for-bit (and consumes no RNG state);
    p=1 leaves every pretoken as base units.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dropout p must be in [0, 1], got {p}")
    if p > 0.0 and rng is None:
        raise ValueError("dropout with p > 0 needs an RNG")
    ids: list[int] = []
    for span in spans_of(tok, text):
        ids.extend(_kernels.bpe_merge(tok.base_ids(span.text), tok._pair_lookup, p, rng))
    return tok.sequence_from_ids(ids, provenance={"scheme": "dropout", "p": p})


def digit_groups(run: str, group_size: int = 3) -> list[str]:
    """Split a digit run right-to-left into groups of at most ``group_size``.

    The first group takes the remainder, so all later groups are full:
    7 digits -> sizes [1, 3, 3].
    """
    first = (len(run) - 1) % group_size + 1
    groups = [run[:first]]
    for i in range(first, len(run), group_size):
        groups.append(run[i : i + group_size])
    return groups


_DIGIT_RUN = regex.compile(r"(\d+)")


def digits_right_encode(tok: Tokenizer, text: str, group_size: int = 3) -> TokenSequence:
    """Canonical encoding, except maximal digit runs are grouped right-to-left.

    Each group becomes its single vocabulary token when one exists, else its
    per-digit tokens (keeps the operation total on byte-level vocabularies).
    Non-digit characters a pretokenizer attached to a digit pretoken (e.g. a
    leading space) are encoded canonically on their own; a run chunked across
    several pretokens (left-greedy pretokenizers) is regrouped as one run.
    """
    unit_to_id = tok.vocab.unit_to_id
    spans = spans_of(tok, text)
    ids: list[int] = []
    i = 0
    while i < len(spans):
        span = spans[i]
        if span.kind != "digits":
            ids.extend(tok.encode_pretoken(span.text))
            i += 1
            continue
        j = i
        chunk = ""
        while j < len(spans) and spans[j].kind == "digits":
            chunk += spans[j].text
            j += 1
        # odd split indices are the maximal digit runs of the chunk
        for index, piece in enumerate(_DIGIT_RUN.split(chunk)):
            if not piece:
                continue
            if index % 2 == 0:
                ids.extend(tok.encode_pretoken(piece))
                continue
            for group in digit_groups(piece, group_size):
                uid = unit_to_id.get(group.encode("utf-8"))
                if uid is not None:
                    ids.append(uid)
                    continue
                for d in group:
                    did = unit_to_id.get(d.encode("utf-8"))
                    if did is not None:
                        ids.append(did)
                    else:
                        # non-single-byte digit character; cover it canonically
                        ids.extend(tok.encode_pretoken(d))
        i = j
    return tok.sequence_from_ids(ids, provenance={"scheme": "digits_right"})


def apply_scheme(tok: Tokenizer, text: str, cfg: SchemeConfig) -> TokenSequence:
    """Dispatch to the configured scheme; the result carries scheme provenance."""
    if cfg.scheme == "canonical":
        seq = encode_canonical(tok, text)
    elif cfg.scheme == "random":
        rng = Random(cfg.seed)
        seq = random_tokenize_text(tok, text, rng, exclude_identity=cfg.exclude_identity)
    elif cfg.scheme == "char":
        seq = char_tokenize(tok, text, byte_only=cfg.char_byte_only)
    elif cfg.scheme == "dropout":
        seq = dropout_encode(tok, text, cfg.p, Random(cfg.seed) if cfg.p > 0 else None)
    elif cfg.scheme == "digits_right":
        seq = digits_right_encode(tok, text, cfg.digit_group_size)
    else:  # pragma: no cover - guarded by SchemeConfig
        raise ValueError(cfg.scheme)
    seq.provenance = cfg.params()
    return seq


# -- granularity statistics --------------------------------------------------


@dataclass(frozen=True)
class GranularityRecord:
    """Token-count comparison of one alternative tokenization vs canonical."""

    record_id: str
    canonical_len: int
    alternative_len: int

    def __post_init__(self):
        if self.canonical_len <= 0:
            raise ValueError("canonical length must be positive")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.alternative_len, self.canonical_len)


def length_ratio(alt: TokenSequence, canon: TokenSequence) -> Fraction:
    """Exact |alt| / |canon| token-count ratio."""
    if len(canon) == 0:
        raise ValueError("canonical sequence is empty")
    return Fraction(len(alt), len(canon))


def format_ratio(ratio: Fraction | float) -> str:
    """Fixed 6-decimal rendering used in reports and JSONL records."""
    return f"{float(ratio):.6f}"


@dataclass
class RatioBucket:
    lo: Fraction
    hi: Fraction  # Fraction or inf sentinel via Fraction-compatible float
    count: int = 0
    ratio_sum: Fraction = field(default_factory=lambda: Fraction(0))

    @property
    def mean_ratio(self) -> Fraction | None:
        return None if self.count == 0 else self.ratio_sum / self.count


def bucket_by_ratio(
    records: list[GranularityRecord], edges: list[Fraction | float]
) -> list[RatioBucket]:
    """Histogram of records into half-open buckets [e_i, e_{i+1}).

    Edges must be strictly increasing; every record must land in exactly one
    bucket (use an infinite last edge to make the histogram total).
    """
    if len(edges) < 2:
        raise ValueError("need at least two bucket edges")
    exact_edges = [e if e == float("inf") else Fraction(e) for e in edges]
    if any(a >= b for a, b in zip(exact_edges, exact_edges[1:])):
        raise ValueError("bucket edges must be strictly increasing")
    buckets = [RatioBucket(lo, hi) for lo, hi in zip(exact_edges, exact_edges[1:])]
    for rec in records:
        ratio = rec.ratio
        for bucket in buckets:
            if bucket.lo <= ratio < bucket.hi:
                bucket.count += 1
                bucket.ratio_sum += ratio
                break
        else:
            raise ValueError(
                f"record {rec.record_id!r} ratio {float(ratio):.4f} outside bucket edges"
            )
    return buckets
