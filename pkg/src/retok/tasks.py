"""Orthography-probing task generators and their answer graders.

Each generator produces prompts with a gold answer that its paired grader
accepts by construction, so grading the gold answer always returns True.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from random import Random

import regex

from .schemes import SchemeConfig, apply_scheme
from .tokenizer import Tokenizer, Vocabulary, encode_canonical

TASK_KINDS = ("count_chars", "acronym", "arithmetic", "word_repeat", "identify_misspelling")


@dataclass
class TaskExample:
    kind: str
    prompt: str
    gold: str | int
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "prompt": self.prompt,
            "gold": self.gold,
            "seed": self.seed,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TaskExample":
        return cls(obj["kind"], obj["prompt"], obj["gold"], obj.get("seed"), obj.get("meta", {}))


# -- generators ---------------------------------------------------------------


def _vocab_words(vocab: Vocabulary, min_len: int = 5, max_len: int = 10) -> list[str]:
    """Alphabetic vocabulary tokens (an optional leading space stripped)."""
    words = set()
    for unit in vocab.unit_to_id:
        try:
            text = unit.decode("utf-8")
        except UnicodeDecodeError:
            continue
        if text.startswith(" "):
            text = text[1:]
        if min_len <= len(text) <= max_len and text.isascii() and text.isalpha():
            words.add(text)
    return sorted(words)


def most_common_letter(word: str) -> tuple[str, int]:
    """Most frequent letter of ``word`` (case-folded); ties go to the earliest occurrence."""
    folded = word.lower()
    best = max(folded, key=lambda c: (folded.count(c), -folded.index(c)))
    return best, folded.count(best)


def gen_count_chars(vocab: Vocabulary, n: int, rng: Random) -> list[TaskExample]:
    """Count occurrences of the most common letter in 5-10 letter vocabulary words."""
    words = _vocab_words(vocab)
    if len(words) < n:
        raise ValueError(f"vocabulary has only {len(words)} qualifying words, need {n}")
    examples = []
    for word in rng.sample(words, n):
        letter, count = most_common_letter(word)
        prompt = f"Count the number of the letter '{letter}' in the word {word}."
        examples.append(TaskExample("count_chars", prompt, count, meta={"word": word, "letter": letter}))
    return examples


def gen_acronyms(n: int, length: int, rng: Random) -> list[TaskExample]:
    """Random acronyms with letters drawn i.i.d. uniformly from a-z."""
    if length <= 0:
        raise ValueError("acronym length must be positive")
    examples = []
    for _ in range(n):
        acronym = "".join(rng.choice(string.ascii_lowercase) for _ in range(length))
        prompt = (
            "Come up with a sequence of words where the first letters would "
            f"form this acronym: {acronym}"
        )
        examples.append(TaskExample("acronym", prompt, acronym))
    return examples


def gen_arithmetic(n: int, digits: int, rng: Random) -> list[TaskExample]:
    """Addition/subtraction of uniform ``digits``-digit operands, split evenly."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    lo = 10 ** (digits - 1)
    hi = 10**digits
    examples = []
    n_add = (n + 1) // 2
    for i in range(n):
        a = rng.randrange(lo, hi)
        b = rng.randrange(lo, hi)
        if i < n_add:
            op, gold = "+", a + b
        else:
            op, gold = "-", a - b
        examples.append(TaskExample("arithmetic", f"{a} {op} {b} =", gold))
    return examples


def gen_misspelling(word: str, rng: Random) -> str:
    """Single-edit misspelling: insert, delete, or substitute one lowercase letter.

    The result differs from ``word`` and is at edit distance exactly 1.
    """
    if len(word) < 2:
        raise ValueError("word must have at least 2 characters")
    op = rng.choice(("insert", "delete", "substitute"))
    letters = string.ascii_lowercase
    if op == "insert":
        pos = rng.randrange(len(word) + 1)
        return word[:pos] + rng.choice(letters) + word[pos:]
    if op == "delete":
        pos = rng.randrange(len(word))
        return word[:pos] + word[pos + 1 :]
    pos = rng.randrange(len(word))
    candidates = letters.replace(word[pos], "") if word[pos] in letters else letters
    return word[:pos] + rng.choice(candidates) + word[pos + 1 :]


# -- probes -------------------------------------------------------------------

WORD_REPEAT_HEADER = "Repeat each word directly, while correcting any typos.\n\n"
WORD_REPEAT_DEMO = ("guarantees", "guarantees")
MISSPELLING_HEADER = (
    "Question: Which of the two words contains a misspelling? "
    "Respond directly with the answer option.\n\n"
)
MISSPELLING_DEMO = ("guarantees", "garantees")


def _mixed_token_ids(tok: Tokenizer, prompt: str, target_start: int, target: str, scheme: SchemeConfig):
    """Token IDs for ``prompt`` with the target substring under ``scheme``."""
    before = prompt[:target_start]
    after = prompt[target_start + len(target):]
    ids = []
    if before:
        ids.extend(encode_canonical(tok, before).ids)
    ids.extend(apply_scheme(tok, target, scheme).ids)
    if after:
        ids.extend(encode_canonical(tok, after).ids)
    return ids


def build_word_repeat(
    word: str, tok: Tokenizer, scheme: SchemeConfig, rng: Random
) -> TaskExample:
    """Few-shot prompt asking the model to repeat ``word`` (given to it under
    the non-canonical ``scheme``); gold is the word itself."""
    demo_q, demo_a = WORD_REPEAT_DEMO
    prompt = (
        WORD_REPEAT_HEADER
        + f"Question: {demo_q}\nAnswer: {demo_a}\n\n"
        + f"Question: {word}\nAnswer: "
    )
    target_start = prompt.rindex(f"Question: {word}\n") + len("Question: ")
    ids = _mixed_token_ids(tok, prompt, target_start, word, scheme)
    meta = {
        "target": word,
        "target_span": [target_start, target_start + len(word)],
        "target_scheme": scheme.params(),
        "prompt_token_ids": ids,
    }
    return TaskExample("word_repeat", prompt, word, meta=meta)


def build_identify_misspelling(
    word: str,
    tok: Tokenizer,
    scheme: SchemeConfig,
    rng: Random,
    context_words: list[str] | None = None,
    n_context: int = 10,
) -> TaskExample:
    """Two options: a real misspelling (canonical tokens) vs the correctly
    spelled word (non-canonical tokens); gold is the misspelled option's letter."""
    misspelled = gen_misspelling(word, rng)

    blocks = []
    demos = [MISSPELLING_DEMO]
    pool = [w for w in (context_words or []) if w != word]
    while len(demos) < n_context and pool:
        demo_word = pool.pop(rng.randrange(len(pool)))
        demos.append((demo_word, gen_misspelling(demo_word, rng)))
    for good, bad in demos:
        options, answer = ((good, bad), "B") if rng.random() < 0.5 else ((bad, good), "A")
        blocks.append(f"Question:\n\nA. {options[0]}\nB. {options[1]}\n\nAnswer: {answer}\n\n")

    correct_first = rng.random() < 0.5
    options = (word, misspelled) if correct_first else (misspelled, word)
    gold = "B" if correct_first else "A"
    target_block = f"Question:\n\nA. {options[0]}\nB. {options[1]}\n\nAnswer: "
    prompt = MISSPELLING_HEADER + "".join(blocks) + target_block

    block_start = len(prompt) - len(target_block)
    option_offset = target_block.index(f"A. {options[0]}") + 3
    if correct_first:
        target_start = block_start + option_offset
    else:
        target_start = block_start + target_block.index(f"B. {word}") + 3
    ids = _mixed_token_ids(tok, prompt, target_start, word, scheme)
    meta = {
        "target": word,
        "misspelled": misspelled,
        "target_span": [target_start, target_start + len(word)],
        "target_scheme": scheme.params(),
        "prompt_token_ids": ids,
    }
    return TaskExample("identify_misspelling", prompt, gold, meta=meta)


def build_probe(
    kind: str,
    word: str,
    tok: Tokenizer,
    scheme: SchemeConfig,
    rng: Random,
    context_words: list[str] | None = None,
) -> TaskExample:
    if kind == "word_repeat":
        return build_word_repeat(word, tok, scheme, rng)
    if kind == "identify_misspelling":
        return build_identify_misspelling(word, tok, scheme, rng, context_words)
    raise ValueError(f"unknown probe kind {kind!r}")


# -- graders ------------------------------------------------------------------

_NUMBER_RE = regex.compile(r"[-+]?\d+(?:\.\d+)?")
_CHOICE_RE = regex.compile(r"\b([A-D])\b")


def extract_last_number(generation: str) -> Decimal | None:
    """Last numeric literal in the generation (commas stripped), if any."""
    matches = _NUMBER_RE.findall(generation.replace(",", ""))
    if not matches:
        return None
    return Decimal(matches[-1])


def grade_last_number(generation: str, gold: int) -> bool:
    """True iff the last number, rounded half-up to an integer, equals gold.

    Generations without any number are incorrect.
    """
    value = extract_last_number(generation)
    if value is None:
        return False
    return int(value.to_integral_value(rounding=ROUND_HALF_UP)) == gold


def grade_acronym(generation: str, acronym: str) -> bool:
    """True iff first letters of the whitespace-delimited words spell the acronym.

    Words are lowercased and surrounding punctuation is stripped; the letter
    sequence must match the acronym exactly (same length, same order).
    """
    letters = []
    for raw in generation.split():
        word = raw.strip(string.punctuation)
        if word:
            letters.append(word[0].lower())
    return "".join(letters) == acronym.lower()


def grade_word_repeat(generation: str, word: str) -> bool:
    return generation.strip().strip(string.punctuation).lower() == word.lower()


def grade_choice_letter(generation: str, gold: str) -> bool:
    """Multiple-choice grading: the first standalone letter A-D in the generation."""
    match = _CHOICE_RE.search(generation)
    if match:
        return match.group(1) == gold.upper()
    stripped = generation.strip()
    return bool(stripped) and stripped[0].upper() == gold.upper()


GRADERS = {
    "count_chars": grade_last_number,
    "arithmetic": grade_last_number,
    "acronym": grade_acronym,
    "word_repeat": grade_word_repeat,
    "identify_misspelling": grade_choice_letter,
}


def grade(kind: str, generation: str, gold: str | int) -> bool:
    """Grade one generation against the gold answer for the given task kind."""
    try:
        grader = GRADERS[kind]
    except KeyError:
        raise ValueError(f"no grader for task kind {kind!r}") from None
    return grader(generation, gold)


def render_gold_generation(example: TaskExample) -> str:
    """A trivially correct generation for an example's gold answer.

    For most tasks this is the gold answer itself; for acronyms it is a word
    sequence whose first letters spell the acronym (the grader reads first
    letters, not the acronym string).
    """
    if example.kind == "acronym":
        return " ".join(example.gold)
    return str(example.gold)
