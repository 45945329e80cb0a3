#!/usr/bin/env python3
"""Build the test fixtures: corpus, reference tokenizer, reference IDs, SFT pairs.

The fixture tokenizer is a byte-level BPE trained with the `tokenizers`
library (the independent reference implementation); reference token IDs for
every corpus line come from the same library, so parity tests compare this
package's encoder against an implementation it shares no code with.

Run once; outputs are committed under tests/data/.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from random import Random

from tokenizers import Tokenizer as HFTokenizer
from tokenizers import models, pre_tokenizers, trainers

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
WORDLIST = ROOT / "src" / "retok" / "data" / "wordlist.txt"

VOCAB_SIZE = 8192
COMMON_CJK = "的一是不了人我在有他这中大来上国们"
RARE_CJK = "龍"  # appears once; must stay out of the trained vocabulary


def build_corpus(rng: Random, words: list[str]) -> list[str]:
    lines: list[str] = []
    top = words[:2500]

    def sentence(n_words: int) -> str:
        chosen = [top[rng.randrange(len(top))] for _ in range(n_words)]
        if rng.random() < 0.35:
            chosen[0] = chosen[0].capitalize()
        if rng.random() < 0.2:
            i = rng.randrange(len(chosen))
            chosen[i] = f'"{chosen[i]}"'
        if rng.random() < 0.25:
            i = rng.randrange(len(chosen))
            chosen[i] = chosen[i] + ","
        if rng.random() < 0.18:
            chosen.insert(rng.randrange(len(chosen) + 1), str(rng.randrange(1, 100000)))
        end = rng.choice([".", ".", ".", "!", "?", "...", ""])
        return " ".join(chosen) + end

    # general prose
    for _ in range(640):
        lines.append(sentence(rng.randrange(5, 15)))

    # contraction coverage
    contractions = ["it's", "don't", "we're", "I'll", "I'd", "I'm", "you've", "she's", "can't"]
    for _ in range(40):
        c = contractions[rng.randrange(len(contractions))]
        lines.append(f"{c} {sentence(rng.randrange(4, 9))}")

    # cat-heavy lines so ' cat', 'cat', and 'at' become vocabulary tokens
    cat_templates = [
        "the cat sat on the mat",
        "a cat and another cat met a third cat",
        "my cat likes the old cat next door",
        "that cat saw the cat at the gate",
        "cat cat cat at at at",
        "one cat, two cat, red cat, blue cat",
        "every cat knows the cat song",
        "the small cat and the large cat eat at noon",
    ]
    for i in range(90):
        lines.append(cat_templates[i % len(cat_templates)])

    # digit-group coverage: every 2- and 3-digit string as its own pretoken
    def digit_enum(width: int, per_line: int) -> list[str]:
        groups = [str(i).zfill(width) for i in range(10**width)]
        return [
            ",".join(groups[i : i + per_line]) for i in range(0, len(groups), per_line)
        ]
    for _ in range(8):
        lines.extend(digit_enum(3, 100))
        lines.extend(digit_enum(2, 50))

    # arithmetic-style lines and large numbers
    for _ in range(50):
        d1, d2 = rng.randrange(1, 13), rng.randrange(1, 13)
        a = rng.randrange(10 ** (d1 - 1), 10**d1)
        b = rng.randrange(10 ** (d2 - 1), 10**d2)
        op = rng.choice(["+", "-"])
        lines.append(f"{a} {op} {b} =")
    for _ in range(25):
        lines.append(f"the total was {rng.randrange(1, 10**9):,} units of 1000000")

    # unicode: common CJK characters (so a single-character token trains),
    # accented words, and exactly one rare CJK character
    for _ in range(45):
        n = rng.randrange(4, 12)
        lines.append("".join(COMMON_CJK[rng.randrange(len(COMMON_CJK))] for _ in range(n)))
    accents = ["café", "naïve", "señor", "zürich", "crème", "déjà", "piñata", "smörgås"]
    for _ in range(30):
        lines.append(f"{accents[rng.randrange(len(accents))]} {sentence(rng.randrange(3, 7))}")
    lines.append(f"the old sign showed {RARE_CJK} once")

    # whitespace variety
    for _ in range(15):
        lines.append(f"  {sentence(5)}\t{sentence(4)}   ")

    rng.shuffle(lines)
    return lines


def train_reference(lines: list[str]) -> HFTokenizer:
    hf = HFTokenizer(models.BPE())
    hf.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False, use_regex=True)
    trainer = trainers.BpeTrainer(
        vocab_size=VOCAB_SIZE,
        min_frequency=2,
        show_progress=False,
        special_tokens=[],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    hf.train_from_iterator(lines, trainer)
    return hf


def check_vocab(hf: HFTokenizer):
    vocab = hf.get_vocab()

    def unit_key(text: str) -> str:
        # ByteLevel vocab keys are in the byte-to-printable alphabet
        table = bytes_to_printable()
        return "".join(table[b] for b in text.encode("utf-8"))

    missing = []
    for needed in [" cat", "cat", "at"]:
        if unit_key(needed) not in vocab:
            missing.append(needed)
    for width in (2, 3):
        for i in range(10**width):
            group = str(i).zfill(width)
            if unit_key(group) not in vocab:
                missing.append(group)
    if unit_key("的") not in vocab:
        missing.append("的")
    if unit_key(RARE_CJK) in vocab:
        missing.append(f"unexpected {RARE_CJK}")
    if missing:
        raise SystemExit(f"fixture vocabulary is missing required tokens: {missing[:20]}")


def bytes_to_printable() -> dict[int, str]:
    keep = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(0xA1, 0xAC + 1))
        + list(range(0xAE, 0xFF + 1))
    )
    table = {}
    fill = 0
    for b in range(256):
        if b in keep:
            table[b] = chr(b)
        else:
            table[b] = chr(256 + fill)
            fill += 1
    return table


def build_sft_pairs(rng: Random, words: list[str]) -> list[dict]:
    top = words[:3000]

    def phrase(n: int) -> str:
        return " ".join(top[rng.randrange(len(top))] for _ in range(n))

    pairs = [
        {
            "id": "pair-000",
            "instruction": (
                "Write a short review of a neighborhood bakery that just changed "
                'owners, mentioning the bread selection and the seating area, '
                "in the format of a morning radio segment."
            ),
            "response": (
                "[Morning Radio Segment]\n"
                "[Opening: a warm jingle fades as the host leans into the microphone.]\n"
                "Host: Good morning, neighbors! The corner bakery has new owners, "
                "and the bread wall is taller than ever. The seating area now "
                "fits twelve, and the window seats catch the early sun."
            ),
        }
    ]
    for i in range(1, 100):
        instruction = f"Describe {phrase(rng.randrange(3, 9))} and explain {phrase(rng.randrange(2, 6))}."
        sentences = []
        for _ in range(rng.randrange(3, 7)):
            sentences.append(phrase(rng.randrange(8, 18)).capitalize() + ".")
        response = f"[{phrase(2).title()}]\n" + " ".join(sentences)
        pairs.append({"id": f"pair-{i:03d}", "instruction": instruction, "response": response})
    return pairs


def main():
    sys.path.insert(0, str(ROOT / "src"))
    words = [w.strip() for w in WORDLIST.read_text("utf-8").splitlines() if w.strip()]

    rng = Random(20250809)
    lines = build_corpus(rng, words)
    assert len(lines) >= 1000, len(lines)
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"corpus.txt: {len(lines)} lines")

    hf = train_reference(lines)
    check_vocab(hf)
    tok_dir = DATA / "fixture_tok"
    tok_dir.mkdir(exist_ok=True)
    hf.model.save(str(tok_dir))
    print(f"fixture tokenizer: vocab size {hf.get_vocab_size()}")

    ref_ids = [hf.encode(line).ids for line in lines]
    (DATA / "corpus_ref_ids.json").write_text(json.dumps(ref_ids), encoding="utf-8")
    print("corpus_ref_ids.json written")

    # parity check against this package's encoder
    from retok import encode_canonical, load_tokenizer

    tok = load_tokenizer(tok_dir / "vocab.json", tok_dir / "merges.txt")
    mismatches = 0
    for i, line in enumerate(lines):
        mine = encode_canonical(tok, line).ids
        if mine != ref_ids[i]:
            mismatches += 1
            if mismatches <= 3:
                print(f"MISMATCH line {i}: {line!r}")
                print(f"  ref : {ref_ids[i]}")
                print(f"  mine: {mine}")
    if mismatches:
        raise SystemExit(f"{mismatches} parity mismatches")
    print("parity: all lines match the reference encoder")

    # JSONL corpus for CLI runs
    with open(DATA / "corpus.jsonl", "w", encoding="utf-8") as out:
        for i, line in enumerate(lines):
            out.write(json.dumps({"id": f"r{i:04d}", "text": line}, ensure_ascii=False) + "\n")
    print("corpus.jsonl written")

    sft_rng = Random(77)
    pairs = build_sft_pairs(sft_rng, words)
    with open(DATA / "sft_pairs.jsonl", "w", encoding="utf-8") as out:
        for pair in pairs:
            out.write(json.dumps(pair, ensure_ascii=False) + "\n")
    print(f"sft_pairs.jsonl: {len(pairs)} pairs")


if __name__ == "__main__":
    main()
