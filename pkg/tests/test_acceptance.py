"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import itertools
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path
from random import Random

from scipy.stats import chisquare, kendalltau

from retok import (
    SchemeConfig,
    apply_scheme,
    build_probe,
    count_segmentations,
    decode,
    dropout_encode,
    encode_canonical,
    enumerate_segmentations,
    format_sft,
    gen_acronyms,
    gen_arithmetic,
    gen_count_chars,
    grade,
    grammaticality_score,
    retention,
    sample_segmentation,
)
from retok.cli import main
from retok.metrics import load_probe_words
from retok.schemes import digit_groups
from retok.segmentation import SegmentationCache
from retok.tasks import render_gold_generation

from .util import brute_force_segmentations

DATA = Path(__file__).parent / "data"


def _ok(n, text):
    print(f"PASS criterion {n}: {text}")


def test_criterion_1_segmentation_counts(toy_tok):
    start = time.perf_counter()
    units = set(toy_tok.vocab.unit_to_id)
    checked = 0
    for length in range(1, 9):
        for chars in itertools.product(b"abc", repeat=length):
            token = bytes(chars)
            assert count_segmentations(token, toy_tok.vocab) == len(
                brute_force_segmentations(token, units)
            )
            checked += 1
    assert count_segmentations(b"abc", toy_tok.vocab) == 4
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    _ok(1, f"counts match brute force on {checked} strings (len<=8) in {elapsed:.2f}s; abc->4")


def test_criterion_2_uniform_sampling(toy_tok, fixture_tok):
    start = time.perf_counter()
    tokens = [(b"ab", toy_tok.vocab), (b"bc", toy_tok.vocab), (b"abc", toy_tok.vocab),
              (b"abcabc", toy_tok.vocab)]
    for unit in sorted(fixture_tok.vocab.unit_to_id):
        if len(tokens) >= 20:
            break
        if 2 <= len(unit) <= 4:
            w = count_segmentations(unit, fixture_tok.vocab)
            if 2 <= w <= 50:
                tokens.append((unit, fixture_tok.vocab))
    assert len(tokens) >= 20

    runs = 0
    passed = 0
    caches = {}
    for token, vocab in tokens:
        cache = caches.setdefault(id(vocab), SegmentationCache(vocab))
        support = [tuple(s) for s in enumerate_segmentations(token, vocab, 10_000)]
        assert 2 <= len(support) <= 50
        for seed in range(10):
            rng = Random(seed)
            draws = Counter(
                tuple(sample_segmentation(token, vocab, rng, cache=cache))
                for _ in range(10_000)
            )
            assert set(draws) <= set(support)
            observed = [draws[s] for s in support]
            runs += 1
            passed += chisquare(observed).pvalue > 0.01
    elapsed = time.perf_counter() - start
    assert passed / runs >= 0.95, f"only {passed}/{runs} chi-square runs passed"
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    _ok(2, f"uniformity: {passed}/{runs} chi-square runs at p>0.01 over "
           f"{len(tokens)} tokens x 10 seeds in {elapsed:.1f}s")


def test_criterion_3_canonical_parity(fixture_tok, corpus_lines, corpus_ref_ids):
    start = time.perf_counter()
    assert len(corpus_lines) >= 1000
    for line, ref in zip(corpus_lines, corpus_ref_ids):
        assert encode_canonical(fixture_tok, line).ids == ref
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    _ok(3, f"canonical parity on {len(corpus_lines)} lines vs reference IDs in {elapsed:.1f}s")


def test_criterion_4_roundtrip_all_schemes(fixture_tok):
    start = time.perf_counter()
    rng = Random(20250809)
    pool = (
        "abcdefghXYZ \t\n0123456789,.!?'\"()[]-:;"
        "日本語中的文字éüñßœ€°±🙂🚀 —١٢"
    )
    configs = [
        SchemeConfig("canonical"),
        SchemeConfig("random", seed=11),
        SchemeConfig("char"),
        SchemeConfig("dropout", p=0.0),
        SchemeConfig("dropout", p=0.5, seed=12),
        SchemeConfig("dropout", p=1.0, seed=13),
        SchemeConfig("digits_right"),
    ]
    for _ in range(10_000):
        text = "".join(rng.choice(pool) for _ in range(rng.randrange(0, 40)))
        for cfg in configs:
            assert decode(fixture_tok, apply_scheme(fixture_tok, text, cfg)) == text
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    _ok(4, f"byte-exact round-trip for 10,000 strings x {len(configs)} schemes in {elapsed:.1f}s")


def test_criterion_5_dropout_identities(fixture_tok, corpus_lines):
    for line in corpus_lines:
        assert dropout_encode(fixture_tok, line, 0.0).ids == encode_canonical(fixture_tok, line).ids
    for line in corpus_lines:
        seq = dropout_encode(fixture_tok, line, 1.0, Random(0))
        assert all(len(u) == 1 for u in seq.units)

    canon_lens = [len(encode_canonical(fixture_tok, line)) for line in corpus_lines]
    grid = [i / 10 for i in range(1, 10)]
    means = []
    for p in grid:
        total = Fraction(0)
        for i, line in enumerate(corpus_lines):
            seq = dropout_encode(fixture_tok, line, p, Random(10_000 + i))
            total += Fraction(len(seq), canon_lens[i])
        means.append(total / len(corpus_lines))
    assert all(a <= b for a, b in zip(means, means[1:])), [float(m) for m in means]
    tau, pvalue = kendalltau(grid, [float(m) for m in means])
    assert tau > 0 and pvalue < 0.05
    _ok(5, f"dropout: p=0 canonical, p=1 base units; mean ratio rises "
           f"{float(means[0]):.3f}->{float(means[-1]):.3f}, Kendall tau={tau:.2f} p={pvalue:.2e}")


def test_criterion_6_digit_grouping(fixture_tok):
    assert [u.decode() for u in apply_scheme(fixture_tok, "1000000", SchemeConfig("digits_right")).units] == [
        "1", "000", "000",
    ]
    assert [u.decode() for u in apply_scheme(fixture_tok, "8492079913", SchemeConfig("digits_right")).units] == [
        "8", "492", "079", "913",
    ]
    rng = Random(6)
    for _ in range(10_000):
        run = "".join(rng.choice("0123456789") for _ in range(rng.randrange(1, 40)))
        groups = digit_groups(run)
        assert "".join(groups) == run
        assert len(groups) == -(-len(run) // 3)
        assert all(1 <= len(g) <= 3 for g in groups)
        assert all(len(g) == 3 for g in groups[1:])
    for _ in range(300):
        run = "".join(rng.choice("0123456789") for _ in range(rng.randrange(1, 20)))
        text = f"value {run} noted"
        seq = apply_scheme(fixture_tok, text, SchemeConfig("digits_right"))
        assert decode(fixture_tok, seq) == text
        digit_units = [u.decode() for u in seq.units if u.isdigit()]
        assert digit_units == digit_groups(run)
    _ok(6, "right-aligned digit grouping exact on both reference runs and 10,000 random runs")


def test_criterion_7_listed_segmentations(fixture_tok):
    segs = enumerate_segmentations(b" cat", fixture_tok.vocab, 10_000)
    as_lists = [[u.decode() for u in s] for s in segs]
    for expected in ([" cat"], [" ", "cat"], [" ", "c", "at"], [" ", "c", "a", "t"]):
        assert expected in as_lists
    _ok(7, f"' cat' enumeration contains all 4 listed segmentations (of {len(segs)} total)")


def test_criterion_8_metric_formulas():
    assert grammaticality_score(0, 20, 0.9) == 1.0
    assert grammaticality_score(5, 20, 0.9) == 0.75
    for spelling in (0.0, 0.1, 0.3, 0.49, 0.499999):
        assert grammaticality_score(0, 20, spelling) == 0.0
        assert grammaticality_score(17, 20, spelling) == 0.0
    assert abs(retention(86.4, 84.6) - 97.92) <= 0.01
    assert abs(retention(50.0, 46.3) - 92.60) <= 0.01
    _ok(8, "grammaticality formula + gate exact; retention 97.92/92.60 within 0.01")


def test_criterion_9_gold_self_consistency(fixture_tok):
    rng = Random(99)
    examples = []
    examples += gen_count_chars(fixture_tok.vocab, 1000, rng)
    acronyms = gen_acronyms(1000, 5, rng)
    examples += acronyms
    arithmetic = gen_arithmetic(1000, 10, rng)
    examples += arithmetic
    words = load_probe_words()
    scheme = SchemeConfig("char")
    for i in range(1000):
        examples.append(build_probe("word_repeat", words[i % len(words)], fixture_tok, scheme, rng))
    for i in range(1000):
        examples.append(
            build_probe("identify_misspelling", words[i % len(words)], fixture_tok, scheme, rng,
                        context_words=words[:60])
        )
    for example in examples:
        assert grade(example.kind, render_gold_generation(example), example.gold)

    for example in arithmetic:
        a, _, b, _ = example.prompt.split()
        assert len(a) == 10 and len(b) == 10 and a[0] != "0" and b[0] != "0"

    letters = Counter("".join(e.gold for e in acronyms))
    observed = [letters[c] for c in "abcdefghijklmnopqrstuvwxyz"]
    assert chisquare(observed).pvalue > 0.01
    _ok(9, "gold self-consistency on 1000 examples x 5 kinds; 10-digit operands; "
           "acronym letter chi-square uniform at 0.01")


SFT_INSTRUCTION = (
    "Write a short review of a neighborhood bakery that just changed owners, "
    "mentioning the bread selection and the seating area, in the format of a "
    "morning radio segment."
)
SFT_RESPONSE = (
    "[Morning Radio Segment]\n"
    "[Opening: a warm jingle fades as the host leans into the microphone.]\n"
    "Host: Good morning, neighbors! The corner bakery has new owners, "
    "and the bread wall is taller than ever. The seating area now "
    "fits twelve, and the window seats catch the early sun."
)


def test_criterion_10_sft_formats(fixture_tok, sft_pairs):
    expected = {
        "chat": "<|user|>Write a short review of a neighborhood bakery that just "
        "changed owners, mentioning the bread selection and the seating area, in "
        "the format of a morning radio segment. <|assistant|>[Morning Radio Segment]\n"
        "[Opening: a warm jingle fades as the host leans into the microphone.]\n"
        "Host: Good morning, neighbors! The corner bakery has new owners, and the "
        "bread wall is taller than ever. The seating area now fits twelve, and the "
        "window seats catch the early sun.",
        "qa_template": "Question: Write a short review of a neighborhood bakery that "
        "just changed owners, mentioning the bread selection and the seating area, "
        "in the format of a morning radio segment. Answer: [Morning Radio Segment]\n"
        "[Opening: a warm jingle fades as the host leans into the microphone.]\n"
        "Host: Good morning, neighbors! The corner bakery has new owners, and the "
        "bread wall is taller than ever. The seating area now fits twelve, and the "
        "window seats catch the early sun.",
        "no_template": "Write a short review of a neighborhood bakery that just "
        "changed owners, mentioning the bread selection and the seating area, in "
        "the format of a morning radio segment. [Morning Radio Segment]\n"
        "[Opening: a warm jingle fades as the host leans into the microphone.]\n"
        "Host: Good morning, neighbors! The corner bakery has new owners, and the "
        "bread wall is taller than ever. The seating area now fits twelve, and the "
        "window seats catch the early sun.",
    }
    assert sft_pairs[0]["instruction"] == SFT_INSTRUCTION
    assert sft_pairs[0]["response"] == SFT_RESPONSE
    for mode, want in expected.items():
        record = format_sft(SFT_INSTRUCTION, SFT_RESPONSE, mode, fixture_tok)
        assert record.rendered == want, mode

    # fourth mode: remove_instruction must split at exactly n canonical tokens,
    # n re-derived independently by re-encoding the original instruction
    checked = 0
    for pair in sft_pairs:
        record = format_sft(pair["instruction"], pair["response"], "remove_instruction", fixture_tok)
        n = len(encode_canonical(fixture_tok, pair["instruction"]).ids)
        assert record.meta["instruction_token_count"] == n
        response_ids = encode_canonical(fixture_tok, pair["response"]).ids
        head = fixture_tok.sequence_from_ids(response_ids[:n])
        assert record.instruction == decode(fixture_tok, head)
        assert record.instruction + record.response == pair["response"]
        assert record.rendered == (
            f"<|user|>{record.instruction} <|assistant|>{record.response}"
        )
        checked += 1
    assert checked == 100
    _ok(10, "SFT: chat/qa/no-template renders byte-exact; remove-instruction "
            "splits at n tokens on 100 pairs")


def test_criterion_11_cli_reproducibility(tmp_path):
    src = DATA / "corpus.jsonl"
    subset = tmp_path / "subset.jsonl"
    with open(src, encoding="utf-8") as full, open(subset, "w", encoding="utf-8") as out:
        for line in itertools.islice(full, 200):
            out.write(line)
    fix = DATA / "fixture_tok"
    base = [
        "encode",
        "--vocab", str(fix / "vocab.json"),
        "--merges", str(fix / "merges.txt"),
        "--scheme", "random", "--seed", "41",
        "--input", str(subset),
    ]
    paths = [tmp_path / name for name in ("a.jsonl", "b.jsonl", "c.jsonl")]
    assert main(base + ["--output", str(paths[0])]) == 0
    assert main(base + ["--output", str(paths[1])]) == 0
    assert main(base + ["--output", str(paths[2]), "--jobs", "3"]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes() == paths[2].read_bytes()
    _ok(11, "cmd_encode byte-identical across reruns and across parallelism levels")
