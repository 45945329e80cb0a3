import json
from pathlib import Path

import pytest

from retok import PretokConfig, load_tokenizer

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def toy_tok():
    """Vocabulary {a, b, c, ab, bc, abc} with merges a+b, b+c, ab+c."""
    return load_tokenizer(
        DATA / "toy" / "vocab.json",
        DATA / "toy" / "merges.txt",
        PretokConfig.preset("gpt2", byte_level=False),
    )


@pytest.fixture(scope="session")
def toy2_tok():
    """Toy vocabulary extended with space-prefixed units for multi-word texts."""
    return load_tokenizer(
        DATA / "toy2" / "vocab.json",
        DATA / "toy2" / "merges.txt",
        PretokConfig.preset("gpt2", byte_level=False),
    )


@pytest.fixture(scope="session")
def fixture_tok():
    """Byte-level BPE trained on the fixture corpus by the reference implementation."""
    return load_tokenizer(
        DATA / "fixture_tok" / "vocab.json",
        DATA / "fixture_tok" / "merges.txt",
    )


@pytest.fixture(scope="session")
def corpus_lines():
    return (DATA / "corpus.txt").read_text("utf-8").splitlines()


@pytest.fixture(scope="session")
def corpus_ref_ids():
    return json.loads((DATA / "corpus_ref_ids.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def sft_pairs():
    return [
        json.loads(line)
        for line in (DATA / "sft_pairs.jsonl").read_text("utf-8").splitlines()
        if line.strip()
    ]
