#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Workloads come from the fixture corpus: BPE merging of every pretoken
(canonical and with dropout) and segmentation counting of every distinct
pretoken. Results of the two lanes are asserted equal before timing.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time
from pathlib import Path
from random import Random

from retok import load_tokenizer
from retok._kernels import pure
from retok.tokenizer import spans_of

try:
    from retok._kernels import _native as native
except ImportError:
    native = None

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"


def prepare():
    tok = load_tokenizer(DATA / "fixture_tok" / "vocab.json", DATA / "fixture_tok" / "merges.txt")
    lines = (DATA / "corpus.txt").read_text("utf-8").splitlines()
    pretokens = []
    for line in lines:
        for span in spans_of(tok, line):
            pretokens.append(span.text)
    base_ids = [tok.base_ids(p) for p in pretokens]
    distinct = sorted({p.encode("utf-8") for p in pretokens})
    return tok, base_ids, distinct


def time_merge(lane, base_ids, lookup, repeats, p=0.0, seed=None):
    rng = Random(seed) if p > 0 else None
    start = time.perf_counter()
    for _ in range(repeats):
        if p > 0:
            rng = Random(seed)
        for ids in base_ids:
            lane.bpe_merge(ids, lookup, p, rng)
    return time.perf_counter() - start


def time_counts(lane, tokens, units, max_len, repeats):
    start = time.perf_counter()
    for _ in range(repeats):
        for token in tokens:
            lane.segment_counts(token, units, max_len)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if native is None:
        raise SystemExit("compiled kernel not built; run pip install -e . first")

    tok, base_ids, distinct = prepare()
    lookup = tok._pair_lookup
    units = tok.vocab.unit_to_id
    max_len = tok.vocab.max_unit_len

    # lanes must agree before we time them
    for ids in base_ids[:2000]:
        assert pure.bpe_merge(ids, lookup) == native.bpe_merge(ids, lookup)
    for token in distinct[:2000]:
        assert pure.segment_counts(token, units, max_len) == native.segment_counts(
            token, units, max_len
        )

    n_pretokens = len(base_ids) * args.repeats
    n_counts = len(distinct) * args.repeats
    rows = []

    t_pure = time_merge(pure, base_ids, lookup, args.repeats)
    t_nat = time_merge(native, base_ids, lookup, args.repeats)
    rows.append(("bpe_merge (canonical)", n_pretokens, t_pure, t_nat))

    t_pure = time_merge(pure, base_ids, lookup, args.repeats, p=0.5, seed=1)
    t_nat = time_merge(native, base_ids, lookup, args.repeats, p=0.5, seed=1)
    rows.append(("bpe_merge (dropout 0.5)", n_pretokens, t_pure, t_nat))

    t_pure = time_counts(pure, distinct, units, max_len, args.repeats)
    t_nat = time_counts(native, distinct, units, max_len, args.repeats)
    rows.append(("segment_counts", n_counts, t_pure, t_nat))

    print(f"{'workload':<26}{'calls':>10}{'pure (s)':>12}{'native (s)':>12}{'speedup':>10}")
    for name, calls, t_pure, t_nat in rows:
        print(f"{name:<26}{calls:>10}{t_pure:>12.3f}{t_nat:>12.3f}{t_pure / t_nat:>9.2f}x")


if __name__ == "__main__":
    main()
