"""Command-line surface: encode, count, enumerate, stats, gen, grade, score, sft-format.

All corpus I/O is JSONL (one UTF-8 object per line, LF). Output files start
with a header record carrying tool version, tokenizer fingerprint, and the
global seed; per-record RNGs are derived as hash(global seed, record id), so
outputs are byte-identical regardless of parallelism or record order.

Exit codes: 0 success, 1 usage error, 2 data error (partial output written),
3 grammar-provider/network error.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from random import Random

from . import __version__
from .errors import GrammarProviderError, RetokError, SftFormatError
from .metrics import (
    HttpGrammarProvider,
    load_probe_words,
    load_wordlist,
    spelling_score,
)
from .pretokenize import PretokConfig
from .schemes import GranularityRecord, SchemeConfig, apply_scheme, bucket_by_ratio, format_ratio
from .segmentation import count_segmentations, enumerate_segmentations
from .sft import SFT_MODES, format_sft
from .tasks import (
    TASK_KINDS,
    TaskExample,
    build_probe,
    gen_acronyms,
    gen_arithmetic,
    gen_count_chars,
    grade,
)
from .tokenizer import Tokenizer, encode_canonical, load_tokenizer

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3

ENV_GRAMMAR_ENDPOINT = "RETOK_GRAMMAR_ENDPOINT"
ENV_GRAMMAR_TIMEOUT = "RETOK_GRAMMAR_TIMEOUT"

CHUNK_SIZE = 256  # records in flight per parallel batch


# -- JSONL helpers ------------------------------------------------------------


def read_jsonl(path: str | Path):
    """Yield (lineno, object) for each non-empty line."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise RetokError(f"{path}:{lineno}: bad JSON: {exc}") from exc


def dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def derive_seed(global_seed: int, record_id: str) -> int:
    """Stable per-record seed so parallel processing order cannot change outputs."""
    digest = hashlib.sha256(f"{global_seed}\x1f{record_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def header_record(command: str, tok: Tokenizer | None, seed: int | None, **extra) -> dict:
    record = {"kind": "header", "tool": "retok", "version": __version__, "command": command}
    if tok is not None:
        record["tokenizer"] = tok.fingerprint()
    if seed is not None:
        record["seed"] = seed
    record.update(extra)
    return record


# -- tokenizer plumbing --------------------------------------------------------


def add_tokenizer_args(parser: argparse.ArgumentParser):
    parser.add_argument("--vocab", required=True, help="vocab.json path")
    parser.add_argument("--merges", required=True, help="merges.txt path")
    parser.add_argument(
        "--pretok-config",
        default=None,
        help="pretokenizer JSON config ({'preset': 'gpt2'|'llama3'} or {'pattern': ...})",
    )
    parser.add_argument(
        "--pretok-preset",
        default=None,
        choices=["gpt2", "llama3"],
        help="pretokenizer preset (shortcut for --pretok-config)",
    )
    parser.add_argument(
        "--no-byte-level",
        action="store_true",
        help="treat vocab/merges as plain text units instead of byte-level",
    )


def tokenizer_from_args(args) -> Tokenizer:
    byte_level = not args.no_byte_level
    if args.pretok_config:
        pretok = PretokConfig.from_file(args.pretok_config)
    elif args.pretok_preset:
        pretok = PretokConfig.preset(args.pretok_preset, byte_level=byte_level)
    else:
        pretok = PretokConfig.preset("gpt2", byte_level=byte_level)
    return load_tokenizer(args.vocab, args.merges, pretok)


# -- encode ---------------------------------------------------------------------

_WORKER: dict = {}


def _encode_init(vocab, merges, pattern, byte_level, scheme_dict):
    pretok = PretokConfig(pattern=pattern, byte_level=byte_level)
    _WORKER["tok"] = load_tokenizer(vocab, merges, pretok)
    _WORKER["scheme"] = scheme_dict


def _encode_record(payload):
    record_id, text, record_seed = payload
    return _encode_one(_WORKER["tok"], dict(_WORKER["scheme"]), record_id, text, record_seed)


def _encode_one(tok: Tokenizer, scheme_dict: dict, record_id: str, text: str, record_seed: int):
    if not isinstance(text, str) or not text:
        return {"kind": "error", "id": record_id, "error": "record has no text"}
    scheme_dict["seed"] = record_seed
    cfg = SchemeConfig(**scheme_dict)
    try:
        seq = apply_scheme(tok, text, cfg)
        canon = encode_canonical(tok, text)
    except RetokError as exc:
        return {"kind": "error", "id": record_id, "error": str(exc)}
    ratio = Fraction(len(seq), len(canon)) if len(canon) else Fraction(1)
    out = {
        "id": record_id,
        "scheme": cfg.scheme,
        "params": cfg.params(),
        "ids": seq.ids,
        "units": seq.printable_units(),
        "canonical_len": len(canon),
        "length_ratio": format_ratio(ratio),
    }
    return out


def cmd_encode(args) -> int:
    tok = tokenizer_from_args(args)
    p_values = [float(v) for v in str(args.p).split(",")] if args.p is not None else [0.0]
    if len(p_values) > 1:
        if "{p}" not in args.output:
            print("error: multiple --p values need an --output template with {p}", file=sys.stderr)
            return EXIT_USAGE
        outputs = [(p, args.output.replace("{p}", f"{p:g}")) for p in p_values]
    else:
        outputs = [(p_values[0], args.output)]

    status = EXIT_OK
    for p, out_path in outputs:
        cfg = SchemeConfig(
            scheme=args.scheme.replace("-", "_"),
            p=p,
            seed=args.seed,
            digit_group_size=args.digit_group_size,
            exclude_identity=args.exclude_identity,
        )
        errors = _encode_file(tok, args, cfg, out_path)
        if errors:
            status = EXIT_DATA
    return status


def _encode_file(tok: Tokenizer, args, cfg: SchemeConfig, out_path: str) -> int:
    scheme_dict = {
        "scheme": cfg.scheme,
        "p": cfg.p,
        "digit_group_size": cfg.digit_group_size,
        "exclude_identity": cfg.exclude_identity,
    }

    def payloads():
        seen = set()
        for lineno, obj in read_jsonl(args.input):
            if obj.get("kind") in ("header", "trailer", "error"):
                continue
            record_id = str(obj.get("id", f"line{lineno}"))
            if record_id in seen:
                raise RetokError(f"{args.input}:{lineno}: duplicate record id {record_id!r}")
            seen.add(record_id)
            yield record_id, obj.get("text"), derive_seed(args.seed, record_id)

    n_errors = 0
    n_records = 0
    with open(out_path, "w", encoding="utf-8") as out:
        out.write(dump_line(header_record("encode", tok, args.seed, scheme=cfg.params())))

        def emit(record: dict):
            nonlocal n_errors, n_records
            n_records += 1
            if record.get("kind") == "error":
                n_errors += 1
                print(f"error: record {record['id']}: {record['error']}", file=sys.stderr)
            out.write(dump_line(record))

        if args.jobs > 1:
            # batched submission keeps memory bounded by one batch, and output
            # order equals input order regardless of completion order
            pool = ProcessPoolExecutor(
                max_workers=args.jobs,
                initializer=_encode_init,
                initargs=(args.vocab, args.merges, tok.pretok.pattern, tok.byte_level, scheme_dict),
            )
            with pool:
                stream = payloads()
                while True:
                    batch = list(itertools.islice(stream, args.jobs * CHUNK_SIZE))
                    if not batch:
                        break
                    for record in pool.map(_encode_record, batch, chunksize=CHUNK_SIZE):
                        emit(record)
        else:
            for payload in payloads():
                emit(_encode_one(tok, dict(scheme_dict), *payload))
        if n_errors:
            out.write(dump_line({"kind": "trailer", "complete": False, "records": n_records, "errors": n_errors}))
    return n_errors


# -- count / enumerate ----------------------------------------------------------


def cmd_count(args) -> int:
    if not args.input and args.token is None:
        print("error: need a token argument or --input", file=sys.stderr)
        return EXIT_USAGE
    tok = tokenizer_from_args(args)
    if args.input:
        tokens = [line.rstrip("\n") for line in Path(args.input).read_text("utf-8").splitlines()]
    else:
        tokens = [args.token]
    any_zero = False
    for token in tokens:
        count = count_segmentations(token.encode("utf-8"), tok.vocab)
        if count == 0:
            any_zero = True
        print(count)
    return EXIT_DATA if any_zero else EXIT_OK


def cmd_enumerate(args) -> int:
    tok = tokenizer_from_args(args)
    segmentations = enumerate_segmentations(args.token.encode("utf-8"), tok.vocab, args.limit)
    from .bytemap import unit_to_printable

    for units in segmentations:
        print(json.dumps([unit_to_printable(u) for u in units], ensure_ascii=False))
    return EXIT_OK if segmentations else EXIT_DATA


# -- stats ------------------------------------------------------------------------


def cmd_stats(args) -> int:
    edges = [float("inf") if e == "inf" else Fraction(e) for e in args.buckets.split(",")]
    records: list[GranularityRecord] = []
    per_file: dict[str, dict] = {}
    for path in args.input:
        ratios: list[Fraction] = []
        for lineno, obj in read_jsonl(path):
            if obj.get("kind") in ("header", "trailer", "error"):
                continue
            try:
                rec = GranularityRecord(
                    str(obj["id"]), int(obj["canonical_len"]), len(obj["ids"])
                )
            except (KeyError, ValueError) as exc:
                print(f"error: {path}:{lineno}: {exc}", file=sys.stderr)
                return EXIT_DATA
            records.append(rec)
            ratios.append(rec.ratio)
        mean = sum(ratios, Fraction(0)) / len(ratios) if ratios else None
        per_file[str(path)] = {
            "records": len(ratios),
            "mean_ratio": format_ratio(mean) if mean is not None else None,
        }
    try:
        buckets = bucket_by_ratio(records, edges)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    report = {
        "files": per_file,
        "buckets": [
            {
                "lo": format_ratio(b.lo),
                "hi": "inf" if b.hi == float("inf") else format_ratio(b.hi),
                "count": b.count,
                "mean_ratio": format_ratio(b.mean_ratio) if b.count else None,
            }
            for b in buckets
        ],
    }
    _emit_report(report, args.output)
    return EXIT_OK


def _emit_report(report: dict, output: str | None):
    text = json.dumps(report, ensure_ascii=False, indent=2) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- gen --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    kind = args.task.replace("-", "_")
    if kind not in TASK_KINDS:
        print(f"error: unknown task {args.task!r}", file=sys.stderr)
        return EXIT_USAGE
    rng = Random(args.seed)
    tok = None
    if kind in ("count_chars", "word_repeat", "identify_misspelling"):
        tok = tokenizer_from_args(args)

    if kind == "count_chars":
        examples = gen_count_chars(tok.vocab, args.n, rng)
    elif kind == "acronym":
        examples = gen_acronyms(args.n, args.length, rng)
    elif kind == "arithmetic":
        examples = gen_arithmetic(args.n, args.digits, rng)
    else:
        words = load_probe_words(args.probe_words)
        scheme = SchemeConfig(scheme=args.scheme.replace("-", "_"), p=args.p, seed=args.seed)
        examples = []
        for _ in range(args.n):
            word = words[rng.randrange(len(words))]
            examples.append(build_probe(kind, word, tok, scheme, rng, context_words=words))

    with open(args.output, "w", encoding="utf-8") as out:
        out.write(dump_line(header_record("gen", tok, args.seed, task=kind, n=args.n)))
        for i, example in enumerate(examples):
            example.seed = args.seed
            record = {"id": f"{kind}-{i:06d}"}
            record.update(example.to_json())
            out.write(dump_line(record))
    return EXIT_OK


# -- grade ------------------------------------------------------------------------


def cmd_grade(args) -> int:
    kind = args.task.replace("-", "_")
    if kind not in TASK_KINDS:
        print(f"error: unknown task {args.task!r}", file=sys.stderr)
        return EXIT_USAGE
    gold: dict[str, TaskExample] = {}
    for _, obj in read_jsonl(args.dataset):
        if obj.get("kind") == "header":
            continue
        gold[str(obj["id"])] = TaskExample.from_json(obj)
    generations: dict[str, str] = {}
    for _, obj in read_jsonl(args.generations):
        if obj.get("kind") == "header":
            continue
        generations[str(obj["id"])] = obj.get("generation", "")

    verdicts = []
    correct = 0
    for record_id, example in gold.items():
        if record_id not in generations:
            continue
        ok = grade(example.kind, generations[record_id], example.gold)
        correct += ok
        verdicts.append({"id": record_id, "correct": ok})
    unmatched = sorted(set(gold) ^ set(generations))
    graded = len(verdicts)
    accuracy = 100.0 * correct / graded if graded else 0.0

    report = {
        "task": kind,
        "examples": len(gold),
        "graded": graded,
        "accuracy_pct": round(accuracy, 4),
        "unmatched_ids": unmatched,
        "verdicts": verdicts,
    }
    if args.canonical_report:
        canon = json.loads(Path(args.canonical_report).read_text("utf-8"))
        canon_acc = float(canon["accuracy_pct"])
        if canon_acc > 0:
            report["retention_pct"] = round(100.0 * accuracy / canon_acc, 4)
    _emit_report(report, args.output)
    return EXIT_DATA if unmatched else EXIT_OK


# -- score ------------------------------------------------------------------------


def cmd_score(args) -> int:
    wordlist = load_wordlist(args.wordlist)
    endpoint = args.grammar_endpoint or os.environ.get(ENV_GRAMMAR_ENDPOINT)
    timeout = args.timeout
    if timeout is None:
        timeout = float(os.environ.get(ENV_GRAMMAR_TIMEOUT, "10"))
    provider = HttpGrammarProvider(endpoint, timeout) if endpoint else None

    rows = []
    for _, obj in read_jsonl(args.generations):
        if obj.get("kind") == "header":
            continue
        rows.append((str(obj["id"]), obj.get("generation", "")))

    from .metrics import count_mistakes_batch, grammaticality_score

    spelling = [spelling_score(text, wordlist) for _, text in rows]
    grammaticality = None
    if provider is not None:
        try:
            mistakes = count_mistakes_batch([t for _, t in rows], provider, args.max_workers)
        except GrammarProviderError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PROVIDER
        grammaticality = []
        for (_, text), n_mistakes, spell in zip(rows, mistakes, spelling):
            words = len(text.split())
            grammaticality.append(
                0.0 if words == 0 else grammaticality_score(n_mistakes, words, spell)
            )

    records = []
    for i, (record_id, _) in enumerate(rows):
        rec = {"id": record_id, "spelling": round(spelling[i], 6)}
        if grammaticality is not None:
            rec["grammaticality"] = round(grammaticality[i], 6)
        records.append(rec)
    report = {
        "records": records,
        "mean_spelling": round(sum(spelling) / len(spelling), 6) if spelling else None,
    }
    if grammaticality is not None:
        report["mean_grammaticality"] = (
            round(sum(grammaticality) / len(grammaticality), 6) if grammaticality else None
        )
    _emit_report(report, args.output)
    return EXIT_OK


# -- sft-format -------------------------------------------------------------------


def cmd_sft_format(args) -> int:
    tok = tokenizer_from_args(args)
    mode = args.mode.replace("-", "_")
    if mode not in SFT_MODES:
        print(f"error: unknown mode {args.mode!r}", file=sys.stderr)
        return EXIT_USAGE
    n_skipped = 0
    n_failed = 0
    n_records = 0
    with open(args.output, "w", encoding="utf-8") as out:
        out.write(dump_line(header_record("sft-format", tok, None, mode=mode)))
        for lineno, obj in read_jsonl(args.input):
            if obj.get("kind") in ("header", "trailer"):
                continue
            record_id = str(obj.get("id", f"line{lineno}"))
            try:
                record = format_sft(obj["instruction"], obj["response"], mode, tok)
            except SftFormatError as exc:
                n_skipped += 1
                out.write(dump_line({"kind": "skipped", "id": record_id, "reason": str(exc)}))
                continue
            except (KeyError, ValueError, RetokError) as exc:
                n_failed += 1
                print(f"error: record {record_id}: {exc}", file=sys.stderr)
                out.write(dump_line({"kind": "error", "id": record_id, "error": str(exc)}))
                continue
            n_records += 1
            row = {"id": record_id}
            row.update(record.to_json())
            out.write(dump_line(row))
        if n_skipped or n_failed:
            out.write(
                dump_line(
                    {
                        "kind": "trailer",
                        "complete": n_failed == 0,
                        "records": n_records,
                        "skipped": n_skipped,
                        "errors": n_failed,
                    }
                )
            )
    return EXIT_DATA if n_failed else EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retok",
        description="Canonical and non-canonical BPE tokenization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_args(p: argparse.ArgumentParser):
        p.add_argument(
            "--scheme",
            default="canonical",
            choices=["canonical", "random", "char", "dropout", "digits-right", "digits_right"],
        )
        p.add_argument("--p", default=None, help="dropout probability, or comma-separated grid")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--digit-group-size", type=int, default=3)
        p.add_argument("--exclude-identity", action="store_true",
                       help="random scheme: exclude the unsplit segmentation when finer ones exist")

    p_encode = sub.add_parser("encode", help="encode a JSONL corpus under a scheme")
    add_tokenizer_args(p_encode)
    add_scheme_args(p_encode)
    p_encode.add_argument("--input", required=True)
    p_encode.add_argument("--output", required=True, help="output path; use {p} with a --p grid")
    p_encode.add_argument("--jobs", type=int, default=1)
    p_encode.set_defaults(func=cmd_encode)

    p_count = sub.add_parser("count", help="count vocabulary segmentations of a token")
    add_tokenizer_args(p_count)
    p_count.add_argument("token", nargs="?", help="token text (or use --input)")
    p_count.add_argument("--input", help="file with one token per line")
    p_count.set_defaults(func=cmd_count)

    p_enum = sub.add_parser("enumerate", help="list vocabulary segmentations of a token")
    add_tokenizer_args(p_enum)
    p_enum.add_argument("token")
    p_enum.add_argument("--limit", type=int, default=1000)
    p_enum.set_defaults(func=cmd_enumerate)

    p_stats = sub.add_parser("stats", help="length-ratio histogram over encoded files")
    p_stats.add_argument("--input", nargs="+", required=True)
    p_stats.add_argument("--buckets", default="1,1.5,2,3,5,inf")
    p_stats.add_argument("--output")
    p_stats.set_defaults(func=cmd_stats)

    p_gen = sub.add_parser("gen", help="generate a task dataset")
    add_tokenizer_args(p_gen)
    p_gen.add_argument("--task", required=True,
                       choices=[k.replace("_", "-") for k in TASK_KINDS])
    p_gen.add_argument("-n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--length", type=int, default=5, help="acronym length")
    p_gen.add_argument("--digits", type=int, default=10, help="arithmetic operand digits")
    p_gen.add_argument("--scheme", default="char", help="probe target scheme")
    p_gen.add_argument("--p", type=float, default=0.0)
    p_gen.add_argument("--probe-words", default=None, help="probe word list path")
    p_gen.add_argument("--output", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_grade = sub.add_parser("grade", help="grade generations against a task dataset")
    p_grade.add_argument("--task", required=True,
                         choices=[k.replace("_", "-") for k in TASK_KINDS])
    p_grade.add_argument("--dataset", required=True)
    p_grade.add_argument("--generations", required=True)
    p_grade.add_argument("--canonical-report", default=None,
                         help="report JSON from a canonical run, for retention")
    p_grade.add_argument("--output")
    p_grade.set_defaults(func=cmd_grade)

    p_score = sub.add_parser("score", help="spelling/grammaticality scores for generations")
    p_score.add_argument("--generations", required=True)
    p_score.add_argument("--wordlist", default=None)
    p_score.add_argument("--grammar-endpoint", default=None)
    p_score.add_argument("--timeout", type=float, default=None)
    p_score.add_argument("--max-workers", type=int, default=4)
    p_score.add_argument("--output")
    p_score.set_defaults(func=cmd_score)

    p_sft = sub.add_parser("sft-format", help="render instruction/response pairs")
    add_tokenizer_args(p_sft)
    p_sft.add_argument("--mode", required=True,
                       choices=[m.replace("_", "-") for m in SFT_MODES])
    p_sft.add_argument("--input", required=True)
    p_sft.add_argument("--output", required=True)
    p_sft.set_defaults(func=cmd_sft_format)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to our usage code
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except RetokError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
