import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from retok.cli import main

DATA = Path(__file__).parent / "data"
FIX = DATA / "fixture_tok"

TOK_ARGS = ["--vocab", str(FIX / "vocab.json"), "--merges", str(FIX / "merges.txt")]
TOY_ARGS = [
    "--vocab", str(DATA / "toy" / "vocab.json"),
    "--merges", str(DATA / "toy" / "merges.txt"),
    "--no-byte-level",
]


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as out:
        for row in rows:
            out.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text("utf-8").splitlines() if line]


@pytest.fixture
def small_corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_jsonl(
        path,
        [
            {"id": "a", "text": "the cat sat on the mat"},
            {"id": "b", "text": "numbers like 1000000 and 42"},
            {"id": "c", "text": "plain words only here"},
        ],
    )
    return path


# -- encode ---------------------------------------------------------------------


def test_encode_canonical(tmp_path, small_corpus):
    out = tmp_path / "enc.jsonl"
    code = main(["encode", *TOK_ARGS, "--input", str(small_corpus), "--output", str(out)])
    assert code == 0
    rows = read_jsonl(out)
    assert rows[0]["kind"] == "header"
    assert rows[0]["seed"] == 0 and "tokenizer" in rows[0]
    records = rows[1:]
    assert [r["id"] for r in records] == ["a", "b", "c"]
    assert all(r["length_ratio"] == "1.000000" for r in records)
    assert all(r["canonical_len"] == len(r["ids"]) for r in records)


def test_encode_random_reproducible(tmp_path, small_corpus):
    out1, out2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
    argv = ["encode", *TOK_ARGS, "--scheme", "random", "--seed", "7", "--input", str(small_corpus)]
    assert main(argv + ["--output", str(out1)]) == 0
    assert main(argv + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_encode_parallel_matches_serial(tmp_path, small_corpus):
    serial, parallel = tmp_path / "s.jsonl", tmp_path / "p.jsonl"
    argv = ["encode", *TOK_ARGS, "--scheme", "random", "--seed", "3", "--input", str(small_corpus)]
    assert main(argv + ["--output", str(serial), "--jobs", "1"]) == 0
    assert main(argv + ["--output", str(parallel), "--jobs", "2"]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_encode_dropout_grid(tmp_path, small_corpus):
    out = tmp_path / "grid-{p}.jsonl"
    argv = [
        "encode", *TOK_ARGS, "--scheme", "dropout", "--p", "0.1,0.5,0.9",
        "--seed", "1", "--input", str(small_corpus), "--output", str(out),
    ]
    assert main(argv) == 0
    means = []
    for p in ("0.1", "0.5", "0.9"):
        rows = read_jsonl(tmp_path / f"grid-{p}.jsonl")[1:]
        ratios = [float(r["length_ratio"]) for r in rows]
        means.append(sum(ratios) / len(ratios))
    assert means[0] <= means[1] <= means[2]


def test_encode_grid_needs_template(tmp_path, small_corpus):
    code = main([
        "encode", *TOK_ARGS, "--scheme", "dropout", "--p", "0.1,0.2",
        "--input", str(small_corpus), "--output", str(tmp_path / "x.jsonl"),
    ])
    assert code == 1


def test_encode_bad_record_flags_partial(tmp_path):
    src = tmp_path / "bad.jsonl"
    write_jsonl(src, [{"id": "ok", "text": "fine"}, {"id": "bad", "text": ""}])
    out = tmp_path / "out.jsonl"
    code = main(["encode", *TOK_ARGS, "--input", str(src), "--output", str(out)])
    assert code == 2
    rows = read_jsonl(out)
    kinds = [r.get("kind") for r in rows]
    assert kinds[0] == "header"
    assert "error" in kinds
    assert rows[-1]["kind"] == "trailer" and rows[-1]["complete"] is False


def test_encode_units_decode_to_text(tmp_path, small_corpus):
    from retok.bytemap import printable_to_unit

    out = tmp_path / "enc.jsonl"
    main(["encode", *TOK_ARGS, "--scheme", "char", "--input", str(small_corpus), "--output", str(out)])
    for row in read_jsonl(out)[1:]:
        text = b"".join(printable_to_unit(u) for u in row["units"]).decode("utf-8")
        assert text in ("the cat sat on the mat", "numbers like 1000000 and 42", "plain words only here")


# -- count / enumerate ------------------------------------------------------------


def test_count_token(capsys):
    assert main(["count", *TOY_ARGS, "abc"]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_count_single_base_unit(capsys):
    assert main(["count", *TOY_ARGS, "a"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_count_uncoverable_warns(capsys):
    assert main(["count", *TOY_ARGS, "zz"]) == 2
    assert capsys.readouterr().out.strip() == "0"


def test_count_file_mode(tmp_path, capsys):
    tokens = tmp_path / "tokens.txt"
    tokens.write_text("abc\nab\na\n")
    assert main(["count", *TOY_ARGS, "--input", str(tokens)]) == 0
    assert capsys.readouterr().out.split() == ["4", "2", "1"]


def test_count_usage_error(capsys):
    assert main(["count", *TOY_ARGS]) == 1


def test_enumerate(capsys):
    assert main(["enumerate", *TOY_ARGS, "abc"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [json.loads(line) for line in lines] == [
        ["a", "b", "c"], ["a", "bc"], ["ab", "c"], ["abc"],
    ]


def test_enumerate_limit(capsys):
    assert main(["enumerate", *TOY_ARGS, "abc", "--limit", "2"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 2


# -- stats -------------------------------------------------------------------------


def test_stats(tmp_path, small_corpus, capsys):
    enc = tmp_path / "enc.jsonl"
    main(["encode", *TOK_ARGS, "--scheme", "char", "--input", str(small_corpus), "--output", str(enc)])
    assert main(["stats", "--input", str(enc), "--buckets", "1,2,5,inf"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["files"][str(enc)]["records"] == 3
    assert sum(b["count"] for b in report["buckets"]) == 3
    assert report["buckets"][-1]["hi"] == "inf"


def test_stats_missing_fields(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    write_jsonl(bad, [{"id": "x"}])
    assert main(["stats", "--input", str(bad)]) == 2


# -- gen / grade --------------------------------------------------------------------


@pytest.mark.parametrize(
    "task,n,extra",
    [
        ("count-chars", 25, []),
        ("acronym", 25, ["--length", "5"]),
        ("arithmetic", 25, ["--digits", "10"]),
        ("word-repeat", 10, []),
        ("identify-misspelling", 10, []),
    ],
)
def test_gen_and_gold_replay(tmp_path, task, n, extra):
    dataset = tmp_path / "data.jsonl"
    assert main(["gen", *TOK_ARGS, "--task", task, "-n", str(n), "--seed", "5",
                 "--output", str(dataset), *extra]) == 0
    rows = read_jsonl(dataset)
    assert rows[0]["kind"] == "header"
    records = rows[1:]
    assert len(records) == n
    from retok.tasks import TaskExample, render_gold_generation

    gens = tmp_path / "gens.jsonl"
    write_jsonl(
        gens,
        [
            {"id": r["id"], "generation": render_gold_generation(TaskExample.from_json(r))}
            for r in records
        ],
    )
    report_path = tmp_path / "report.json"
    assert main(["grade", "--task", task, "--dataset", str(dataset),
                 "--generations", str(gens), "--output", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["accuracy_pct"] == 100.0
    assert report["graded"] == n


def test_gen_count_chars_1001(tmp_path):
    out = tmp_path / "cc.jsonl"
    assert main(["gen", *TOK_ARGS, "--task", "count-chars", "-n", "1001",
                 "--seed", "2", "--output", str(out)]) == 0
    assert len(read_jsonl(out)) == 1002  # header + 1001 records


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    argv = ["gen", *TOK_ARGS, "--task", "acronym", "-n", "30", "--seed", "9"]
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_zero_examples(tmp_path):
    out = tmp_path / "empty.jsonl"
    assert main(["gen", *TOK_ARGS, "--task", "acronym", "-n", "0", "--output", str(out)]) == 0
    assert len(read_jsonl(out)) == 1  # header only


def test_grade_empty_generations_all_incorrect(tmp_path):
    dataset = tmp_path / "data.jsonl"
    main(["gen", *TOK_ARGS, "--task", "arithmetic", "-n", "10", "--output", str(dataset)])
    records = read_jsonl(dataset)[1:]
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": r["id"], "generation": ""} for r in records])
    report_path = tmp_path / "report.json"
    assert main(["grade", "--task", "arithmetic", "--dataset", str(dataset),
                 "--generations", str(gens), "--output", str(report_path)]) == 0
    assert json.loads(report_path.read_text())["accuracy_pct"] == 0.0


def test_grade_retention(tmp_path):
    dataset = tmp_path / "data.jsonl"
    main(["gen", *TOK_ARGS, "--task", "arithmetic", "-n", "10", "--output", str(dataset)])
    records = read_jsonl(dataset)[1:]
    canon_report = tmp_path / "canon.json"
    canon_report.write_text(json.dumps({"accuracy_pct": 86.4}))
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": r["id"], "generation": str(r["gold"])} for r in records])
    report_path = tmp_path / "report.json"
    main(["grade", "--task", "arithmetic", "--dataset", str(dataset),
          "--generations", str(gens), "--canonical-report", str(canon_report),
          "--output", str(report_path)])
    report = json.loads(report_path.read_text())
    assert abs(report["retention_pct"] - 100.0 * 100.0 / 86.4) < 1e-3


def test_grade_unmatched_ids(tmp_path):
    dataset = tmp_path / "data.jsonl"
    main(["gen", *TOK_ARGS, "--task", "acronym", "-n", "3", "--output", str(dataset)])
    records = read_jsonl(dataset)[1:]
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": records[0]["id"], "generation": records[0]["gold"]},
                       {"id": "stray", "generation": "x"}])
    report_path = tmp_path / "report.json"
    assert main(["grade", "--task", "acronym", "--dataset", str(dataset),
                 "--generations", str(gens), "--output", str(report_path)]) == 2
    report = json.loads(report_path.read_text())
    assert "stray" in report["unmatched_ids"]
    assert len(report["unmatched_ids"]) == 3


# -- score --------------------------------------------------------------------------


class _GrammarStub(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        text = self.rfile.read(length).decode("utf-8")
        body = json.dumps({"mistakes": text.split().count("badword")}).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def grammar_server():
    server = HTTPServer(("127.0.0.1", 0), _GrammarStub)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_score_spelling_only(tmp_path, capsys):
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": "1", "generation": "the people said they would make time"}])
    assert main(["score", "--generations", str(gens)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["records"][0]["spelling"] == 1.0
    assert "grammaticality" not in report["records"][0]
    assert "mean_grammaticality" not in report


def test_score_with_endpoint(tmp_path, capsys, grammar_server):
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": "1", "generation": "the people said badword here often"}])
    assert main(["score", "--generations", str(gens), "--grammar-endpoint", grammar_server]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["records"][0]["grammaticality"] == round(1.0 - 1 / 6, 6)


def test_score_endpoint_env_override(tmp_path, capsys, grammar_server, monkeypatch):
    monkeypatch.setenv("RETOK_GRAMMAR_ENDPOINT", grammar_server)
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": "1", "generation": "the people said"}])
    assert main(["score", "--generations", str(gens)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["records"][0]["grammaticality"] == 1.0


def test_score_provider_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("RETOK_GRAMMAR_TIMEOUT", "0.2")
    gens = tmp_path / "gens.jsonl"
    write_jsonl(gens, [{"id": "1", "generation": "words"}])
    assert main(["score", "--generations", str(gens),
                 "--grammar-endpoint", "http://127.0.0.1:9"]) == 3


# -- sft-format ----------------------------------------------------------------------


def test_sft_format_cli(tmp_path):
    pairs = tmp_path / "pairs.jsonl"
    write_jsonl(pairs, [
        {"id": "p0", "instruction": "say the word cat", "response": "the cat sat on the mat today"},
        {"id": "p1", "instruction": "a much longer instruction than the reply", "response": "ok"},
    ])
    out = tmp_path / "out.jsonl"
    assert main(["sft-format", *TOK_ARGS, "--mode", "remove-instruction",
                 "--input", str(pairs), "--output", str(out)]) == 0
    rows = read_jsonl(out)
    assert rows[0]["kind"] == "header"
    skipped = [r for r in rows if r.get("kind") == "skipped"]
    assert len(skipped) == 1 and skipped[0]["id"] == "p1"
    assert rows[-1]["kind"] == "trailer" and rows[-1]["skipped"] == 1
    record = [r for r in rows if "rendered" in r][0]
    assert record["instruction"] + record["response"] == "the cat sat on the mat today"


def test_sft_format_all_modes(tmp_path, sft_pairs):
    pairs = tmp_path / "pairs.jsonl"
    write_jsonl(pairs, sft_pairs[:5])
    for mode in ("chat", "full-gradient", "qa-template", "no-template"):
        out = tmp_path / f"{mode}.jsonl"
        assert main(["sft-format", *TOK_ARGS, "--mode", mode,
                     "--input", str(pairs), "--output", str(out)]) == 0
        rows = read_jsonl(out)
        assert len([r for r in rows if "rendered" in r]) == 5


# -- usage ----------------------------------------------------------------------------


def test_usage_errors():
    assert main(["encode"]) == 1
    assert main(["nope"]) == 1
    assert main(["gen", *TOK_ARGS, "--task", "nope", "-n", "1", "--output", "/tmp/x"]) == 1
