from __future__ import annotations

import json
import os

import pytest

from genquant.cli import ConfigError, RunConfig, main, make_parser, resolve_config
from genquant.corpus import Quantifier, sample_to_obj, write_samples

from conftest import make_sample, rig_table


@pytest.fixture
def mock_table_file(tmp_path):
    """Mock table making the gold quantifier win for the toy corpus."""
    samples = _toy_samples()
    table = {}
    for sample in samples:
        table.update(rig_table(sample, sample.original_quantifier))
        table.update(rig_table(sample, sample.original_quantifier, context=sample.context))
    entries = [{"prefix": p, "token": t, "p": v} for (p, t), v in table.items()]
    path = tmp_path / "table.json"
    path.write_text(json.dumps({"backend_id": "mock:cli", "vocab_size": 100, "entries": entries}))
    return path


def _toy_samples():
    return [
        make_sample("a", "tigers have stripes", "stripes", Quantifier.GEN,
                    context="words of context here", source="dolma", metadata={"document_id": "d1"}),
        make_sample("b", "bears eat honey", "honey", Quantifier.MOST,
                    context="other words over there", source="dolma", metadata={"document_id": "d2"}),
    ]


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "toy.jsonl"
    write_samples(_toy_samples(), path)
    return path


def test_score_with_mock(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main(["score", "--data", str(data_file), "--mock", str(mock_table_file), "--out", str(out)])
    assert code == 0
    lines = [json.loads(l) for l in (out / "results.jsonl").read_text().splitlines()]
    assert [l["winner"] for l in lines] == ["gen", "most"]
    assert (out / "failures.jsonl").read_text() == ""
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["backend_id"] == "mock:cli"


def test_score_rerun_is_byte_identical(tmp_path, data_file, mock_table_file):
    cache = tmp_path / "cache"
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        code = main([
            "score", "--data", str(data_file), "--mock", str(mock_table_file),
            "--cache", str(cache), "--out", str(out),
        ])
        assert code == 0
        outs.append(out)
    for filename in ("results.jsonl", "failures.jsonl", "manifest.json"):
        assert (outs[0] / filename).read_bytes() == (outs[1] / filename).read_bytes()


def test_score_without_backend_is_config_error(tmp_path, data_file, capsys, monkeypatch):
    for var in ("GENQUANT_ENDPOINT", "GENQUANT_MODEL", "GENQUANT_MOCK"):
        monkeypatch.delenv(var, raising=False)
    code = main(["score", "--data", str(data_file), "--out", str(tmp_path / "x")])
    assert code == 1
    assert "no backend configured" in capsys.readouterr().err


def test_score_context_flag_validation(tmp_path, data_file, mock_table_file):
    code = main([
        "score", "--data", str(data_file), "--mock", str(mock_table_file),
        "--context", "wat", "--out", str(tmp_path / "x"),
    ])
    assert code == 1


def test_score_partial_failure_exit_code(tmp_path, mock_table_file):
    good = sample_to_obj(_toy_samples()[0])
    bad = dict(good, id="broken", span_end=999)
    data = tmp_path / "mixed.jsonl"
    data.write_text(json.dumps(good) + "\n" + json.dumps(bad) + "\n")
    out = tmp_path / "out"
    code = main(["score", "--data", str(data), "--mock", str(mock_table_file), "--out", str(out)])
    assert code == 2
    failures = [json.loads(l) for l in (out / "failures.jsonl").read_text().splitlines()]
    assert failures and failures[0]["sample_id"] == "line:2"


def test_missing_data_file(tmp_path, mock_table_file):
    code = main([
        "score", "--data", str(tmp_path / "nope.jsonl"), "--mock", str(mock_table_file),
        "--out", str(tmp_path / "x"),
    ])
    assert code == 1


def test_gen_stereo_seed_count(tmp_path):
    out = tmp_path / "seeds.jsonl"
    assert main(["gen-stereo", "--out", str(out)]) == 0
    assert len(out.read_text("utf-8").splitlines()) == 504


def test_gen_stereo_samples(tmp_path):
    out = tmp_path / "samples.jsonl"
    assert main(["gen-stereo", "--out", str(out), "--samples"]) == 0
    lines = out.read_text("utf-8").splitlines()
    assert len(lines) == 504 * 3
    first = json.loads(lines[0])
    assert first["quantifier"] == "gen"


def test_exp_context_sweep_points(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main([
        "exp", "context", "--data", str(data_file), "--mock", str(mock_table_file),
        "--max-ctx", "64", "--out", str(out),
    ])
    assert code == 0
    rows = (out / "aggregate.csv").read_text().splitlines()
    assert len(rows) == 1 + 17  # header + one row per context length
    assert (out / "minimal_contexts.csv").exists()
    assert (out / "feature_table.csv").exists()


def test_exp_confusion_with_charts(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main([
        "exp", "confusion", "--data", str(data_file), "--mock", str(mock_table_file),
        "--out", str(out), "--charts",
    ])
    assert code == 0
    assert (out / "chart.png").exists()
    assert (out / "aggregate.csv").exists()


def test_exp_implicit_filters_generics(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main([
        "exp", "implicit", "--data", str(data_file), "--mock", str(mock_table_file),
        "--out", str(out),
    ])
    assert code == 0
    rows = (out / "results.csv").read_text().splitlines()
    assert len(rows) == 2  # header + the single generic sample


def test_exp_stereo_bundled(tmp_path):
    table = tmp_path / "uniform.json"
    table.write_text(json.dumps({"backend_id": "uniform", "vocab_size": 10, "entries": []}))
    out = tmp_path / "out"
    code = main(["exp", "stereo", "--mock", str(table), "--out", str(out)])
    assert code == 0
    rows = (out / "aggregate.csv").read_text().splitlines()
    assert len(rows) == 1 + 12  # header + 2x2x3 design cells


def test_exp_hvshp(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main([
        "exp", "hvshp", "--data", str(data_file), "--mock", str(mock_table_file),
        "--context-lengths", "0,4", "--out", str(out),
    ])
    assert code == 0
    rows = (out / "aggregate.csv").read_text().splitlines()
    assert len(rows) == 3


def test_exp_random_context(tmp_path, data_file, mock_table_file):
    out = tmp_path / "out"
    code = main([
        "exp", "context", "--data", str(data_file), "--mock", str(mock_table_file),
        "--random-context", "--seed", "11", "--max-ctx", "8", "--out", str(out),
    ])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 11
    assert manifest["params"]["context_source"] == "random"
    assert not (out / "minimal_contexts.csv").exists()


def test_mine_cli(tmp_path):
    docs = tmp_path / "docs.jsonl"
    docs.write_text(
        json.dumps({"id": "d1", "text": "This is a cat. Tigers have stripes."}) + "\n"
    )
    out = tmp_path / "candidates.jsonl"
    code = main(["mine", "--input", str(docs), "--out", str(out), "--scorer", "none"])
    assert code == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert [l["sentence"] for l in lines] == ["Tigers have stripes."]


def test_mine_cli_stub_scorer(tmp_path):
    docs = tmp_path / "docs.jsonl"
    docs.write_text(json.dumps({"id": "d1", "text": "Tigers have stripes."}) + "\n")
    keep = tmp_path / "keep.jsonl"
    drop = tmp_path / "drop.jsonl"
    assert main(["mine", "--input", str(docs), "--out", str(keep),
                 "--scorer", "stub", "--threshold", "0.5"]) == 0
    assert main(["mine", "--input", str(docs), "--out", str(drop),
                 "--scorer", "stub", "--threshold", "0.7"]) == 0
    assert len(keep.read_text().splitlines()) == 1
    assert drop.read_text() == ""


def test_mine_cli_endpoint_scorer(tmp_path):
    import threading
    from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            self.rfile.read(length)
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(b'{"score": 0.93}')

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        docs = tmp_path / "docs.jsonl"
        docs.write_text(json.dumps({"id": "d1", "text": "Tigers have stripes."}) + "\n")
        out = tmp_path / "out.jsonl"
        url = f"http://127.0.0.1:{server.server_address[1]}/score"
        assert main(["mine", "--input", str(docs), "--out", str(out), "--scorer", url]) == 0
        (line,) = [json.loads(l) for l in out.read_text().splitlines()]
        assert line["metadata"]["classifier_score"] == pytest.approx(0.93)
    finally:
        server.shutdown()
        thread.join(timeout=5)


def test_mine_cli_threshold_validation(tmp_path):
    docs = tmp_path / "docs.jsonl"
    docs.write_text(json.dumps({"id": "d", "text": "x"}) + "\n")
    code = main(["mine", "--input", str(docs), "--out", str(tmp_path / "o"), "--threshold", "2"])
    assert code == 1


def test_help_exits_zero():
    assert main(["--help"]) == 0
    assert main([]) == 1  # missing subcommand


def test_version_flag():
    assert main(["--version"]) == 0


# ---------------------------------------------------------------------------
# Config resolution


def test_config_precedence(tmp_path, monkeypatch):
    config = tmp_path / "genquant.conf"
    config.write_text("endpoint = http://file.example/v1\nparallelism = 3\nmodel = file-model\n")
    monkeypatch.setenv("GENQUANT_ENDPOINT", "http://env.example/v1")
    parser = make_parser()
    args = parser.parse_args([
        "score", "--data", "x.jsonl", "--config", str(config),
        "--endpoint", "http://flag.example/v1",
    ])
    cfg = resolve_config(args)
    assert cfg.endpoint == "http://flag.example/v1"  # flag beats env beats file
    assert cfg.model == "file-model"  # file value used when nothing else set
    assert cfg.parallelism == 3

    args = parser.parse_args(["score", "--data", "x.jsonl", "--config", str(config)])
    cfg = resolve_config(args)
    assert cfg.endpoint == "http://env.example/v1"  # env beats file


def test_config_validation():
    cfg = RunConfig(parallelism=0)
    with pytest.raises(ConfigError):
        cfg.validate()
    cfg = RunConfig(max_context=6)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_bad_config_file_is_config_error(tmp_path, data_file):
    config = tmp_path / "bad.conf"
    config.write_text("just words\n")
    code = main(["score", "--data", str(data_file), "--config", str(config), "--out", str(tmp_path / "o")])
    assert code == 1
