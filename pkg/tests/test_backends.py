from __future__ import annotations

import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from genquant.backends import (
    BackendRequestError,
    HttpBackend,
    MockBackend,
    ProtocolError,
    ScoredSequence,
    ScoredToken,
    TransportError,
    whitespace_token_spans,
)


def test_mock_table_logprob():
    backend = MockBackend({("tigers have", "stripes"): 0.5}, vocab_size=100)
    seq = backend.score_text("tigers have stripes")
    assert seq.tokens[-1].text == " stripes"
    assert seq.tokens[-1].logprob == pytest.approx(math.log(0.5))
    assert seq.tokens[0].logprob is None


def test_uniform_mock_logprobs():
    backend = MockBackend(vocab_size=50)
    seq = backend.score_text("bears eat moss and leaves")
    for tok in seq.tokens[1:]:
        assert tok.logprob == pytest.approx(-math.log(50))


def test_whitespace_only_text_rejected():
    backend = MockBackend()
    with pytest.raises(BackendRequestError):
        backend.score_text("   ")
    with pytest.raises(BackendRequestError):
        backend.score_text("")


def test_tokenize_empty():
    assert MockBackend().tokenize("") == []


def test_tokenize_three_words():
    spans = MockBackend().tokenize("a b c")
    assert len(spans) == 3
    assert spans == [(0, 1), (1, 3), (3, 5)]


def test_tokenize_agrees_with_score_offsets():
    backend = MockBackend()
    text = "wolves hunt deer at dusk"
    seq = backend.score_text(text)
    assert backend.tokenize(text) == [(t.char_start, t.char_end) for t in seq.tokens]


def test_determinism():
    backend = MockBackend({("a", "b"): 0.25})
    assert backend.score_text("a b c") == backend.score_text("a b c")


def test_subword_chopping_tiles():
    backend = MockBackend(max_token_chars=3)
    seq = backend.score_text("extraordinary creatures roam")
    assert "".join(t.text for t in seq.tokens) == "extraordinary creatures roam"
    assert all(t.char_end - t.char_start <= 3 for t in seq.tokens)


@given(st.text(alphabet="ab cé.!", min_size=1, max_size=40))
def test_tiling_property(text):
    if not text.strip():
        return
    backend = MockBackend()
    seq = backend.score_text(text)
    assert "".join(t.text for t in seq.tokens) == text
    pos = 0
    for tok in seq.tokens:
        assert tok.char_start == pos
        pos = tok.char_end
    assert pos == len(text)


@given(st.text(alphabet="xy z", min_size=1, max_size=30), st.integers(1, 4))
def test_tiling_property_subword(text, chop):
    if not text.strip():
        return
    seq = MockBackend(max_token_chars=chop).score_text(text)
    assert "".join(t.text for t in seq.tokens) == text


def test_scored_sequence_rejects_gaps():
    with pytest.raises(ProtocolError):
        ScoredSequence(
            "ab cd",
            (ScoredToken("ab", None, 0, 2), ScoredToken("cd", -1.0, 3, 5)),
            "m",
        ).validate()


def test_scored_sequence_rejects_positive_logprob():
    with pytest.raises(ProtocolError):
        ScoredSequence(
            "ab", (ScoredToken("a", None, 0, 1), ScoredToken("b", 0.5, 1, 2)), "m"
        ).validate()


def test_scored_sequence_json_roundtrip():
    seq = MockBackend({("a", "b"): 0.3}).score_text("a b")
    assert ScoredSequence.from_json_bytes(seq.to_json_bytes()) == seq


def test_whitespace_token_spans_trailing_space():
    assert whitespace_token_spans("a b ") == [(0, 1), (1, 4)]
    assert whitespace_token_spans("  a") == [(0, 3)]


def test_mock_table_file_roundtrip(tmp_path):
    table = {
        "backend_id": "mock:file",
        "vocab_size": 64,
        "entries": [{"prefix": "tigers have", "token": "stripes", "p": 0.5}],
    }
    path = tmp_path / "table.json"
    path.write_text(json.dumps(table), "utf-8")
    backend = MockBackend.from_table_file(path)
    assert backend.backend_id == "mock:file"
    seq = backend.score_text("tigers have stripes")
    assert seq.tokens[-1].logprob == pytest.approx(math.log(0.5))


# ---------------------------------------------------------------------------
# HTTP backend against a local stub server


class _Handler(BaseHTTPRequestHandler):
    behavior: dict = {}

    def log_message(self, *args):
        pass

    def do_POST(self):
        cfg = self.behavior
        cfg.setdefault("hits", 0)
        cfg["hits"] += 1
        cfg["last_headers"] = dict(self.headers)
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else {}
        cfg["last_body"] = body
        fail_times = cfg.get("fail_times", 0)
        if cfg["hits"] <= fail_times:
            self.send_response(500)
            self.end_headers()
            return
        status = cfg.get("status", 200)
        if status != 200:
            self.send_response(status)
            self.end_headers()
            self.wfile.write(b"nope")
            return
        prompt = body.get("prompt", "")
        payload = cfg.get("payload") or _echo_payload(prompt, cfg)
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(json.dumps(payload).encode())


def _echo_payload(prompt: str, cfg: dict) -> dict:
    spans = whitespace_token_spans(prompt)
    tokens = [prompt[a:b] for a, b in spans]
    logprobs = [None] + [-0.5 - 0.25 * i for i in range(len(tokens) - 1)]
    lp = {"tokens": tokens, "token_logprobs": logprobs}
    if not cfg.get("omit_offsets"):
        lp["text_offset"] = [a for a, _ in spans]
    return {"choices": [{"text": prompt, "logprobs": lp}]}


@pytest.fixture
def stub_server():
    _Handler.behavior = {}
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}/v1/completions", _Handler.behavior
    finally:
        server.shutdown()
        thread.join(timeout=5)


def test_http_backend_parses_offsets(stub_server):
    url, behavior = stub_server
    backend = HttpBackend(url, "test-model", api_key="sekrit")
    seq = backend.score_text("tigers have stripes")
    assert seq.backend_id == "test-model"
    assert [t.text for t in seq.tokens] == ["tigers", " have", " stripes"]
    assert seq.tokens[0].logprob is None
    assert seq.tokens[1].logprob == pytest.approx(-0.5)
    assert behavior["last_body"]["max_tokens"] == 0
    assert behavior["last_body"]["echo"] is True
    assert behavior["last_headers"]["Authorization"] == "Bearer sekrit"


def test_http_backend_greedy_offsets(stub_server):
    url, behavior = stub_server
    behavior["omit_offsets"] = True
    backend = HttpBackend(url, "test-model")
    seq = backend.score_text("bears eat moss")
    assert [t.text for t in seq.tokens] == ["bears", " eat", " moss"]


def test_http_backend_retries_then_succeeds(stub_server):
    url, behavior = stub_server
    behavior["fail_times"] = 2
    backend = HttpBackend(url, "test-model", backoff=0.01)
    seq = backend.score_text("wolves hunt deer")
    assert len(seq.tokens) == 3
    assert behavior["hits"] == 3


def test_http_backend_gives_up_after_retries(stub_server):
    url, behavior = stub_server
    behavior["fail_times"] = 99
    backend = HttpBackend(url, "test-model", max_retries=1, backoff=0.01)
    with pytest.raises(TransportError):
        backend.score_text("wolves hunt deer")
    assert behavior["hits"] == 2


def test_http_backend_rejection_is_not_retried(stub_server):
    url, behavior = stub_server
    behavior["status"] = 400
    backend = HttpBackend(url, "test-model", backoff=0.01)
    with pytest.raises(BackendRequestError):
        backend.score_text("wolves hunt deer")
    assert behavior["hits"] == 1


def test_http_backend_protocol_error_on_bad_tokens(stub_server):
    url, behavior = stub_server
    behavior["payload"] = {
        "choices": [
            {"logprobs": {"tokens": ["zzz", "yyy"], "token_logprobs": [None, -1.0]}}
        ]
    }
    backend = HttpBackend(url, "test-model")
    with pytest.raises(ProtocolError):
        backend.score_text("wolves hunt")


def test_http_backend_tokenize_matches_score(stub_server):
    url, _ = stub_server
    backend = HttpBackend(url, "test-model")
    text = "tigers have stripes"
    seq = backend.score_text(text)
    assert backend.tokenize(text) == [(t.char_start, t.char_end) for t in seq.tokens]
    assert backend.tokenize("") == []
