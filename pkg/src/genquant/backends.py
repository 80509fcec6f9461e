"""Language-model scoring backends.

A backend scores a text and returns per-token natural-log probabilities
with character offsets that tile the text exactly. Two implementations
ship here: an HTTP client for echo-style completion endpoints (the
``max_tokens=0, echo=true, logprobs=k`` wire shape) and a deterministic
table-driven mock used throughout the test suite. :mod:`genquant.cache`
adds a persistent wrapper.
"""
from __future__ import annotations

import json
import logging
import math
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Protocol, runtime_checkable

import requests

logger = logging.getLogger(__name__)


class BackendError(Exception):
    """Base class for scoring failures."""


class TransportError(BackendError):
    """Network-level failure; retryable."""


class BackendRequestError(BackendError):
    """The backend rejected the request; not retryable."""


class ProtocolError(BackendError):
    """The server response violates the scoring contract."""


@dataclass(frozen=True)
class ScoredToken:
    """One token of a scored text.

    ``logprob`` is a natural-log probability (nats, <= 0); it is ``None``
    for a sequence-initial token, which autoregressive scoring cannot
    condition.
    """

    text: str
    logprob: float | None
    char_start: int
    char_end: int


@dataclass(frozen=True)
class ScoredSequence:
    text: str
    tokens: tuple[ScoredToken, ...]
    backend_id: str

    def validate(self) -> None:
        """Check the tiling invariant: tokens cover [0, len(text)) exactly."""
        pos = 0
        for tok in self.tokens:
            if tok.char_start != pos or tok.char_end <= tok.char_start:
                raise ProtocolError(
                    f"tokens do not tile the text at offset {pos}: {tok!r}"
                )
            if self.text[tok.char_start : tok.char_end] != tok.text:
                raise ProtocolError(
                    f"token text {tok.text!r} does not match slice "
                    f"{self.text[tok.char_start:tok.char_end]!r}"
                )
            if tok.logprob is not None and tok.logprob > 0:
                raise ProtocolError(f"positive logprob {tok.logprob} for {tok.text!r}")
            pos = tok.char_end
        if pos != len(self.text):
            raise ProtocolError(f"tokens cover [0, {pos}) but text has length {len(self.text)}")

    def to_obj(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "backend_id": self.backend_id,
            "tokens": [
                {"text": t.text, "logprob": t.logprob, "start": t.char_start, "end": t.char_end}
                for t in self.tokens
            ],
        }

    @classmethod
    def from_obj(cls, obj: Mapping[str, Any]) -> "ScoredSequence":
        seq = cls(
            text=obj["text"],
            tokens=tuple(
                ScoredToken(t["text"], t["logprob"], t["start"], t["end"])
                for t in obj["tokens"]
            ),
            backend_id=obj["backend_id"],
        )
        seq.validate()
        return seq

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_obj(), ensure_ascii=False).encode("utf-8")

    @classmethod
    def from_json_bytes(cls, raw: bytes) -> "ScoredSequence":
        return cls.from_obj(json.loads(raw.decode("utf-8")))


@runtime_checkable
class Backend(Protocol):
    """Anything that can score text and expose its tokenizer boundaries.

    Implementations must be thread-safe and deterministic: scoring the
    same text twice yields identical sequences.
    """

    backend_id: str

    def score_text(self, text: str) -> ScoredSequence: ...

    def tokenize(self, text: str) -> list[tuple[int, int]]: ...


def whitespace_token_spans(text: str, max_token_chars: int | None = None) -> list[tuple[int, int]]:
    """Tiling token spans: each word claims the whitespace before it.

    Mirrors BPE-style tokenizers where a token carries its leading space.
    ``max_token_chars`` additionally chops long tokens to emulate subword
    splitting.
    """
    if not text:
        return []
    matches = list(re.finditer(r"\S+", text))
    if not matches:
        return [(0, len(text))]
    spans = []
    prev_end = 0
    for m in matches:
        spans.append((prev_end, m.end()))
        prev_end = m.end()
    if prev_end < len(text):
        start, _ = spans[-1]
        spans[-1] = (start, len(text))
    if max_token_chars:
        chopped = []
        for start, end in spans:
            while end - start > max_token_chars:
                chopped.append((start, start + max_token_chars))
                start += max_token_chars
            chopped.append((start, end))
        spans = chopped
    return spans


class MockBackend:
    """Deterministic table-driven backend.

    ``table`` maps ``(prefix, token)`` to a probability in (0, 1], where
    ``prefix`` is the exact text before the token and ``token`` is the
    token surface with surrounding whitespace stripped. Unlisted pairs
    fall back to a uniform ``1 / vocab_size``. With ``prefix_sensitive``
    off the prefix is ignored (a context-blind model); ``lowercase_keys``
    additionally case-folds lookups.
    """

    def __init__(
        self,
        table: Mapping[tuple[str, str], float] | None = None,
        vocab_size: int = 100,
        backend_id: str = "mock",
        prefix_sensitive: bool = True,
        lowercase_keys: bool = False,
        max_token_chars: int | None = None,
    ):
        if vocab_size < 2:
            raise ValueError("vocab_size must be >= 2")
        self.vocab_size = vocab_size
        self.backend_id = backend_id
        self.prefix_sensitive = prefix_sensitive
        self.lowercase_keys = lowercase_keys
        self.max_token_chars = max_token_chars
        self.table: dict[tuple[str, str], float] = {}
        for (prefix, token), p in (table or {}).items():
            if not (0 < p <= 1):
                raise ValueError(f"probability out of range for {(prefix, token)}: {p}")
            self.table[self._key(prefix, token)] = p

    def _key(self, prefix: str, token: str) -> tuple[str, str]:
        prefix = prefix if self.prefix_sensitive else ""
        token = token.strip()
        if self.lowercase_keys:
            prefix, token = prefix.lower(), token.lower()
        return prefix, token

    def tokenize(self, text: str) -> list[tuple[int, int]]:
        return whitespace_token_spans(text, self.max_token_chars)

    def logprob_for(self, prefix: str, token: str) -> float:
        p = self.table.get(self._key(prefix, token))
        if p is None:
            return -math.log(self.vocab_size)
        return math.log(p)

    def score_text(self, text: str) -> ScoredSequence:
        if not text.strip():
            raise BackendRequestError("refusing to score empty or whitespace-only text")
        tokens = []
        for i, (start, end) in enumerate(self.tokenize(text)):
            surface = text[start:end]
            logprob = None if i == 0 else self.logprob_for(text[:start], surface)
            tokens.append(ScoredToken(surface, logprob, start, end))
        seq = ScoredSequence(text=text, tokens=tuple(tokens), backend_id=self.backend_id)
        seq.validate()
        return seq

    @classmethod
    def from_table_file(cls, path: str | Path) -> "MockBackend":
        """Load a mock from JSON: {"backend_id", "vocab_size",
        "prefix_sensitive", "lowercase_keys", "max_token_chars",
        "entries": [{"prefix", "token", "p"}]}."""
        obj = json.loads(Path(path).read_text("utf-8"))
        table = {(e["prefix"], e["token"]): float(e["p"]) for e in obj.get("entries", [])}
        return cls(
            table=table,
            vocab_size=int(obj.get("vocab_size", 100)),
            backend_id=str(obj.get("backend_id", "mock")),
            prefix_sensitive=bool(obj.get("prefix_sensitive", True)),
            lowercase_keys=bool(obj.get("lowercase_keys", False)),
            max_token_chars=obj.get("max_token_chars"),
        )


class HttpBackend:
    """Client for completion endpoints that echo prompt logprobs.

    Sends ``{model, prompt, max_tokens: 0, echo: true, logprobs: k}`` and
    expects ``choices[0].logprobs`` with ``tokens``, ``token_logprobs``
    and (optionally) ``text_offset``. When offsets are missing they are
    re-derived by greedy left-to-right matching of the token strings.
    Transport failures are retried with exponential backoff; rejections
    are not.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        logprobs: int = 1,
        timeout: float = 120.0,
        max_retries: int = 3,
        backoff: float = 0.5,
        backend_id: str | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.logprobs = logprobs
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.backend_id = backend_id or model

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _post(self, payload: dict[str, Any]) -> dict[str, Any]:
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = requests.post(
                    self.endpoint, json=payload, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_exc = exc
                logger.warning("transport error (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code >= 500:
                last_exc = TransportError(f"server error {resp.status_code}")
                logger.warning("server error %d (attempt %d)", resp.status_code, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise BackendRequestError(f"{resp.status_code}: {resp.text[:500]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ProtocolError(f"response is not JSON: {exc}") from exc
        raise TransportError(f"giving up after {self.max_retries + 1} attempts: {last_exc}")

    def score_text(self, text: str) -> ScoredSequence:
        if not text.strip():
            raise BackendRequestError("refusing to score empty or whitespace-only text")
        payload = {
            "model": self.model,
            "prompt": text,
            "max_tokens": 0,
            "echo": True,
            "logprobs": self.logprobs,
        }
        data = self._post(payload)
        return self._parse_response(text, data)

    def _parse_response(self, text: str, data: Mapping[str, Any]) -> ScoredSequence:
        try:
            lp = data["choices"][0]["logprobs"]
            token_strings = lp["tokens"]
            token_logprobs = lp["token_logprobs"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed logprobs payload: {exc}") from exc
        if len(token_strings) != len(token_logprobs):
            raise ProtocolError("tokens and token_logprobs length mismatch")
        offsets = lp.get("text_offset")
        if offsets is not None and len(offsets) == len(token_strings):
            starts = [int(o) for o in offsets]
        else:
            starts = self._greedy_offsets(text, token_strings)
        ends = starts[1:] + [len(text)]
        tokens = []
        for i, (start, end, logprob) in enumerate(zip(starts, ends, token_logprobs)):
            if logprob is None and i > 0:
                raise ProtocolError(f"missing logprob for non-initial token index {i}")
            tokens.append(ScoredToken(text[start:end], logprob, start, end))
        seq = ScoredSequence(text=text, tokens=tuple(tokens), backend_id=self.backend_id)
        seq.validate()
        return seq

    @staticmethod
    def _greedy_offsets(text: str, token_strings: list[str]) -> list[int]:
        starts = []
        pos = 0
        for tok in token_strings:
            if not text.startswith(tok, pos):
                raise ProtocolError(
                    f"token {tok!r} does not match text at offset {pos}"
                )
            starts.append(pos)
            pos += len(tok)
        if pos != len(text):
            raise ProtocolError("token strings do not cover the text")
        return starts

    def tokenize(self, text: str) -> list[tuple[int, int]]:
        # The echo scoring call already exposes the server tokenizer's
        # boundaries, so a separate tokenize endpoint is unnecessary.
        if not text:
            return []
        seq = self.score_text(text)
        return [(t.char_start, t.char_end) for t in seq.tokens]
