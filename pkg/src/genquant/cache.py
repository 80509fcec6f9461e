"""Persistent score cache.

Responses are stored one file per key under a root directory, keyed by
SHA-256 of ``backend_id || NUL || text``. Writes go through a temp file
and an atomic rename, so concurrent writers of the same key are safe
(both write identical bytes) and readers never observe partial files.
Corrupt entries are treated as misses with a warning.
"""
from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path

from genquant.backends import Backend, ProtocolError, ScoredSequence

logger = logging.getLogger(__name__)


class FileStore:
    """Directory-backed key-value store with atomic single-entry writes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> bytes | None:
        try:
            return self._path(key).read_bytes()
        except FileNotFoundError:
            return None

    def put(self, key: str, value: bytes) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(value)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*/*.json"))


def score_key(backend_id: str, text: str) -> str:
    digest = hashlib.sha256()
    digest.update(backend_id.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(text.encode("utf-8"))
    return digest.hexdigest()


class CachedBackend:
    """Wrap a backend so identical (backend_id, text) requests hit disk.

    Cached sequences round-trip bit-exactly (JSON float repr preserves
    every bit of a double).
    """

    def __init__(self, backend: Backend, store: FileStore):
        self.backend = backend
        self.store = store

    @property
    def backend_id(self) -> str:
        return self.backend.backend_id

    def score_text(self, text: str) -> ScoredSequence:
        key = score_key(self.backend_id, text)
        raw = self.store.get(key)
        if raw is not None:
            try:
                seq = ScoredSequence.from_json_bytes(raw)
                if seq.text == text and seq.backend_id == self.backend_id:
                    return seq
                logger.warning("cache entry %s does not match its key; refetching", key[:12])
            except (ValueError, KeyError, TypeError, ProtocolError) as exc:
                logger.warning("corrupt cache entry %s (%s); refetching", key[:12], exc)
        seq = self.backend.score_text(text)
        self.store.put(key, seq.to_json_bytes())
        return seq

    def tokenize(self, text: str) -> list[tuple[int, int]]:
        if not text.strip():
            return self.backend.tokenize(text)
        seq = self.score_text(text)
        return [(t.char_start, t.char_end) for t in seq.tokens]


def cached(backend: Backend, store: FileStore) -> CachedBackend:
    return CachedBackend(backend, store)
