"""Embedded entity store.

Two backends behind one interface: a pure in-memory store for tests and
a file-backed store whose layout is::

    store/entities/<kind>/<id>.json     one document per entity
    store/blobs/<aa>/<sha256>           content-addressed file bytes
    store/events.log                    append-only, newline-delimited JSON

Entity writes go through a temp-file rename so a crash never leaves a
half-written document.  Blob writes are idempotent by construction.
"""

from __future__ import annotations

import json
import os
import threading
from collections import defaultdict
from pathlib import Path

from ..errors import NotFoundError
from ..serde import sha256_hex


class Store:
    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root else None
        self._lock = threading.RLock()
        self._entity_locks: dict[tuple[str, str], threading.RLock] = defaultdict(threading.RLock)
        self._entities: dict[str, dict[str, dict]] = defaultdict(dict)
        self._blobs: dict[str, bytes] = {}
        self._events: list[dict] = []
        self._counters: dict[str, int] = {}
        if self.root:
            (self.root / "entities").mkdir(parents=True, exist_ok=True)
            (self.root / "blobs").mkdir(parents=True, exist_ok=True)
            self._load()

    # -- locking ------------------------------------------------------------

    def entity_lock(self, kind: str, entity_id: str) -> threading.RLock:
        with self._lock:
            return self._entity_locks[(kind, entity_id)]

    # -- entities -------------------------------------------------------------

    def get(self, kind: str, entity_id: str) -> dict | None:
        with self._lock:
            doc = self._entities[kind].get(entity_id)
            return json.loads(json.dumps(doc)) if doc is not None else None

    def require(self, kind: str, entity_id: str) -> dict:
        doc = self.get(kind, entity_id)
        if doc is None:
            raise NotFoundError(f"{kind} {entity_id!r} does not exist")
        return doc

    def put(self, kind: str, entity_id: str, doc: dict) -> None:
        payload = json.loads(json.dumps(doc))
        with self._lock:
            self._entities[kind][entity_id] = payload
        if self.root:
            directory = self.root / "entities" / kind
            directory.mkdir(parents=True, exist_ok=True)
            self._atomic_write(directory / f"{entity_id}.json", json.dumps(payload, sort_keys=True, indent=1))

    def delete(self, kind: str, entity_id: str) -> None:
        with self._lock:
            self._entities[kind].pop(entity_id, None)
        if self.root:
            path = self.root / "entities" / kind / f"{entity_id}.json"
            if path.exists():
                path.unlink()

    def ids(self, kind: str) -> list[str]:
        with self._lock:
            return sorted(self._entities[kind])

    def next_id(self, kind: str, prefix: str) -> str:
        with self._lock:
            self._counters[kind] = self._counters.get(kind, 0) + 1
            value = self._counters[kind]
            if self.root:
                self._atomic_write(self.root / "entities" / "_counters.json", json.dumps(self._counters))
            return f"{prefix}{value:06d}"

    # -- blobs ----------------------------------------------------------------

    def put_blob(self, content: bytes) -> str:
        digest = sha256_hex(content)
        with self._lock:
            if digest not in self._blobs:
                self._blobs[digest] = content
                if self.root:
                    directory = self.root / "blobs" / digest[:2]
                    directory.mkdir(parents=True, exist_ok=True)
                    target = directory / digest
                    if not target.exists():
                        self._atomic_write_bytes(target, content)
        return digest

    def get_blob(self, digest: str) -> bytes:
        with self._lock:
            if digest in self._blobs:
                return self._blobs[digest]
        if self.root:
            path = self.root / "blobs" / digest[:2] / digest
            if path.exists():
                content = path.read_bytes()
                with self._lock:
                    self._blobs[digest] = content
                return content
        raise NotFoundError(f"blob {digest} missing from the store")

    # -- events ---------------------------------------------------------------

    def append_event(self, event: dict) -> dict:
        with self._lock:
            event = dict(event, seq=len(self._events) + 1)
            self._events.append(event)
            if self.root:
                with open(self.root / "events.log", "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(event, sort_keys=True) + "\n")
            return event

    def events(self) -> list[dict]:
        with self._lock:
            return list(self._events)

    # -- persistence ------------------------------------------------------------

    def _load(self) -> None:
        entities_dir = self.root / "entities"
        counters = entities_dir / "_counters.json"
        if counters.exists():
            self._counters = json.loads(counters.read_text(encoding="utf-8"))
        for kind_dir in entities_dir.iterdir():
            if not kind_dir.is_dir():
                continue
            for doc_path in kind_dir.glob("*.json"):
                self._entities[kind_dir.name][doc_path.stem] = json.loads(
                    doc_path.read_text(encoding="utf-8")
                )
        events_log = self.root / "events.log"
        if events_log.exists():
            for line in events_log.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._events.append(json.loads(line))

    @staticmethod
    def _atomic_write(path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)

    @staticmethod
    def _atomic_write_bytes(path: Path, content: bytes) -> None:
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(content)
        os.replace(tmp, path)
