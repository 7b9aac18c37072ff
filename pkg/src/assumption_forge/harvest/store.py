"""Append-only JSONL record store with pagination checkpoints."""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .types import RawRecord, RecordKind


class RecordStore:
    """One RawRecord per line; duplicate ids are dropped on append.

    A sidecar checkpoint file keeps the last pagination cursor per
    (repo, kind) so interrupted harvests resume where they stopped.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.checkpoint_path = self.path.with_suffix(self.path.suffix + ".checkpoints")
        self._lock = threading.Lock()
        self._ids: set[str] = set()
        self._counts: dict[str, int] = {}
        self._checkpoints: dict[str, dict] = {}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    row = json.loads(line)
                    self._ids.add(row["id"])
                    key = f"{row['repo']}:{row['kind']}"
                    self._counts[key] = self._counts.get(key, 0) + 1
        if self.checkpoint_path.exists():
            self._checkpoints = json.loads(self.checkpoint_path.read_text(encoding="utf-8"))

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._ids

    def append(self, record: RawRecord) -> bool:
        """Persist the record unless its id is already stored."""
        with self._lock:
            if record.id in self._ids:
                return False
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            self._ids.add(record.id)
            key = f"{record.repo}:{record.kind.value}"
            self._counts[key] = self._counts.get(key, 0) + 1
            return True

    def count(self, repo: str, kind: RecordKind) -> int:
        return self._counts.get(f"{repo}:{kind.value}", 0)

    def records(self, repo: str | None = None, kind: RecordKind | None = None):
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = RawRecord.from_dict(json.loads(line))
                if repo is not None and record.repo != repo:
                    continue
                if kind is not None and record.kind != kind:
                    continue
                yield record

    # --- checkpoints ---
    def get_checkpoint(self, repo: str, kind: RecordKind) -> dict | None:
        return self._checkpoints.get(f"{repo}:{kind.value}")

    def set_checkpoint(self, repo: str, kind: RecordKind, state: dict | None) -> None:
        with self._lock:
            key = f"{repo}:{kind.value}"
            if state is None:
                self._checkpoints.pop(key, None)
            else:
                self._checkpoints[key] = state
            self.checkpoint_path.write_text(
                json.dumps(self._checkpoints, indent=2), encoding="utf-8"
            )
