"""Node-local record store: idempotent keyed inserts, a sync watermark,
and optional append-only journalling so nothing is lost across restarts."""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..journal import replay_journal
from ..records import (
    ErrorCategory,
    ErrorLogEntry,
    Record,
    RecordId,
    format_basic_utc,
    parse_basic_utc,
    parse_record_id,
)
from ..recordset import RecordSet

__all__ = ["LocalStore"]


class LocalStore:
    """Durable buffer between the sampling loop and the sync task.

    With a ``path`` every mutation is appended to a JSON-lines journal and
    replayed on open; a torn final line (crash mid-write) is dropped. Without
    a path the store is memory-only, which is what the simulation harness
    uses. A lock serializes writers; reads hand out snapshots.
    """

    def __init__(self, node_id: str, path: str | Path | None = None):
        self.node_id = node_id
        self._records = RecordSet(node_id)
        self._errors: list[ErrorLogEntry] = []
        self._errors_synced = 0
        self._last_synced: RecordId | None = None
        self._lock = threading.Lock()
        self._journal = None
        if path is not None:
            path = Path(path)
            if path.exists():
                self._replay(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._journal = open(path, "a", encoding="utf-8")

    # -- journal ---------------------------------------------------------

    def _replay(self, path: Path) -> None:
        """Rebuild state from the journal; a torn tail (crash mid-append)
        is truncated away so later appends start on a clean line."""
        for op in replay_journal(path):
            self._apply(op)

    def _apply(self, op: dict) -> None:
        kind = op["t"]
        if kind == "rec":
            rid = parse_record_id(op["id"])
            self._records.add(Record(rid, dict(op["v"])))
        elif kind == "err":
            self._errors.append(
                ErrorLogEntry(
                    node_id=self.node_id,
                    timestamp=parse_basic_utc(op["ts"]),
                    category=ErrorCategory(op["cat"]),
                    sensor_name=op.get("sensor"),
                    message=op["msg"],
                )
            )
        elif kind == "synced":
            self._last_synced = parse_record_id(op["id"])
        elif kind == "errs_synced":
            self._errors_synced = op["n"]

    def _append(self, op: dict) -> None:
        if self._journal is not None:
            self._journal.write(json.dumps(op, separators=(",", ":")) + "\n")
            self._journal.flush()

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()
            self._journal = None

    # -- records ---------------------------------------------------------

    def insert(self, record: Record) -> bool:
        """Insert a validated record; re-inserting the same id is a no-op."""
        with self._lock:
            added = self._records.add(record)
            if added:
                self._append({"t": "rec", "id": record.id.canonical, "v": record.readings})
            return added

    def insert_error(self, entry: ErrorLogEntry) -> None:
        if entry.node_id != self.node_id:
            raise ValueError("error entry from foreign node")
        with self._lock:
            self._errors.append(entry)
            self._append(
                {
                    "t": "err",
                    "ts": format_basic_utc(entry.timestamp),
                    "cat": entry.category.value,
                    "sensor": entry.sensor_name,
                    "msg": entry.message,
                }
            )

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> list[Record]:
        with self._lock:
            return self._records.records()

    def latest_id(self) -> RecordId | None:
        with self._lock:
            return self._records.latest_id()

    def errors(self) -> list[ErrorLogEntry]:
        with self._lock:
            return list(self._errors)

    # -- sync bookkeeping --------------------------------------------------

    @property
    def last_synced(self) -> RecordId | None:
        return self._last_synced

    def pending_after(self, checkpoint: RecordId | None) -> list[Record]:
        """Records strictly newer than ``checkpoint``, ascending; all of
        them when there is no checkpoint. Rejects a foreign node's id."""
        if checkpoint is not None and checkpoint.node_id != self.node_id:
            raise ValueError(
                f"checkpoint {checkpoint.canonical} belongs to another node"
            )
        with self._lock:
            if checkpoint is None:
                return self._records.records()
            return self._records.after(checkpoint.timestamp)

    def pending(self) -> list[Record]:
        return self.pending_after(self._last_synced)

    def pending_errors(self) -> list[ErrorLogEntry]:
        with self._lock:
            return list(self._errors[self._errors_synced:])

    def mark_synced(self, record_id: RecordId) -> None:
        """Advance the sync watermark; it never moves backwards."""
        if record_id.node_id != self.node_id:
            raise ValueError("cannot mark foreign record as synced")
        with self._lock:
            if self._last_synced is None or record_id > self._last_synced:
                self._last_synced = record_id
                self._append({"t": "synced", "id": record_id.canonical})

    def mark_errors_synced(self, count: int) -> None:
        with self._lock:
            count = min(self._errors_synced + count, len(self._errors))
            if count > self._errors_synced:
                self._errors_synced = count
                self._append({"t": "errs_synced", "n": count})
