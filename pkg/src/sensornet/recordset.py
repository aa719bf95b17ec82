"""Time-ordered, id-keyed record collection for one node.

Backs both the node-local store and the server's per-node partitions:
insertion is idempotent on RecordId, and range/after queries run off a
sorted timestamp index.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from datetime import datetime

from .records import Record, RecordId

__all__ = ["RecordSet"]


class RecordSet:
    def __init__(self, node_id: str):
        self.node_id = node_id
        self._by_id: dict[RecordId, Record] = {}
        self._times: list[float] = []
        self._ordered: list[Record] = []

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, record_id: RecordId) -> bool:
        return record_id in self._by_id

    def get(self, record_id: RecordId) -> Record | None:
        return self._by_id.get(record_id)

    def add(self, record: Record) -> bool:
        """Insert; returns False (and changes nothing) for a duplicate id."""
        rid = record.id
        if rid.node_id != self.node_id:
            raise ValueError(
                f"record {rid.canonical} does not belong to node {self.node_id!r}"
            )
        if rid in self._by_id:
            return False
        self._by_id[rid] = record
        ts = rid.timestamp.timestamp()
        if not self._times or ts > self._times[-1]:
            self._times.append(ts)
            self._ordered.append(record)
        else:
            # Out-of-order arrival (replayed uploads); keep the index sorted.
            pos = bisect_right(self._times, ts)
            self._times.insert(pos, ts)
            self._ordered.insert(pos, record)
        return True

    def records(self) -> list[Record]:
        """All records, ascending by timestamp (a copy)."""
        return list(self._ordered)

    def after(self, ts: datetime) -> list[Record]:
        """Records strictly newer than ``ts``, ascending."""
        return self._ordered[bisect_right(self._times, ts.timestamp()):]

    def in_range(self, start: datetime, end: datetime) -> list[Record]:
        """Records with start <= timestamp < end, ascending."""
        lo = bisect_left(self._times, start.timestamp())
        hi = bisect_left(self._times, end.timestamp())
        return self._ordered[lo:hi]

    def latest_id(self) -> RecordId | None:
        return self._ordered[-1].id if self._ordered else None
