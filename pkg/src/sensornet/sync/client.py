"""Node side of the synchronization protocol.

Each cycle asks the server what it already has (the checkpoint), extracts
everything newer from the local store, splits it into capped CSV files, and
uploads them in order. Any failure simply ends the cycle; the next one,
an interval later, re-requests the checkpoint and resumes from whatever
the server acknowledged. The server's answer is authoritative, so the
local watermark is a cache, not a source of truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

from ..csvcodec import ERROR_HEADER, error_row, record_header, record_row
from ..records import (
    BatchFile,
    ErrorCategory,
    ErrorLogEntry,
    IngestReport,
    Record,
    RecordId,
    SensorSpec,
)
from ..node.store import LocalStore
from .transport import Transport, TransportError

__all__ = ["SyncClient", "SyncConfigError", "SyncOutcome", "SyncPolicy", "build_batches"]

DEFAULT_MAX_FILE_BYTES = 2 * 2**20  # the classic 2 MiB upload limit


class SyncConfigError(ValueError):
    """The policy cannot be satisfied (e.g. one record exceeds the cap)."""


@dataclass(frozen=True)
class SyncPolicy:
    sync_interval_s: float = 3600.0
    max_file_bytes: int = DEFAULT_MAX_FILE_BYTES
    transport_timeout_s: float = 10.0

    def __post_init__(self) -> None:
        if self.max_file_bytes <= 0:
            raise ValueError("max_file_bytes must be positive")
        if self.sync_interval_s <= 0:
            raise ValueError("sync interval must be positive")


@dataclass
class SyncOutcome:
    """What one sync cycle did; ``failed_stage`` is None on full success."""

    attempted_at: datetime
    checkpoint: RecordId | None = None
    records_sent: int = 0
    batches_sent: int = 0
    batch_count: int = 0
    inserted: int = 0
    duplicates: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    failed_stage: str | None = None  # checkpoint | provision | upload
    failed_batch_index: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed_stage is None


def _render_batches(
    node_id: str,
    pending: Sequence[Record],
    errors: Sequence[ErrorLogEntry],
    policy: SyncPolicy,
) -> list[tuple[BatchFile, bytes]]:
    """Split pending records into upload files, greedily filling each one
    up to the byte cap, rendering each row exactly once.

    Concatenating the result reproduces ``pending`` exactly. Error entries
    ride on the first file. A new file is also started when the record
    column set changes (after a config change), since one CSV holds one
    column layout.
    """
    if not pending:
        return []
    cap = policy.max_file_bytes
    error_lines = ["", ERROR_HEADER, *(error_row(e) for e in errors)] if errors else []
    err_block = sum(len(line.encode("utf-8")) + 1 for line in error_lines)

    out: list[tuple[BatchFile, bytes]] = []
    current: list[Record] = []
    rows: list[str] = []
    columns: tuple[str, ...] | None = None
    header = ""
    size = 0

    def flush() -> None:
        nonlocal current, rows
        if current:
            lines = [header, *rows]
            batch_errors: list[ErrorLogEntry] = []
            if not out and errors:
                lines.extend(error_lines)
                batch_errors = list(errors)
            data = ("\n".join(lines) + "\n").encode("utf-8")
            out.append((BatchFile(node_id, current, batch_errors), data))
            current = []
            rows = []

    def fresh_size() -> int:
        return len(header) + 1 + (err_block if not out else 0)

    for record in pending:
        record_columns = tuple(record.readings)
        if columns is None or record_columns != columns:
            flush()
            columns = record_columns
            header = record_header(columns)
            size = fresh_size()
        row = record_row(record, columns)
        row_len = len(row) + 1
        if len(header) + 1 + row_len > cap:
            raise SyncConfigError(
                f"record {record.id.canonical} ({row_len} B) cannot fit in a "
                f"{cap} B file; raise max_file_bytes"
            )
        if size + row_len > cap:
            flush()
            size = fresh_size()
            if size + row_len > cap:
                raise SyncConfigError(
                    f"pending error log ({err_block} B) leaves no room for "
                    f"records under the {cap} B cap"
                )
        current.append(record)
        rows.append(row)
        size += row_len
    flush()
    return out


def build_batches(
    node_id: str,
    pending: Sequence[Record],
    errors: Sequence[ErrorLogEntry],
    policy: SyncPolicy,
) -> list[BatchFile]:
    """The upload files for one cycle; see _render_batches for the rules."""
    return [batch for batch, _data in _render_batches(node_id, pending, errors, policy)]


class SyncClient:
    """Drives sync cycles for one node; one in-flight cycle at a time."""

    def __init__(
        self,
        node_id: str,
        store: LocalStore,
        policy: SyncPolicy,
        transport: Transport,
        sensor_specs: Sequence[SensorSpec] | None = None,
        record_interval_s: int = 60,
    ):
        self.node_id = node_id
        self.store = store
        self.policy = policy
        self.transport = transport
        self._specs = list(sensor_specs) if sensor_specs else None
        self._record_interval_s = record_interval_s
        self._provisioned = sensor_specs is None

    def request_checkpoint(self) -> RecordId | None:
        """Ask the server for the newest record id it holds for this node."""
        return self.transport.request_checkpoint(self.node_id)

    def _log_transport_fault(self, now: datetime, message: str) -> None:
        self.store.insert_error(
            ErrorLogEntry(
                node_id=self.node_id,
                timestamp=now,
                category=ErrorCategory.TRANSPORT_FAULT,
                sensor_name=None,
                message=message,
            )
        )

    def _provision(self) -> None:
        """Push this node's sensor list once so the server knows the batch
        columns, then fetch the config back (which clears the updated flag)."""
        assert self._specs is not None
        self.transport.push_sensor_specs(
            self.node_id, self._specs, self._record_interval_s
        )
        self.transport.fetch_node_config(self.node_id)
        self._provisioned = True

    def cycle(self, now: datetime | None = None) -> SyncOutcome:
        """One full sync attempt. Never raises for transport trouble: the
        failure is logged locally and the outcome says where it stopped.
        There is no in-cycle retry; the next attempt happens a sync
        interval later."""
        now = now or datetime.now(timezone.utc).replace(microsecond=0)
        outcome = SyncOutcome(attempted_at=now)

        try:
            checkpoint = self.transport.request_checkpoint(self.node_id)
        except TransportError as exc:
            self._log_transport_fault(now, f"checkpoint request failed: {exc}")
            outcome.failed_stage = "checkpoint"
            outcome.error = str(exc)
            return outcome
        outcome.checkpoint = checkpoint
        if checkpoint is not None:
            # The server's answer is authoritative: everything up to the
            # checkpoint is stored there, even if an earlier ack got lost.
            self.store.mark_synced(checkpoint)

        if not self._provisioned:
            try:
                self._provision()
            except TransportError as exc:
                self._log_transport_fault(now, f"sensor push failed: {exc}")
                outcome.failed_stage = "provision"
                outcome.error = str(exc)
                return outcome

        pending = self.store.pending_after(checkpoint)
        if not pending:
            return outcome
        errors = self.store.pending_errors()
        batches = _render_batches(self.node_id, pending, errors, self.policy)
        outcome.batch_count = len(batches)

        for index, (batch, data) in enumerate(batches):
            try:
                report: IngestReport = self.transport.upload_batch(data)
            except TransportError as exc:
                # Acknowledged batches stay acknowledged; the next cycle's
                # checkpoint tells us exactly where to resume.
                self._log_transport_fault(
                    now, f"upload failed at batch {index + 1}/{len(batches)}: {exc}"
                )
                outcome.failed_stage = "upload"
                outcome.failed_batch_index = index
                outcome.error = str(exc)
                return outcome
            self.store.mark_synced(batch.records[-1].id)
            if index == 0 and errors:
                self.store.mark_errors_synced(len(errors))
            outcome.batches_sent += 1
            outcome.records_sent += len(batch.records)
            outcome.inserted += report.inserted
            outcome.duplicates += report.duplicates
            outcome.rejected.extend(report.rejected)
        return outcome
