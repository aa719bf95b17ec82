"""Sync protocol, node side: batching under the byte cap and the
checkpoint-first cycle with its failure semantics."""

from __future__ import annotations

from datetime import timedelta

import pytest

from sensornet.csvcodec import decode_batch, encode_batch
from sensornet.node.store import LocalStore
from sensornet.records import (
    BatchFile,
    ErrorCategory,
    ErrorLogEntry,
    IngestReport,
    Record,
)
from sensornet.sync.client import (
    SyncClient,
    SyncConfigError,
    SyncPolicy,
    build_batches,
    _render_batches,
)
from sensornet.sync.transport import TransportError

from conftest import T0, record_at


def _records(node_id: str, count: int, start_s: int = 0, value=1.5) -> list[Record]:
    return [
        record_at(node_id, start_s + i * 60, {"temperature": value, "light": i % 2})
        for i in range(count)
    ]


def _policy(**kwargs) -> SyncPolicy:
    return SyncPolicy(**kwargs)


# -- build_batches ------------------------------------------------------------


def test_sixty_records_fit_one_default_batch():
    batches = build_batches("rpi_1", _records("rpi_1", 60), [], _policy())
    assert len(batches) == 1
    assert len(batches[0].records) == 60


def test_no_pending_no_batches():
    assert build_batches("rpi_1", [], [], _policy()) == []


def test_split_merge_oracle_10k():
    records = _records("rpi_1", 10_000)
    # cap sized to roughly 100 rows
    one = encode_batch(BatchFile("rpi_1", records[:1]))
    header_len = one.decode().index("\n") + 1
    row_len = len(one) - header_len
    cap = header_len + row_len * 100
    policy = _policy(max_file_bytes=cap)
    batches = build_batches("rpi_1", records, [], policy)

    # concatenation equals input: no loss, no duplication, order kept
    merged = [record for batch in batches for record in batch.records]
    assert merged == records
    # every encoded file respects the cap
    for batch in batches:
        assert len(encode_batch(batch)) <= cap
    # greedy fill: expected count within one of the ideal split
    import math
    assert len(batches) == math.ceil(10_000 / 100)


def test_default_two_mib_cap_is_honored():
    records = _records("rpi_1", 45_000)  # ~2.3 MB encoded
    policy = _policy()
    batches = build_batches("rpi_1", records, [], policy)
    assert len(batches) > 1
    total = 0
    for batch in batches:
        data = encode_batch(batch)
        assert len(data) <= policy.max_file_bytes
        total += len(batch.records)
    assert total == 45_000


def test_errors_attach_to_first_batch_only():
    errors = [
        ErrorLogEntry("rpi_1", T0, ErrorCategory.TRANSPORT_FAULT, None, "server unavailable")
    ]
    records = _records("rpi_1", 300)
    one = encode_batch(BatchFile("rpi_1", records[:1]))
    cap = len(one) + 40 * (len(one) - one.decode().index("\n") - 1)
    batches = build_batches("rpi_1", records, errors, _policy(max_file_bytes=cap))
    assert len(batches) > 1
    assert batches[0].errors == errors
    assert all(b.errors == [] for b in batches[1:])


def test_single_oversized_record_is_config_error():
    record = record_at("rpi_1", 0, {f"s{i}": 1.23456 for i in range(50)})
    with pytest.raises(SyncConfigError):
        build_batches("rpi_1", [record], [], _policy(max_file_bytes=64))


def test_column_change_starts_new_batch():
    before = [record_at("rpi_1", i * 60, {"a": 1}) for i in range(3)]
    after = [record_at("rpi_1", (3 + i) * 60, {"a": 1, "b": 2}) for i in range(3)]
    batches = build_batches("rpi_1", before + after, [], _policy())
    assert [len(b.records) for b in batches] == [3, 3]
    assert decode_batch(encode_batch(batches[0])) == batches[0]
    assert decode_batch(encode_batch(batches[1])) == batches[1]


def test_rendered_bytes_equal_standalone_encoding():
    records = _records("rpi_1", 10)
    errors = [ErrorLogEntry("rpi_1", T0, ErrorCategory.TRANSPORT_FAULT, None, "x")]
    for batch, data in _render_batches("rpi_1", records, errors, _policy()):
        assert data == encode_batch(batch)


# -- sync cycle ---------------------------------------------------------------


class ScriptedTransport:
    """In-memory server stand-in with scriptable failures."""

    def __init__(self):
        self.held: dict = {}
        self.uploads: list[bytes] = []
        self.fail_checkpoint = False
        self.fail_upload_at: int | None = None  # 0-based upload index in this cycle
        self.pushed = 0
        self._cycle_uploads = 0

    def begin_cycle(self):
        self._cycle_uploads = 0

    def request_checkpoint(self, node_id):
        if self.fail_checkpoint:
            raise TransportError("network unreachable")
        newest = [rid for rid in self.held if rid.node_id == node_id]
        return max(newest, default=None)

    def upload_batch(self, data: bytes) -> IngestReport:
        if self.fail_upload_at is not None and self._cycle_uploads == self.fail_upload_at:
            raise TransportError("connection reset")
        self._cycle_uploads += 1
        batch = decode_batch(data)
        inserted = duplicates = 0
        for record in batch.records:
            if record.id in self.held:
                duplicates += 1
            else:
                self.held[record.id] = record
                inserted += 1
        self.uploads.append(data)
        return IngestReport(inserted=inserted, duplicates=duplicates)

    def push_sensor_specs(self, node_id, specs, record_interval_s):
        self.pushed += 1

    def fetch_node_config(self, node_id):
        return []


def _client(store, transport, **policy_kwargs):
    return SyncClient("rpi_1", store, _policy(**policy_kwargs), transport)


def test_healthy_cycle_sends_everything_and_advances_watermark():
    store = LocalStore("rpi_1")
    for record in _records("rpi_1", 60):
        store.insert(record)
    transport = ScriptedTransport()
    outcome = _client(store, transport).cycle(now=T0 + timedelta(hours=1))
    assert outcome.ok and outcome.records_sent == 60 and outcome.batches_sent == 1
    assert store.last_synced == store.latest_id()
    assert store.pending() == []
    assert len(transport.held) == 60


def test_checkpoint_failure_logs_and_aborts():
    store = LocalStore("rpi_1")
    store.insert(record_at("rpi_1", 0, {"temperature": 1.0, "light": 0}))
    transport = ScriptedTransport()
    transport.fail_checkpoint = True
    outcome = _client(store, transport).cycle(now=T0)
    assert not outcome.ok and outcome.failed_stage == "checkpoint"
    assert store.last_synced is None
    faults = [e for e in store.errors() if e.category is ErrorCategory.TRANSPORT_FAULT]
    assert len(faults) == 1
    assert len(transport.uploads) == 0


def test_no_pending_means_no_transfer():
    store = LocalStore("rpi_1")
    transport = ScriptedTransport()
    outcome = _client(store, transport).cycle(now=T0)
    assert outcome.ok and outcome.records_sent == 0
    assert transport.uploads == []


def test_second_cycle_after_disruption_sends_double():
    store = LocalStore("rpi_1")
    transport = ScriptedTransport()
    client = _client(store, transport)

    for record in _records("rpi_1", 60):
        store.insert(record)
    transport.fail_checkpoint = True
    assert not client.cycle(now=T0 + timedelta(hours=1)).ok

    for record in _records("rpi_1", 60, start_s=3600):
        store.insert(record)
    transport.fail_checkpoint = False
    outcome = client.cycle(now=T0 + timedelta(hours=2))
    assert outcome.ok and outcome.records_sent == 120


def test_mid_sequence_failure_resumes_without_gaps_or_duplicates():
    """Fault-injection oracle: fail after the first of three batches, then
    let the next cycle finish the job; the server must end complete and
    duplicate-free."""
    store = LocalStore("rpi_1")
    records = _records("rpi_1", 300)
    for record in records:
        store.insert(record)
    one = encode_batch(BatchFile("rpi_1", records[:1]))
    header_len = one.decode().index("\n") + 1
    cap = header_len + (len(one) - header_len) * 100
    transport = ScriptedTransport()
    client = _client(store, transport, max_file_bytes=cap)

    transport.begin_cycle()
    transport.fail_upload_at = 1  # second upload of the cycle dies
    outcome = client.cycle(now=T0 + timedelta(hours=1))
    assert not outcome.ok and outcome.failed_stage == "upload"
    assert outcome.batches_sent == 1 and outcome.failed_batch_index == 1
    # the acknowledged batch stays acknowledged
    assert store.last_synced == records[99].id
    assert len(transport.held) == 100

    transport.begin_cycle()
    transport.fail_upload_at = None
    outcome = client.cycle(now=T0 + timedelta(hours=2))
    assert outcome.ok and outcome.records_sent == 200
    assert sorted(transport.held) == [r.id for r in records]
    assert len(transport.held) == 300  # no duplicates possible: dict keyed by id
    assert store.pending() == []


def test_checkpoint_reconciles_stale_watermark():
    """Ack loss leaves the server ahead of the local cache; the next
    checkpoint folds the truth back in."""
    store = LocalStore("rpi_1")
    records = _records("rpi_1", 10)
    for record in records:
        store.insert(record)
    transport = ScriptedTransport()
    client = _client(store, transport)
    for record in records:  # server already holds everything (lost ack)
        transport.held[record.id] = record
    outcome = client.cycle(now=T0 + timedelta(hours=1))
    assert outcome.ok and outcome.records_sent == 0
    assert store.last_synced == records[-1].id


def test_errors_ship_once_with_first_batch():
    store = LocalStore("rpi_1")
    for record in _records("rpi_1", 5):
        store.insert(record)
    store.insert_error(
        ErrorLogEntry("rpi_1", T0, ErrorCategory.SENSOR_FAULT, "temperature", "flaky")
    )
    transport = ScriptedTransport()
    client = _client(store, transport)
    assert client.cycle(now=T0 + timedelta(hours=1)).ok
    first = decode_batch(transport.uploads[0])
    assert len(first.errors) == 1
    assert store.pending_errors() == []

    for record in _records("rpi_1", 5, start_s=3600):
        store.insert(record)
    assert client.cycle(now=T0 + timedelta(hours=2)).ok
    second = decode_batch(transport.uploads[1])
    assert second.errors == []  # not re-sent
