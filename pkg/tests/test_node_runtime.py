"""Node runtime: ADC quantization, beat counting, the sampling cycle, the
local store, and the daemon loop on a virtual clock."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from sensornet.clock import VirtualClock
from sensornet.node.daemon import NodeDaemon, SamplingConfig, sample_cycle
from sensornet.node.drivers import DriverFault, adc_quantize, beat_accumulate
from sensornet.node.store import LocalStore
from sensornet.records import (
    ErrorCategory,
    ErrorLogEntry,
    SensorInterface,
    ValueKind,
    make_record_id,
)
from sensornet.sim.signals import build_profile_drivers

from conftest import T0, record_at, spec

UTC = timezone.utc


# -- adc_quantize -------------------------------------------------------------


def test_adc_zero_and_full_scale():
    assert adc_quantize(0.0, 3.3) == 0
    assert adc_quantize(3.3, 3.3) == 1023


def test_adc_midpoint():
    # floor(0.5 * 1023) computed by hand
    assert adc_quantize(1.65, 3.3) == 511


def test_adc_rejections():
    with pytest.raises(ValueError):
        adc_quantize(-0.1, 3.3)
    with pytest.raises(ValueError):
        adc_quantize(1.0, 0.0)


@given(st.floats(min_value=0.0, max_value=3.3), st.floats(min_value=0.0, max_value=3.3))
def test_adc_monotone(a, b):
    lo, hi = sorted((a, b))
    assert adc_quantize(lo, 3.3) <= adc_quantize(hi, 3.3)


def test_adc_hits_both_rails_only_at_extremes():
    assert adc_quantize(3.2999, 3.3) < 1023 or adc_quantize(3.2999, 3.3) == 1023 - 0
    assert adc_quantize(0.001, 3.3) >= 0


# -- beat_accumulate ----------------------------------------------------------


def _t(seconds: float) -> datetime:
    return T0 + timedelta(seconds=seconds)


def test_beats_empty():
    assert beat_accumulate([], (_t(0), _t(60))) == 0


def test_beats_boundary_exclusion():
    events = [_t(10), _t(20), _t(70)]
    assert beat_accumulate(events, (_t(0), _t(60))) == 2
    # boundary event belongs to the next window
    assert beat_accumulate([_t(60)], (_t(0), _t(60))) == 0
    assert beat_accumulate([_t(60)], (_t(60), _t(120))) == 1


def test_beats_bad_window():
    with pytest.raises(ValueError):
        beat_accumulate([], (_t(60), _t(60)))


def test_beats_additive_over_adjacent_windows():
    rng = random.Random(99)
    events = [_t(rng.uniform(0, 3600)) for _ in range(500)]
    per_minute = [
        beat_accumulate(events, (_t(m * 60), _t((m + 1) * 60))) for m in range(60)
    ]
    assert sum(per_minute) == len(events)


# -- sample_cycle -------------------------------------------------------------


class StubDriver:
    def __init__(self, sensor_spec, value=None, fail=False):
        self.spec = sensor_spec
        self.value = value
        self.fail = fail

    def read(self, now):
        if self.fail:
            raise DriverFault("sensor unplugged")
        return self.value


class StubEventDriver:
    def __init__(self, sensor_spec, events):
        self.spec = sensor_spec
        self.events = events

    def events_between(self, start, end):
        return [e for e in self.events if start <= e < end]

    def read(self, now):
        raise AssertionError("event drivers are integrated, not read")


def test_sample_cycle_all_healthy():
    drivers = [
        StubDriver(spec("temperature"), 26.5),
        StubDriver(spec("light", ValueKind.BINARY, SensorInterface.DIRECT_INPUT, 17), 0),
    ]
    record, faults = sample_cycle("rpi_1", drivers, _t(60), _t(0))
    assert record.readings == {"temperature": 26.5, "light": 0}
    assert record.id == make_record_id("rpi_1", _t(60))
    assert faults == []


def test_sample_cycle_contains_single_fault():
    drivers = [
        StubDriver(spec("temperature"), fail=True),
        StubDriver(spec("light", ValueKind.BINARY), 0),
    ]
    record, faults = sample_cycle("rpi_1", drivers, _t(60), _t(0))
    assert record.readings == {"temperature": None, "light": 0}
    assert len(faults) == 1
    assert faults[0].category is ErrorCategory.SENSOR_FAULT
    assert faults[0].sensor_name == "temperature"


def test_sample_cycle_counts_event_sensors_per_window():
    sound = StubEventDriver(
        spec("sound", ValueKind.EVENT_COUNT, SensorInterface.EVENT_FEEDBACK, 27),
        [_t(5), _t(30), _t(59), _t(61)],
    )
    record, _ = sample_cycle("rpi_1", [sound], _t(60), _t(0))
    assert record.readings == {"sound": 3}


def test_sample_cycle_prototype_mix_yields_ten_readings():
    drivers = build_profile_drivers("prototype-v1", seed=7)
    record, faults = sample_cycle("rpi_1", drivers, _t(60), _t(0))
    assert len(record.readings) == 10
    assert set(record.readings) == {
        "temperature", "humidity", "light", "sound", "flame",
        "vibration", "motion", "smoke", "co", "lpg",
    }
    assert faults == []


def test_sample_cycle_skips_inactive():
    drivers = [
        StubDriver(spec("temperature"), 20.0),
        StubDriver(spec("sound", ValueKind.EVENT_COUNT, active=False), 5),
    ]
    record, _ = sample_cycle("rpi_1", drivers, _t(60), _t(0))
    assert record.readings == {"temperature": 20.0}


# -- LocalStore ---------------------------------------------------------------


def test_store_insert_idempotent():
    store = LocalStore("rpi_1")
    record = record_at("rpi_1", 0, {"a": 1})
    assert store.insert(record) is True
    assert store.insert(record) is False
    assert len(store) == 1


def test_store_pending_counts_sixty():
    store = LocalStore("rpi_1")
    for i in range(60):
        store.insert(record_at("rpi_1", i * 60, {"a": i}))
    assert len(store.pending()) == 60  # nothing synced yet


def test_pending_after_matches_linear_scan_oracle():
    rng = random.Random(4)
    store = LocalStore("rpi_1")
    records = [record_at("rpi_1", i * 60, {"a": rng.random()}) for i in range(120)]
    for record in records:
        store.insert(record)
    for _ in range(25):
        checkpoint = rng.choice(records).id
        oracle = [r for r in records if r.id.timestamp > checkpoint.timestamp]
        assert store.pending_after(checkpoint) == oracle
    assert store.pending_after(None) == records


def test_pending_after_fully_synced_is_empty():
    store = LocalStore("rpi_1")
    for i in range(10):
        store.insert(record_at("rpi_1", i, {"a": 1}))
    assert store.pending_after(store.latest_id()) == []


def test_pending_after_rejects_foreign_checkpoint():
    store = LocalStore("rpi_1")
    with pytest.raises(ValueError):
        store.pending_after(make_record_id("rpi_2", T0))


def test_mark_synced_is_monotone():
    store = LocalStore("rpi_1")
    a = record_at("rpi_1", 0, {"x": 1})
    b = record_at("rpi_1", 60, {"x": 2})
    store.insert(a), store.insert(b)
    store.mark_synced(b.id)
    store.mark_synced(a.id)  # stale: ignored
    assert store.last_synced == b.id


def test_store_survives_restart(tmp_path):
    path = tmp_path / "rpi_1.journal"
    store = LocalStore("rpi_1", path=path)
    records = [record_at("rpi_1", i * 60, {"a": i, "b": None}) for i in range(30)]
    for record in records:
        store.insert(record)
    store.mark_synced(records[9].id)
    store.insert_error(
        ErrorLogEntry("rpi_1", T0, ErrorCategory.SENSOR_FAULT, "a", "flaky")
    )
    store.close()

    reopened = LocalStore("rpi_1", path=path)
    assert reopened.records() == records
    assert reopened.last_synced == records[9].id
    assert len(reopened.errors()) == 1
    assert len(reopened.pending()) == 20


def test_store_replay_drops_torn_tail(tmp_path):
    path = tmp_path / "rpi_1.journal"
    store = LocalStore("rpi_1", path=path)
    for i in range(5):
        store.insert(record_at("rpi_1", i * 60, {"a": i}))
    store.close()
    # simulate a crash mid-append: truncate the last line
    raw = path.read_bytes()
    path.write_bytes(raw[:-7])
    reopened = LocalStore("rpi_1", path=path)
    assert len(reopened) == 4  # torn record dropped, earlier ones intact
    # and the journal still accepts new writes afterwards
    reopened.insert(record_at("rpi_1", 999 * 60, {"a": 1}))
    reopened.close()
    final = LocalStore("rpi_1", path=path)
    assert len(final) == 5


def test_store_crash_replay_matches_in_memory_journal(tmp_path):
    """Replay oracle: after an arbitrary interleaving of inserts and
    re-inserts, the on-disk state equals the in-memory reference."""
    rng = random.Random(12)
    path = tmp_path / "rpi_1.journal"
    store = LocalStore("rpi_1", path=path)
    reference: dict = {}
    for step in range(200):
        seconds = rng.randint(0, 50) * 60
        record = record_at("rpi_1", seconds, {"a": rng.random()})
        if record.id not in reference:
            reference[record.id] = record
            store.insert(record)
        else:
            store.insert(reference[record.id])  # duplicate: no-op
    store.close()
    replayed = LocalStore("rpi_1", path=path)
    assert {r.id: r for r in replayed.records()} == reference
    assert len(replayed) == len(reference)


# -- daemon loop ---------------------------------------------------------------


def test_sampling_config_floor():
    with pytest.raises(ValueError):
        SamplingConfig(record_interval_s=1.0)
    SamplingConfig(record_interval_s=2.0)


def test_daemon_sixty_ticks_sixty_records():
    store = LocalStore("rpi_1")
    daemon = NodeDaemon(
        "rpi_1",
        [StubDriver(spec("temperature"), 20.0)],
        store,
        sync_client=None,
        record_interval_s=60,
    )
    clock = VirtualClock(T0)
    daemon.run(clock=clock, max_samples=60)
    assert len(store) == 60
    stamps = [r.id.timestamp for r in store.records()]
    deltas = {(b - a).total_seconds() for a, b in zip(stamps, stamps[1:])}
    assert deltas == {60.0}  # exact arithmetic sequence


def test_daemon_fault_never_suppresses_other_sensors():
    store = LocalStore("rpi_1")
    flaky = StubDriver(spec("temperature"), fail=True)
    steady = StubDriver(spec("light", ValueKind.BINARY), 1)
    daemon = NodeDaemon("rpi_1", [flaky, steady], store, record_interval_s=60)
    clock = VirtualClock(T0)
    daemon.run(clock=clock, max_samples=5)
    for record in store.records():
        assert record.readings["temperature"] is None
        assert record.readings["light"] == 1
    assert len([e for e in store.errors() if e.category is ErrorCategory.SENSOR_FAULT]) == 5
