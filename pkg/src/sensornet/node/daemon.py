"""The sensing-node daemon: a fixed-interval sampling loop over pluggable
drivers, fault containment, and the periodic sync kick."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Sequence

from ..clock import Clock, SystemClock
from ..records import (
    ErrorCategory,
    ErrorLogEntry,
    NodeDescriptor,
    Record,
    SensorInterface,
    make_record_id,
)
from ..validation import validate_record
from .drivers import SensorDriver, beat_accumulate
from .store import LocalStore

__all__ = ["NodeDaemon", "SamplingConfig", "sample_cycle"]

log = logging.getLogger(__name__)

MIN_RECORD_INTERVAL_S = 2.0  # slowest sensor produces a value every 2 s


@dataclass
class SamplingConfig:
    record_interval_s: float = 60.0
    clock: Clock = field(default_factory=SystemClock)

    def __post_init__(self) -> None:
        if self.record_interval_s < MIN_RECORD_INTERVAL_S:
            raise ValueError(
                f"record interval must be >= {MIN_RECORD_INTERVAL_S} s"
            )


def sample_cycle(
    node_id: str,
    drivers: Sequence[SensorDriver],
    now: datetime,
    window_start: datetime,
) -> tuple[Record, list[ErrorLogEntry]]:
    """Read every active driver once and merge the values into one record.

    Event-feedback sensors contribute the beat count accumulated over
    [window_start, now); everything else contributes its instantaneous
    value. A failing driver yields an absent reading plus a sensor_fault
    log entry -- one bad sensor never takes down the cycle.
    """
    readings: dict[str, float | int | None] = {}
    faults: list[ErrorLogEntry] = []
    for driver in drivers:
        spec = driver.spec
        if not spec.active:
            continue
        try:
            if spec.interface_type is SensorInterface.EVENT_FEEDBACK:
                events = driver.events_between(window_start, now)
                value: float | int = beat_accumulate(events, (window_start, now))
            else:
                value = driver.read(now)
        except Exception as exc:
            readings[spec.name] = None
            faults.append(
                ErrorLogEntry(
                    node_id=node_id,
                    timestamp=now,
                    category=ErrorCategory.SENSOR_FAULT,
                    sensor_name=spec.name,
                    message=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        readings[spec.name] = value
    return Record(make_record_id(node_id, now), readings), faults


class NodeDaemon:
    """Owns one node's sampling schedule and its store.

    ``sample_at``/``sync_at`` do one step each and are what the simulation
    harness drives on virtual time; ``run`` is the real service loop around
    them.
    """

    def __init__(
        self,
        node_id: str,
        drivers: Sequence[SensorDriver],
        store: LocalStore,
        sync_client=None,
        record_interval_s: float = 60.0,
        sync_interval_s: float = 3600.0,
    ):
        if record_interval_s < MIN_RECORD_INTERVAL_S:
            raise ValueError(f"record interval must be >= {MIN_RECORD_INTERVAL_S} s")
        self.node_id = node_id
        self.drivers = list(drivers)
        self.store = store
        self.sync_client = sync_client
        self.record_interval_s = record_interval_s
        self.sync_interval_s = sync_interval_s
        self._window_start: datetime | None = None
        self._descriptor = NodeDescriptor(
            node_id=node_id,
            label=node_id,
            sensors=[d.spec for d in self.drivers],
            record_interval_s=int(record_interval_s),
        )

    def descriptor_sensors(self):
        return [d.spec for d in self.drivers]

    def sample_at(self, now: datetime) -> Record:
        """Run one sampling cycle stamped at ``now`` and store the result."""
        window_start = self._window_start
        if window_start is None:
            window_start = now - timedelta(seconds=self.record_interval_s)
        record, faults = sample_cycle(self.node_id, self.drivers, now, window_start)
        self._window_start = now
        reason = validate_record(record, self._descriptor)
        if reason is not None:
            # Drivers and registry disagree; a config bug, not a data fault.
            raise RuntimeError(f"invalid record from own drivers: {reason}")
        self.store.insert(record)
        for entry in faults:
            self.store.insert_error(entry)
        return record

    def sync_at(self, now: datetime):
        """Run one sync cycle; transport faults are logged, never raised."""
        if self.sync_client is None:
            return None
        return self.sync_client.cycle(now=now)

    def run(
        self,
        clock: Clock | None = None,
        shutdown: threading.Event | None = None,
        max_samples: int | None = None,
    ) -> None:
        """The infinite collection loop.

        Samples every record interval and attempts a sync every sync
        interval, forever; driver faults and transport faults are absorbed
        along the way. Stops only on the shutdown event (or after
        ``max_samples`` cycles, for tests). Ticks are stamped with their
        scheduled time so record timestamps form an exact arithmetic
        sequence regardless of processing jitter.
        """
        clock = clock or SystemClock()
        next_sample = clock.now()
        next_sync = next_sample + timedelta(seconds=self.sync_interval_s)
        samples = 0
        while not (shutdown and shutdown.is_set()):
            target = min(next_sample, next_sync)
            wait = (target - clock.now()).total_seconds()
            if wait > 0:
                clock.sleep(wait)
            if shutdown and shutdown.is_set():
                break
            # Sampling first on ties: collecting data is the node's job even
            # when the server is about to be called.
            if next_sample <= next_sync:
                self.sample_at(next_sample)
                next_sample += timedelta(seconds=self.record_interval_s)
                samples += 1
                if max_samples is not None and samples >= max_samples:
                    return
            else:
                outcome = self.sync_at(next_sync)
                if outcome is not None and not outcome.ok:
                    log.warning(
                        "node %s sync failed at %s: %s",
                        self.node_id,
                        next_sync,
                        outcome.error,
                    )
                next_sync += timedelta(seconds=self.sync_interval_s)
