"""Sensor driver contract and the two shared acquisition primitives:
10-bit ADC quantization for analogue channels and beat counting for
event-feedback sensors."""

from __future__ import annotations

import math
from datetime import datetime
from typing import Iterable, Protocol, runtime_checkable

from ..records import SensorSpec

__all__ = [
    "DriverFault",
    "EventSource",
    "SensorDriver",
    "adc_quantize",
    "beat_accumulate",
]

ADC_MAX = 1023  # 10-bit converter


class DriverFault(Exception):
    """A sensor failed to produce a value this cycle."""


class SensorDriver(Protocol):
    """One reading source. Direct-input and custom drivers return an
    instantaneous value from read(); event-feedback drivers additionally
    expose their edge signals via events_between() and are integrated into
    per-cycle counts by the sampling loop."""

    spec: SensorSpec

    def read(self, now: datetime) -> float | int: ...


@runtime_checkable
class EventSource(Protocol):
    def events_between(self, start: datetime, end: datetime) -> Iterable[datetime]: ...


def adc_quantize(voltage: float, vref: float) -> int:
    """Map a voltage to the converter's 0..1023 scale.

    floor(voltage / vref * 1023), clamped to the rails; monotone in
    voltage.
    """
    if vref <= 0:
        raise ValueError(f"vref must be positive, got {vref}")
    if voltage < 0:
        raise ValueError(f"voltage must be non-negative, got {voltage}")
    raw = math.floor(voltage / vref * ADC_MAX)
    return min(max(raw, 0), ADC_MAX)


def beat_accumulate(
    events: Iterable[datetime], window: tuple[datetime, datetime]
) -> int:
    """Count events with start <= t < end.

    The half-open window makes counts additive over adjacent windows: no
    event is lost or counted twice at a boundary.
    """
    start, end = window
    if not start < end:
        raise ValueError("beat window must satisfy start < end")
    return sum(1 for t in events if start <= t < end)
