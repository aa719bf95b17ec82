"""Time sources. Everything that needs "now" takes a Clock so the
simulation harness can drive the whole system on virtual time."""

from __future__ import annotations

import heapq
import time
from datetime import datetime, timezone
from typing import Callable, Protocol

__all__ = ["Clock", "EventScheduler", "SystemClock", "VirtualClock"]


class Clock(Protocol):
    def now(self) -> datetime: ...
    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    """Wall-clock time, second resolution for record stamps."""

    def now(self) -> datetime:
        return datetime.now(timezone.utc).replace(microsecond=0)

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class VirtualClock:
    """A clock that only moves when told to.

    ``sleep`` advances time instantly; idle stretches cost nothing in wall
    time, which is what lets a 24-hour scenario run in seconds. The clock is
    the single source of time in a simulation, so runs are reproducible.
    """

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("virtual clock start must be timezone-aware")
        self._ts = start.astimezone(timezone.utc).timestamp()

    @property
    def now_ts(self) -> float:
        return self._ts

    def now(self) -> datetime:
        return datetime.fromtimestamp(self._ts, tz=timezone.utc)

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            self._ts += seconds

    def advance_to(self, ts: float) -> None:
        if ts < self._ts:
            raise ValueError("virtual clock cannot move backwards")
        self._ts = ts


class EventScheduler:
    """Deterministic discrete-event loop over a VirtualClock.

    Events fire in (time, priority, schedule order) order, so equal-time
    events have a stable, reproducible interleaving.
    """

    def __init__(self, clock: VirtualClock):
        self.clock = clock
        self._heap: list[tuple[float, int, int, Callable[[], None]]] = []
        self._seq = 0

    def schedule(self, when_ts: float, priority: int, fn: Callable[[], None]) -> None:
        if when_ts < self.clock.now_ts:
            raise ValueError("cannot schedule in the past")
        heapq.heappush(self._heap, (when_ts, priority, self._seq, fn))
        self._seq += 1

    def run_until(self, end_ts: float) -> None:
        """Run every event due at or before ``end_ts``, then land on it."""
        while self._heap and self._heap[0][0] <= end_ts:
            when, _prio, _seq, fn = heapq.heappop(self._heap)
            self.clock.advance_to(when)
            fn()
        self.clock.advance_to(max(end_ts, self.clock.now_ts))
