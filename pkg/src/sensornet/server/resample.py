"""Interval resampling for queries: tile a time range with fixed buckets
and aggregate each sensor's readings per bucket.

The viewing interval can equal or exceed the node's record interval, never
undercut it: data recorded per minute cannot be viewed per 30 seconds.
Per bucket and sensor the stats are count/min/max/mean over the readings
present, plus an ``aggregate`` chosen by the sensor's value kind:

    continuous  -> mean   (average level over the bucket)
    event_count -> sum    (total events in the bucket)
    binary      -> max    (did the condition occur at all)

Empty buckets stay in the tiling but carry no per-sensor stats; values are
never fabricated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Sequence

from ..records import NodeDescriptor, Record, ValueKind

__all__ = ["BucketStats", "ResampleQuery", "SensorBucket", "query_resampled"]


@dataclass(frozen=True)
class ResampleQuery:
    node_id: str
    sensors: tuple[str, ...]
    start: datetime
    end: datetime
    interval_s: float

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError("query range must satisfy start < end")
        if self.interval_s <= 0:
            raise ValueError("bucket interval must be positive")
        if not self.sensors:
            raise ValueError("query must name at least one sensor")


@dataclass(frozen=True)
class SensorBucket:
    count: int
    minimum: float
    maximum: float
    mean: float
    aggregate: float


@dataclass
class BucketStats:
    bucket_start: datetime
    sensors: dict[str, SensorBucket] = field(default_factory=dict)


def query_resampled(
    records: Sequence[Record], node: NodeDescriptor, query: ResampleQuery
) -> list[BucketStats]:
    """Aggregate ``records`` (one node, any order) into the query's bucket
    tiling. Raises ValueError for an interval below the node's record
    interval or an unregistered sensor name."""
    if query.interval_s < node.record_interval_s:
        raise ValueError(
            f"viewing interval {query.interval_s:g} s is below the node's "
            f"record interval {node.record_interval_s:g} s; data can be "
            "viewed at the recorded interval or coarser, not finer"
        )
    known = {s.name: s for s in node.sensors}
    kinds = {}
    for name in query.sensors:
        spec = known.get(name)
        if spec is None:
            raise ValueError(f"unknown sensor {name!r} for node {node.node_id}")
        kinds[name] = spec.value_kind

    start_ts = query.start.timestamp()
    span = query.end.timestamp() - start_ts
    bucket_count = math.ceil(span / query.interval_s)

    # acc[bucket][sensor] = [count, total, min, max]
    acc: list[dict[str, list] | None] = [None] * bucket_count
    wanted = set(query.sensors)
    for record in records:
        ts = record.id.timestamp.timestamp()
        if not start_ts <= ts < start_ts + span:
            continue
        index = int((ts - start_ts) // query.interval_s)
        slot = acc[index]
        if slot is None:
            slot = acc[index] = {}
        for name in wanted:
            value = record.readings.get(name)
            if value is None:
                continue
            cell = slot.get(name)
            if cell is None:
                slot[name] = [1, value, value, value]
            else:
                cell[0] += 1
                cell[1] += value
                if value < cell[2]:
                    cell[2] = value
                if value > cell[3]:
                    cell[3] = value

    interval = timedelta(seconds=query.interval_s)
    out = []
    for index in range(bucket_count):
        stats = BucketStats(bucket_start=query.start + index * interval)
        slot = acc[index]
        if slot:
            for name in query.sensors:
                cell = slot.get(name)
                if cell is None:
                    continue
                count, total, low, high = cell
                mean = total / count
                kind = kinds[name]
                if kind is ValueKind.EVENT_COUNT:
                    aggregate: float = total
                elif kind is ValueKind.BINARY:
                    aggregate = high
                else:
                    aggregate = mean
                stats.sensors[name] = SensorBucket(count, low, high, mean, aggregate)
        out.append(stats)
    return out
