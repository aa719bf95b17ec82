"""Shared domain types: record identity, sensor/node descriptors, error-log
entries, and the batch container exchanged between node and server.

Everything here is a plain value. Nothing touches the network or disk, so
these types can be shared freely between the sampling loop, the sync task,
and the server without coordination.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum, IntEnum
from functools import cached_property
from typing import Optional

__all__ = [
    "BatchFile",
    "ErrorCategory",
    "ErrorLogEntry",
    "IngestReport",
    "NodeDescriptor",
    "Reading",
    "Record",
    "RecordId",
    "SensorInterface",
    "SensorSpec",
    "ValueKind",
    "format_basic_utc",
    "make_record_id",
    "parse_basic_utc",
    "parse_record_id",
    "parse_timestamp",
]

# A single sensor reading; None marks a sensor that faulted at sampling time.
Reading = Optional[float]

_IDENT_RE = re.compile(r"[A-Za-z0-9_.-]+\Z")
_INT_CELL_RE = re.compile(r"-?\d+\Z")


def format_basic_utc(ts: datetime) -> str:
    """Format a UTC instant as ISO-8601 basic, e.g. ``20210801T143000Z``."""
    return (
        f"{ts.year:04d}{ts.month:02d}{ts.day:02d}T"
        f"{ts.hour:02d}{ts.minute:02d}{ts.second:02d}Z"
    )


def parse_basic_utc(text: str) -> datetime:
    """Parse the fixed-width ``YYYYMMDDTHHMMSSZ`` form back to a UTC instant.

    Hand-rolled instead of strptime because batch decoding calls this once
    per row and strptime is an order of magnitude slower.
    """
    if len(text) != 16 or text[8] != "T" or text[15] != "Z":
        raise ValueError(f"malformed timestamp {text!r} (want YYYYMMDDTHHMMSSZ)")
    try:
        return datetime(
            int(text[0:4]),
            int(text[4:6]),
            int(text[6:8]),
            int(text[9:11]),
            int(text[11:13]),
            int(text[13:15]),
            tzinfo=timezone.utc,
        )
    except ValueError as exc:
        raise ValueError(f"malformed timestamp {text!r}: {exc}") from None


def parse_timestamp(text: str) -> datetime:
    """Parse either basic (``20210801T000000Z``) or extended ISO-8601.

    Used for query parameters and config files where humans type the value.
    Naive inputs are taken as UTC; aware inputs are converted.
    """
    text = text.strip()
    try:
        return parse_basic_utc(text)
    except ValueError:
        pass
    try:
        parsed = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise ValueError(f"unrecognized timestamp {text!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


_checked_node_ids: set[str] = set()


def _check_node_id(node_id: str) -> str:
    if node_id in _checked_node_ids:  # hot path: few distinct ids, many calls
        return node_id
    if not node_id:
        raise ValueError("node id must be non-empty")
    if not _IDENT_RE.match(node_id):
        raise ValueError(
            f"invalid node id {node_id!r}: only letters, digits, '_', '.', '-' allowed"
        )
    if len(_checked_node_ids) < 4096:
        _checked_node_ids.add(node_id)
    return node_id


def _as_utc_second(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        raise ValueError("timestamp must be timezone-aware (UTC)")
    if ts.tzinfo is not timezone.utc:
        ts = ts.astimezone(timezone.utc)
    if ts.microsecond != 0:
        raise ValueError("sub-second timestamps are not supported")
    return ts


@dataclass(frozen=True)
class RecordId:
    """Identity of one record: which node produced it, and when.

    The canonical string form is ``<node_id>|<YYYYMMDDTHHMMSSZ>``. IDs from
    the same node order by timestamp; ordering across nodes is meaningless
    and comparison attempts raise.
    """

    node_id: str
    timestamp: datetime

    @cached_property
    def canonical(self) -> str:
        return f"{self.node_id}|{format_basic_utc(self.timestamp)}"

    def __hash__(self) -> int:  # cached; ids key every store
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = self.__dict__["_hash"] = hash((self.node_id, self.timestamp))
        return cached

    def _same_node(self, other: "RecordId") -> "RecordId":
        if self.node_id != other.node_id:
            raise ValueError(
                f"record ids of different nodes are unordered "
                f"({self.node_id!r} vs {other.node_id!r})"
            )
        return other

    def __lt__(self, other: "RecordId") -> bool:
        return self.timestamp < self._same_node(other).timestamp

    def __le__(self, other: "RecordId") -> bool:
        return self.timestamp <= self._same_node(other).timestamp

    def __gt__(self, other: "RecordId") -> bool:
        return self.timestamp > self._same_node(other).timestamp

    def __ge__(self, other: "RecordId") -> bool:
        return self.timestamp >= self._same_node(other).timestamp

    def __str__(self) -> str:
        return self.canonical


def make_record_id(node_id: str, ts: datetime) -> RecordId:
    """Build a RecordId, rejecting node ids that cannot travel in the CSV
    wire format and timestamps below one-second resolution."""
    return RecordId(_check_node_id(node_id), _as_utc_second(ts))


def parse_record_id(text: str) -> RecordId:
    """Parse the canonical ``node|timestamp`` form."""
    node_id, sep, stamp = text.partition("|")
    if not sep:
        raise ValueError(f"malformed record id {text!r}: missing '|'")
    return RecordId(_check_node_id(node_id), parse_basic_utc(stamp))


class SensorInterface(IntEnum):
    """How a sensor is wired to the node."""

    DIRECT_INPUT = 1   # read the pin/channel on demand
    EVENT_FEEDBACK = 2 # pin pulses when an event occurs; readings are counts
    CUSTOM = 3         # sensor-specific acquisition code behind read()


class ValueKind(str, Enum):
    """What a sensor's numbers mean; drives resampling aggregation."""

    CONTINUOUS = "continuous"
    EVENT_COUNT = "event_count"
    BINARY = "binary"


@dataclass(frozen=True)
class SensorSpec:
    """Registry entry for one sensor reading on one node."""

    name: str
    interface_type: SensorInterface
    value_kind: ValueKind
    channel: int
    unit: str = ""
    active: bool = True
    sensor_id: str = ""

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise ValueError(
                f"invalid sensor name {self.name!r}: only letters, digits, "
                "'_', '.', '-' allowed"
            )
        if self.channel < 0:
            raise ValueError(f"sensor {self.name!r}: channel must be >= 0")
        # A direct-input continuous sensor is analogue and goes through the
        # 8-channel converter; anything else uses an ordinary pin number.
        if (
            self.interface_type is SensorInterface.DIRECT_INPUT
            and self.value_kind is ValueKind.CONTINUOUS
            and not 0 <= self.channel <= 7
        ):
            raise ValueError(
                f"sensor {self.name!r}: analogue channel must be in 0..7"
            )


@dataclass
class NodeDescriptor:
    """Registry entry for a sensing node.

    ``updated`` is set whenever the sensor list changes and cleared when the
    node fetches its configuration, so nodes can tell their config is stale
    without diffing it.
    """

    node_id: str
    label: str
    sensors: list[SensorSpec] = field(default_factory=list)
    updated: bool = False
    created_at: datetime | None = None
    record_interval_s: int = 60

    def sensor_names(self) -> list[str]:
        return [s.name for s in self.sensors]

    def active_sensor_names(self) -> list[str]:
        return [s.name for s in self.sensors if s.active]

    def find_sensor(self, name: str) -> SensorSpec | None:
        for spec in self.sensors:
            if spec.name == name:
                return spec
        return None


class ErrorCategory(str, Enum):
    SENSOR_FAULT = "sensor_fault"
    TRANSPORT_FAULT = "transport_fault"


_MESSAGE_SAFE = str.maketrans({",": ";", "\n": " ", "\r": " "})


@dataclass(frozen=True)
class ErrorLogEntry:
    """One logged exception from a node.

    Messages are normalized to the CSV-safe charset at construction so the
    wire format never needs quoting.
    """

    node_id: str
    timestamp: datetime
    category: ErrorCategory
    sensor_name: str | None
    message: str

    def __post_init__(self) -> None:
        if self.category is ErrorCategory.SENSOR_FAULT and not self.sensor_name:
            raise ValueError("sensor_fault entries must name a sensor")
        if self.category is ErrorCategory.TRANSPORT_FAULT and self.sensor_name:
            raise ValueError("transport_fault entries carry no sensor name")
        object.__setattr__(self, "message", self.message.translate(_MESSAGE_SAFE))


@dataclass(frozen=True)
class Record:
    """One timestamped row of merged readings from one node.

    ``readings`` maps sensor name to value in sampling order; a ``None``
    value means the sensor faulted during that cycle.
    """

    id: RecordId
    readings: dict[str, Reading]


def check_reading_value(kind: ValueKind, value: Reading) -> str | None:
    """Return a reason string if ``value`` is out of kind, else None.

    ``None`` (a faulted reading) is acceptable for every kind.
    """
    if value is None:
        return None
    tv = type(value)  # exact types: bool must not pass as int
    if tv is not int and tv is not float:
        return f"value {value!r} is not numeric"
    if kind is ValueKind.BINARY:
        if value != 0 and value != 1:
            return f"binary reading must be 0 or 1, got {value!r}"
    elif kind is ValueKind.EVENT_COUNT:
        if tv is not int or value < 0:
            return f"event count must be a non-negative integer, got {value!r}"
    elif not math.isfinite(value):
        return f"continuous reading must be finite, got {value!r}"
    return None


@dataclass
class BatchFile:
    """The delta file a node uploads in one transfer: records in ascending
    timestamp order plus any error-log entries riding along."""

    node_id: str
    records: list[Record] = field(default_factory=list)
    errors: list[ErrorLogEntry] = field(default_factory=list)

    def check(self) -> None:
        """Raise if the batch violates its ordering/identity invariants."""
        prev: RecordId | None = None
        for record in self.records:
            if record.id.node_id != self.node_id:
                raise ValueError(
                    f"record {record.id.canonical} does not belong to node "
                    f"{self.node_id!r}"
                )
            if prev is not None and record.id <= prev:
                raise ValueError(
                    f"records out of order at {record.id.canonical} "
                    f"(previous {prev.canonical})"
                )
            prev = record.id
        for entry in self.errors:
            if entry.node_id != self.node_id:
                raise ValueError("error entry from foreign node in batch")


@dataclass(frozen=True)
class IngestReport:
    """Server response to one uploaded batch."""

    inserted: int
    duplicates: int
    rejected: tuple[tuple[int, str], ...] = ()

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)
