"""Record validation against a node's registered sensor set."""

from __future__ import annotations

from .records import NodeDescriptor, Record, check_reading_value

__all__ = ["validate_record"]


def validate_record(record: Record, node: NodeDescriptor) -> str | None:
    """Check a record against the node it claims to come from.

    Accepts iff the reading keys are exactly the node's active sensor names
    and every value satisfies its sensor's value kind. Returns the first
    violation as a human-readable reason, or None when the record is valid.
    Pure function: same inputs, same verdict.
    """
    if record.id.node_id != node.node_id:
        return f"record belongs to {record.id.node_id!r}, not {node.node_id!r}"
    readings = record.readings
    active = 0
    for spec in node.sensors:
        if not spec.active:
            continue
        active += 1
        name = spec.name
        if name not in readings:
            return f"missing reading for active sensor {name!r}"
        reason = check_reading_value(spec.value_kind, readings[name])
        if reason:
            return f"sensor {name!r}: {reason}"
    if len(readings) != active:
        known = {s.name for s in node.sensors if s.active}
        extra = next(n for n in readings if n not in known)
        return f"unknown sensor {extra!r} for node {node.node_id!r}"
    return None
