"""CSV exports: record data in the batch wire format, and the error log."""

from __future__ import annotations

from typing import Sequence

from ..csvcodec import ERROR_HEADER, error_row, record_header, record_row
from ..records import ErrorLogEntry, NodeDescriptor, Record

__all__ = ["export_data_csv", "export_errors_csv"]


def export_data_csv(
    node: NodeDescriptor,
    records: Sequence[Record],
    sensors: Sequence[str] | None = None,
) -> bytes:
    """Render records as a batch-format CSV.

    Columns default to the node's full registry order (inactive sensors
    included, so history survives removal). Records that predate a sensor's
    addition pad with empty cells. An empty result is a header-only file.
    """
    if sensors is None:
        columns = node.sensor_names()
    else:
        known = set(node.sensor_names())
        for name in sensors:
            if name not in known:
                raise ValueError(f"unknown sensor {name!r} for node {node.node_id}")
        # keep registry order regardless of how the request ordered them
        wanted = set(sensors)
        columns = [n for n in node.sensor_names() if n in wanted]
    lines = [record_header(columns)]
    lines.extend(record_row(r, columns) for r in records)
    return ("\n".join(lines) + "\n").encode("utf-8")


def export_errors_csv(entries: Sequence[ErrorLogEntry]) -> bytes:
    lines = [ERROR_HEADER]
    lines.extend(error_row(e) for e in entries)
    return ("\n".join(lines) + "\n").encode("utf-8")
