"""Bit-exact CSV codec for batch files.

Wire layout:

    id,node_id,timestamp,<sensor names in node registry order>
    rpi_1|20210801T143000Z,rpi_1,20210801T143000Z,26.5,0,...
    ...
    <blank line, only when error entries ride along>
    node_id,timestamp,category,sensor,message
    rpi_1,20210801T143100Z,sensor_fault,temperature,read timed out

Numeric cells use ``.`` as the decimal separator, no grouping; a faulted
reading is an empty cell. No quoting is needed anywhere because every field
charset excludes ``,`` and newlines (enforced at registration and at
error-entry construction). Lines end with ``\\n``; the file is UTF-8.

``decode_batch(encode_batch(b)) == b`` for every valid batch, including
records with faulted readings; integer cells decode to int and float cells
to float so re-encoding is byte-identical.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .records import (
    BatchFile,
    ErrorCategory,
    ErrorLogEntry,
    Reading,
    Record,
    RecordId,
    format_basic_utc,
    parse_basic_utc,
    parse_record_id,
)

__all__ = [
    "CodecError",
    "decode_batch",
    "encode_batch",
    "encode_error_log",
    "record_header",
    "record_row",
    "error_row",
    "ERROR_HEADER",
]

FIXED_COLUMNS = ("id", "node_id", "timestamp")
ERROR_HEADER = "node_id,timestamp,category,sensor,message"


class CodecError(ValueError):
    """Malformed batch file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _format_cell(value: Reading) -> str:
    # type() not isinstance(): bool must not slip through as int
    kind = type(value)
    if kind is float:
        return repr(value)
    if kind is int:
        return str(value)
    if value is None:
        return ""
    raise ValueError(f"reading {value!r} is not encodable; use int/float/None")


def _parse_cell(cell: str) -> Reading:
    if cell == "":
        return None
    if (cell[0] != "-" and cell.isdigit()) or (cell[0] == "-" and cell[1:].isdigit()):
        return int(cell)
    return float(cell)


def record_header(columns: Sequence[str]) -> str:
    return ",".join(FIXED_COLUMNS) + ("," + ",".join(columns) if columns else "")


def record_row(record: Record, columns: Sequence[str]) -> str:
    """Render one record as a CSV line. Missing keys pad as empty cells so
    exports can span historical column changes."""
    rid = record.id
    canonical = rid.canonical
    # the canonical id is "<node>|<stamp>"; reuse its parts for the fixed columns
    stamp = canonical[len(rid.node_id) + 1:]
    prefix = f"{canonical},{rid.node_id},{stamp}"
    if not columns:
        return prefix
    get = record.readings.get
    return prefix + "," + ",".join([_format_cell(get(name)) for name in columns])


def error_row(entry: ErrorLogEntry) -> str:
    return ",".join(
        (
            entry.node_id,
            format_basic_utc(entry.timestamp),
            entry.category.value,
            entry.sensor_name or "",
            entry.message,
        )
    )


def encode_error_log(entries: Iterable[ErrorLogEntry]) -> str:
    return "\n".join([ERROR_HEADER, *map(error_row, entries)]) + "\n"


def encode_batch(batch: BatchFile, columns: Sequence[str] | None = None) -> bytes:
    """Serialize a batch. ``columns`` fixes the sensor column order; when
    omitted it is taken from the first record's reading order (which is the
    node's registry order at sampling time)."""
    if columns is None:
        columns = list(batch.records[0].readings) if batch.records else []
    column_set = frozenset(columns)
    if len(column_set) != len(columns):
        raise ValueError("duplicate sensor column")

    lines = [record_header(columns)]
    prev = None
    for record in batch.records:
        if record.id.node_id != batch.node_id:
            raise ValueError(
                f"record {record.id.canonical} does not belong to node "
                f"{batch.node_id!r}"
            )
        if prev is not None and record.id <= prev:
            raise ValueError(f"records out of order at {record.id.canonical}")
        prev = record.id
        if frozenset(record.readings) != column_set:
            raise ValueError(
                f"record {record.id.canonical} has readings "
                f"{sorted(record.readings)} but batch columns are "
                f"{sorted(columns)}"
            )
        lines.append(record_row(record, columns))
    if batch.errors:
        for entry in batch.errors:
            if entry.node_id != batch.node_id:
                raise ValueError("error entry from foreign node in batch")
        lines.append("")
        lines.append(ERROR_HEADER)
        lines.extend(error_row(e) for e in batch.errors)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _decode_error_line(line: str, lineno: int, node_id: str) -> ErrorLogEntry:
    parts = line.split(",")
    if len(parts) != 5:
        raise CodecError(
            f"error row has {len(parts)} columns, expected 5", lineno
        )
    entry_node, stamp, category, sensor, message = parts
    if entry_node != node_id:
        raise CodecError(
            f"error row for node {entry_node!r} in batch of {node_id!r}", lineno
        )
    try:
        ts = parse_basic_utc(stamp)
        cat = ErrorCategory(category)
    except ValueError as exc:
        raise CodecError(str(exc), lineno) from None
    try:
        return ErrorLogEntry(entry_node, ts, cat, sensor or None, message)
    except ValueError as exc:
        raise CodecError(str(exc), lineno) from None


def decode_batch(data: bytes, node_id: str | None = None) -> BatchFile:
    """Parse a batch file, checking structure as it goes.

    The node identity is read off the rows; a file with no data rows carries
    none, so decoding one requires the ``node_id`` argument. Every malformed
    construct is reported with its 1-based line number.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CodecError(f"not valid UTF-8: {exc}") from None
    if "\r" in text:
        raise CodecError("carriage returns are not part of the format")

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CodecError("empty file", 1)

    header = lines[0].split(",")
    if tuple(header[:3]) != FIXED_COLUMNS:
        raise CodecError(
            f"malformed header {lines[0]!r}: must start with "
            f"{','.join(FIXED_COLUMNS)}",
            1,
        )
    columns = header[3:]
    if len(set(columns)) != len(columns) or any(c in FIXED_COLUMNS for c in columns):
        raise CodecError("malformed header: duplicate column name", 1)
    if any(c == "" for c in columns):
        raise CodecError("malformed header: empty column name", 1)
    width = len(header)

    records: list[Record] = []
    errors: list[ErrorLogEntry] = []
    prev_ts = None
    in_errors = False
    error_header_seen = False

    for idx, line in enumerate(lines[1:], start=2):
        if not in_errors:
            if line == "":
                in_errors = True
                continue
            parts = line.split(",")
            if len(parts) != width:
                raise CodecError(
                    f"row has {len(parts)} columns, expected {width}", idx
                )
            id_cell, node_cell, stamp_cell = parts[0], parts[1], parts[2]
            if node_id is None:
                try:
                    parse_record_id(id_cell)  # full validation once per file
                except ValueError as exc:
                    raise CodecError(str(exc), idx) from None
                node_id = node_cell
            elif node_cell != node_id:
                raise CodecError(
                    f"row for node {node_cell!r} in batch of {node_id!r}", idx
                )
            if len(id_cell) != len(node_cell) + 1 + len(stamp_cell) or not (
                id_cell.startswith(node_cell)
                and id_cell[len(node_cell)] == "|"
                and id_cell.endswith(stamp_cell)
            ):
                raise CodecError(
                    f"id {id_cell!r} contradicts node/timestamp columns", idx
                )
            try:
                ts = parse_basic_utc(stamp_cell)
            except ValueError as exc:
                raise CodecError(str(exc), idx) from None
            if prev_ts is not None:
                if ts == prev_ts:
                    raise CodecError(f"duplicate record id {id_cell!r}", idx)
                if ts < prev_ts:
                    raise CodecError(
                        f"timestamps not ascending at {id_cell!r}", idx
                    )
            prev_ts = ts
            rid = RecordId(node_cell, ts)
            rid.__dict__["canonical"] = id_cell  # pre-seed the cached form
            try:
                readings = {
                    name: _parse_cell(cell)
                    for name, cell in zip(columns, parts[3:])
                }
            except ValueError as exc:
                raise CodecError(f"bad numeric cell: {exc}", idx) from None
            records.append(Record(rid, readings))
        elif not error_header_seen:
            if line != ERROR_HEADER:
                raise CodecError(
                    f"expected error-log header {ERROR_HEADER!r}", idx
                )
            error_header_seen = True
        else:
            if line == "":
                raise CodecError("unexpected blank line in error section", idx)
            if node_id is None:
                raise CodecError("error rows without any data rows", idx)
            errors.append(_decode_error_line(line, idx, node_id))

    if in_errors and not error_header_seen:
        raise CodecError("trailing blank line without error section", len(lines))
    if node_id is None:
        raise CodecError(
            "file has no data rows; pass node_id to decode an empty batch"
        )
    return BatchFile(node_id=node_id, records=records, errors=errors)
