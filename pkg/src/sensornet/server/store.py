"""The central node's state: node registry, per-node record partitions,
and the error-log collection, with idempotent batch ingestion.

Mirrors the one-table-per-node layout of the original central database,
but behind a uniform keyed interface. All mutations are serialized per
partition (registry changes globally), so concurrent uploads from many
nodes are safe.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import replace
from datetime import datetime
from pathlib import Path

from ..clock import Clock, SystemClock
from ..csvcodec import decode_batch
from ..journal import replay_journal
from ..records import (
    ErrorCategory,
    ErrorLogEntry,
    IngestReport,
    NodeDescriptor,
    Record,
    RecordId,
    SensorSpec,
    check_reading_value,
    format_basic_utc,
    parse_basic_utc,
    parse_record_id,
    _IDENT_RE,
)
from ..recordset import RecordSet

__all__ = ["CentralStore", "RegistryError", "UnknownNodeError"]

_NODE_SEQ_RE = re.compile(r"rpi_(\d+)\Z")


class RegistryError(ValueError):
    """Invalid registry operation (duplicate sensor, bad input, ...)."""


class UnknownNodeError(LookupError):
    def __init__(self, node_id: str):
        super().__init__(f"unknown node {node_id!r}")
        self.node_id = node_id


def descriptor_to_json(desc: NodeDescriptor) -> dict:
    return {
        "node_id": desc.node_id,
        "label": desc.label,
        "updated": desc.updated,
        "created_at": format_basic_utc(desc.created_at) if desc.created_at else None,
        "record_interval_s": desc.record_interval_s,
        "sensors": [
            {
                "sensor_id": s.sensor_id,
                "name": s.name,
                "interface_type": int(s.interface_type),
                "value_kind": s.value_kind.value,
                "channel": s.channel,
                "unit": s.unit,
                "active": s.active,
            }
            for s in desc.sensors
        ],
    }


def descriptor_from_json(data: dict) -> NodeDescriptor:
    from ..sync.transport import spec_from_json

    return NodeDescriptor(
        node_id=data["node_id"],
        label=data["label"],
        sensors=[spec_from_json(s) for s in data["sensors"]],
        updated=data["updated"],
        created_at=parse_basic_utc(data["created_at"]) if data["created_at"] else None,
        record_interval_s=data["record_interval_s"],
    )


class CentralStore:
    def __init__(self, storage_dir: str | Path | None = None, clock: Clock | None = None):
        self._clock = clock or SystemClock()
        self._nodes: dict[str, NodeDescriptor] = {}
        self._partitions: dict[str, RecordSet] = {}
        self._errors: dict[str, list[ErrorLogEntry]] = {}
        self._error_keys: set[tuple] = set()
        self._counter = 0
        self._registry_lock = threading.RLock()
        self._partition_locks: dict[str, threading.Lock] = {}
        self._dir = Path(storage_dir) if storage_dir else None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            (self._dir / "partitions").mkdir(exist_ok=True)
            self._load()

    # -- persistence -------------------------------------------------------

    def _load(self) -> None:
        registry = self._dir / "registry.json"
        if registry.exists():
            data = json.loads(registry.read_text(encoding="utf-8"))
            self._counter = data["counter"]
            for entry in data["nodes"]:
                desc = descriptor_from_json(entry)
                self._nodes[desc.node_id] = desc
                self._partitions[desc.node_id] = RecordSet(desc.node_id)
                self._errors[desc.node_id] = []
                self._partition_locks[desc.node_id] = threading.Lock()
        for path in sorted((self._dir / "partitions").glob("*.jsonl")):
            partition = self._partitions.get(path.stem)
            if partition is None:
                continue
            for op in replay_journal(path):
                partition.add(Record(parse_record_id(op["id"]), dict(op["v"])))
        errors_path = self._dir / "errors.jsonl"
        if errors_path.exists():
            for op in replay_journal(errors_path):
                self._remember_error(
                    ErrorLogEntry(
                        node_id=op["node"],
                        timestamp=parse_basic_utc(op["ts"]),
                        category=ErrorCategory(op["cat"]),
                        sensor_name=op.get("sensor"),
                        message=op["msg"],
                    )
                )

    def _save_registry(self) -> None:
        if self._dir is None:
            return
        payload = {
            "counter": self._counter,
            "nodes": [descriptor_to_json(d) for d in self._nodes.values()],
        }
        tmp = self._dir / "registry.json.tmp"
        tmp.write_text(json.dumps(payload, indent=1), encoding="utf-8")
        tmp.replace(self._dir / "registry.json")

    def _append_partition(self, node_id: str, records: list[Record]) -> None:
        if self._dir is None or not records:
            return
        lines = [
            json.dumps({"id": r.id.canonical, "v": r.readings}, separators=(",", ":"))
            for r in records
        ]
        with open(self._dir / "partitions" / f"{node_id}.jsonl", "a", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    def _append_error(self, entry: ErrorLogEntry) -> None:
        if self._dir is None:
            return
        op = {
            "node": entry.node_id,
            "ts": format_basic_utc(entry.timestamp),
            "cat": entry.category.value,
            "sensor": entry.sensor_name,
            "msg": entry.message,
        }
        with open(self._dir / "errors.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(op, separators=(",", ":")) + "\n")

    # -- registry ----------------------------------------------------------

    def register_node(self, label: str, record_interval_s: int = 60) -> NodeDescriptor:
        """Create the next ``rpi_<n>`` node with an empty sensor list and a
        fresh partition."""
        if not label or "\n" in label or "," in label:
            raise RegistryError("label must be non-empty and contain no ',' or newline")
        with self._registry_lock:
            self._counter += 1
            node_id = f"rpi_{self._counter}"
            return self._create_node(node_id, label, record_interval_s)

    def _create_node(
        self, node_id: str, label: str, record_interval_s: int
    ) -> NodeDescriptor:
        desc = NodeDescriptor(
            node_id=node_id,
            label=label,
            sensors=[],
            updated=False,
            created_at=self._clock.now(),
            record_interval_s=record_interval_s,
        )
        self._nodes[node_id] = desc
        self._partitions[node_id] = RecordSet(node_id)
        self._errors[node_id] = []
        self._partition_locks[node_id] = threading.Lock()
        self._save_registry()
        return desc

    def ensure_node(self, node_id: str) -> NodeDescriptor:
        """Look up a node, auto-registering an unknown one with an empty
        sensor list -- bring-up stays one-step for self-announcing nodes."""
        if not _IDENT_RE.match(node_id or ""):
            raise RegistryError(f"malformed node id {node_id!r}")
        with self._registry_lock:
            desc = self._nodes.get(node_id)
            if desc is None:
                match = _NODE_SEQ_RE.match(node_id)
                if match:
                    self._counter = max(self._counter, int(match.group(1)))
                desc = self._create_node(node_id, node_id, 60)
            return desc

    def node(self, node_id: str) -> NodeDescriptor:
        desc = self._nodes.get(node_id)
        if desc is None:
            raise UnknownNodeError(node_id)
        return desc

    def nodes(self) -> list[NodeDescriptor]:
        with self._registry_lock:
            return list(self._nodes.values())

    def add_sensor(self, node_id: str, spec: SensorSpec) -> NodeDescriptor:
        """Attach a sensor; re-adding an inactive name reactivates it in
        place so its history stays linked."""
        with self._registry_lock:
            desc = self.node(node_id)
            existing = desc.find_sensor(spec.name)
            if existing is not None and existing.active:
                raise RegistryError(
                    f"sensor {spec.name!r} already present on {node_id}"
                )
            stamped = replace(spec, sensor_id=f"{node_id}/{spec.name}", active=True)
            if existing is None:
                desc.sensors.append(stamped)
            else:
                desc.sensors[desc.sensors.index(existing)] = stamped
            desc.updated = True
            self._save_registry()
            return desc

    def remove_sensor(self, node_id: str, name: str) -> NodeDescriptor:
        """Deactivate a sensor. Its spec and all recorded data stay; only
        new sampling stops."""
        with self._registry_lock:
            desc = self.node(node_id)
            existing = desc.find_sensor(name)
            if existing is None:
                raise RegistryError(f"no sensor {name!r} on {node_id}")
            if not existing.active:
                raise RegistryError(f"sensor {name!r} on {node_id} is already removed")
            desc.sensors[desc.sensors.index(existing)] = replace(existing, active=False)
            desc.updated = True
            self._save_registry()
            return desc

    def push_sensors(
        self,
        node_id: str,
        specs: list[SensorSpec],
        record_interval_s: int | None = None,
    ) -> NodeDescriptor:
        """Reconcile a node's self-reported sensor list into the registry:
        add unknown names, refresh changed specs, reactivate pushed ones.
        Sensors the node did not mention are left alone (they may have just
        been added through the GUI). Idempotent. The node's record interval
        rides along so the viewing-interval rule tracks reality."""
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise RegistryError("duplicate sensor name in pushed config")
        with self._registry_lock:
            desc = self.ensure_node(node_id)
            changed = False
            dirty = False
            for spec in specs:
                stamped = replace(spec, sensor_id=f"{node_id}/{spec.name}", active=True)
                existing = desc.find_sensor(spec.name)
                if existing is None:
                    desc.sensors.append(stamped)
                    changed = True
                elif existing != stamped:
                    desc.sensors[desc.sensors.index(existing)] = stamped
                    changed = True
            if record_interval_s and desc.record_interval_s != record_interval_s:
                desc.record_interval_s = record_interval_s
                dirty = True
            if changed:
                desc.updated = True  # sensor-list changes only, per contract
            if changed or dirty:
                self._save_registry()
            return desc

    def fetch_config(self, node_id: str) -> NodeDescriptor:
        """Hand the node its configuration and clear the updated flag."""
        with self._registry_lock:
            desc = self.node(node_id)
            if desc.updated:
                desc.updated = False
                self._save_registry()
            return desc

    # -- checkpoint / ingest -------------------------------------------------

    def handle_checkpoint(self, node_id: str) -> RecordId | None:
        """The newest record id stored for this node, or None. Unknown
        nodes are auto-registered and answered with None."""
        desc = self.ensure_node(node_id)
        with self._partition_locks[desc.node_id]:
            return self._partitions[desc.node_id].latest_id()

    def ingest(self, data: bytes) -> IngestReport:
        """Store one uploaded batch file.

        Idempotent on RecordId: replayed rows count as duplicates, not
        errors. Rows that fail validation are rejected individually with a
        reason; an undecodable file rejects as a whole (CodecError) and
        nothing is stored. The error-log section is appended to the central
        error collection (exact duplicates skipped).
        """
        batch = decode_batch(data)  # CodecError propagates: whole-file reject
        desc = self.ensure_node(batch.node_id)
        known = {s.name: s for s in desc.sensors}

        rejected: list[tuple[int, str]] = []
        staged: list[Record] = []
        duplicates = 0
        with self._partition_locks[desc.node_id]:
            partition = self._partitions[desc.node_id]
            for index, record in enumerate(batch.records):
                line = index + 2  # header is line 1
                reason = self._row_reason(record, known)
                if reason is not None:
                    rejected.append((line, reason))
                    continue
                if record.id in partition:
                    duplicates += 1
                    continue
                staged.append(record)
            # All checks done; apply as a unit so a crash mid-request can
            # never leave a partial file in the partition.
            for record in staged:
                partition.add(record)
            self._append_partition(desc.node_id, staged)
        for entry in batch.errors:
            self.log_error(entry)
        return IngestReport(
            inserted=len(staged), duplicates=duplicates, rejected=tuple(rejected)
        )

    @staticmethod
    def _row_reason(record: Record, known: dict[str, SensorSpec]) -> str | None:
        # Columns must be registered for the node, active or not: records
        # sampled under an older configuration still land after a sensor
        # removal. Value kinds are always enforced.
        for name, value in record.readings.items():
            spec = known.get(name)
            if spec is None:
                return f"unknown sensor {name!r} for this node"
            reason = check_reading_value(spec.value_kind, value)
            if reason is not None:
                return f"sensor {name!r}: {reason}"
        return None

    # -- errors --------------------------------------------------------------

    def log_error(self, entry: ErrorLogEntry) -> None:
        self.ensure_node(entry.node_id)
        if self._remember_error(entry):
            self._append_error(entry)

    def _remember_error(self, entry: ErrorLogEntry) -> bool:
        key = (
            entry.node_id,
            entry.timestamp,
            entry.category.value,
            entry.sensor_name,
            entry.message,
        )
        if key in self._error_keys:
            return False
        self._error_keys.add(key)
        self._errors.setdefault(entry.node_id, []).append(entry)
        return True

    def errors_for(
        self,
        node_id: str,
        start: datetime | None = None,
        end: datetime | None = None,
    ) -> list[ErrorLogEntry]:
        entries = self._errors.get(node_id)
        if entries is None:
            raise UnknownNodeError(node_id)
        selected = [
            e
            for e in entries
            if (start is None or e.timestamp >= start)
            and (end is None or e.timestamp < end)
        ]
        selected.sort(key=lambda e: e.timestamp)
        return selected

    # -- reads ----------------------------------------------------------------

    def records_for(
        self,
        node_id: str,
        start: datetime | None = None,
        end: datetime | None = None,
    ) -> list[Record]:
        if node_id not in self._partitions:
            raise UnknownNodeError(node_id)
        with self._partition_locks[node_id]:
            partition = self._partitions[node_id]
            if start is not None and end is not None:
                return partition.in_range(start, end)
            return [
                r
                for r in partition.records()
                if (start is None or r.id.timestamp >= start)
                and (end is None or r.id.timestamp < end)
            ]

    def partition_snapshot(self) -> dict[str, list[Record]]:
        """Every node's records; the consistency oracle's view."""
        out = {}
        with self._registry_lock:
            node_ids = list(self._partitions)
        for node_id in node_ids:
            with self._partition_locks[node_id]:
                out[node_id] = self._partitions[node_id].records()
        return out

    def record_count(self, node_id: str) -> int:
        return len(self._partitions[node_id])
