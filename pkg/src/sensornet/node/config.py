"""Node configuration file: plain ``key = value`` lines.

    node_id = rpi_1
    server_url = http://127.0.0.1:8080
    record_interval_s = 60
    sync_interval_s = 3600
    journal = ./rpi_1.journal
    sensor = temperature:3:continuous:4:degC
    sensor = sound:2:event_count:17:beats/interval

Sensor lines are ``name:type:kind:channel`` with an optional ``:unit``.
The ``SENSORNET_SERVER_URL`` environment variable overrides server_url.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from ..records import SensorInterface, SensorSpec, ValueKind

__all__ = ["NodeConfig", "load_node_config", "parse_node_config", "parse_kv_lines"]

SERVER_URL_ENV = "SENSORNET_SERVER_URL"


@dataclass
class NodeConfig:
    node_id: str
    server_url: str
    record_interval_s: float = 60.0
    sync_interval_s: float = 3600.0
    journal: Path | None = None
    sensors: list[SensorSpec] = field(default_factory=list)


def parse_kv_lines(text: str) -> list[tuple[str, str]]:
    """Split a plain-text config into (key, value) pairs, keeping repeats."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _parse_sensor_line(value: str) -> SensorSpec:
    parts = value.split(":")
    if len(parts) not in (4, 5):
        raise ValueError(
            f"sensor line {value!r}: want name:type:kind:channel[:unit]"
        )
    name, itype, kind, channel = parts[:4]
    unit = parts[4] if len(parts) == 5 else ""
    return SensorSpec(
        name=name,
        interface_type=SensorInterface(int(itype)),
        value_kind=ValueKind(kind),
        channel=int(channel),
        unit=unit,
    )


def parse_node_config(text: str) -> NodeConfig:
    values: dict[str, str] = {}
    sensors: list[SensorSpec] = []
    for key, value in parse_kv_lines(text):
        if key == "sensor":
            sensors.append(_parse_sensor_line(value))
        elif key in values:
            raise ValueError(f"duplicate key {key!r}")
        else:
            values[key] = value

    known = {"node_id", "server_url", "record_interval_s", "sync_interval_s", "journal"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for required in ("node_id", "server_url"):
        if required not in values:
            raise ValueError(f"missing required key {required!r}")

    names = [s.name for s in sensors]
    if len(set(names)) != len(names):
        raise ValueError("duplicate sensor name in config")

    return NodeConfig(
        node_id=values["node_id"],
        server_url=os.environ.get(SERVER_URL_ENV, values["server_url"]),
        record_interval_s=float(values.get("record_interval_s", 60)),
        sync_interval_s=float(values.get("sync_interval_s", 3600)),
        journal=Path(values["journal"]) if "journal" in values else None,
        sensors=sensors,
    )


def load_node_config(path: str | Path) -> NodeConfig:
    return parse_node_config(Path(path).read_text(encoding="utf-8"))
