"""Multi-node scenario runner on virtual time.

A scenario spins up an in-process central store plus N simulated node
daemons, schedules their sampling and sync ticks on a shared virtual
clock, applies the disconnect schedule, then quiesces (one final connected
sync per node) and runs the consistency oracle.

``time_compression`` caps how fast simulated time may run relative to wall
time. The discrete-event loop never waits out idle gaps at all, so any
cap >= 1 is satisfied by construction and the logical outcome is identical
at every setting: all behavior reads the virtual clock, never the wall.

Scenario files are plain text::

    node_count = 48
    nodes_per_house = 4
    profile = enviro
    record_interval_s = 60
    sync_interval_s = 3600
    duration_s = 86400
    seed = 7
    random_fault_node_hour_rate = 0.2
    # explicit windows too, seconds from scenario start:
    fault = rpi_3,rpi_7 7140 7260
    fault = * 40000 41000
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..clock import EventScheduler, VirtualClock
from ..node.daemon import NodeDaemon
from ..node.store import LocalStore
from ..records import parse_timestamp
from ..server.store import CentralStore
from ..sync.client import DEFAULT_MAX_FILE_BYTES, SyncClient, SyncPolicy
from ..node.config import parse_kv_lines
from ..catalog import PROFILES
from .network import InProcessTransport, VirtualNetwork
from .oracle import consistency_oracle
from .report import NodeReport, SimReport, UploadEvent
from .signals import build_profile_drivers, stable_seed, unit_noise

__all__ = ["Scenario", "ScenarioConfig", "parse_scenario", "load_scenario", "run_scenario"]

DEFAULT_START = datetime(2021, 8, 1, tzinfo=timezone.utc)
_ROOMS = ("living", "kitchen", "bedroom", "bath")


@dataclass
class ScenarioConfig:
    node_count: int = 1
    profiles: tuple[str, ...] = ("enviro",)
    nodes_per_house: int = 4
    record_interval_s: float = 60.0
    sync_interval_s: float = 3600.0
    duration_s: float = 3600.0
    time_compression: float = 1000.0
    seed: int = 0
    start: datetime = DEFAULT_START
    # (node ids or "*", start offset s, end offset s), half-open windows
    fault_windows: list[tuple[tuple[str, ...] | str, float, float]] = field(
        default_factory=list
    )
    random_fault_node_hour_rate: float = 0.0
    final_hour_connected: bool = True
    sensor_fault_rate: float = 0.0
    ack_loss_rate: float = 0.0
    max_file_bytes: int = DEFAULT_MAX_FILE_BYTES

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        for profile in self.profiles:
            if profile not in PROFILES:
                raise ValueError(f"unknown profile {profile!r}")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        for _nodes, lo, hi in self.fault_windows:
            if not 0 <= lo < hi <= self.duration_s:
                raise ValueError(
                    f"fault window [{lo}, {hi}) outside scenario duration"
                )
        if not 0 <= self.random_fault_node_hour_rate <= 1:
            raise ValueError("random_fault_node_hour_rate must be in [0, 1]")


_BOOLEANS = {"true": True, "false": False, "1": True, "0": False}


def parse_scenario(text: str) -> ScenarioConfig:
    values: dict[str, str] = {}
    faults: list[tuple[tuple[str, ...] | str, float, float]] = []
    for key, value in parse_kv_lines(text):
        if key == "fault":
            parts = value.split()
            if len(parts) != 3:
                raise ValueError(f"fault line {value!r}: want '<nodes> <t0> <t1>'")
            nodes = "*" if parts[0] == "*" else tuple(parts[0].split(","))
            faults.append((nodes, float(parts[1]), float(parts[2])))
        elif key in values:
            raise ValueError(f"duplicate key {key!r}")
        else:
            values[key] = value

    config = ScenarioConfig(duration_s=float(values.pop("duration_s", 3600)))
    config.fault_windows = faults
    for key, raw in values.items():
        if key == "node_count":
            config.node_count = int(raw)
        elif key == "profile":
            config.profiles = tuple(raw.split(","))
        elif key == "nodes_per_house":
            config.nodes_per_house = int(raw)
        elif key == "record_interval_s":
            config.record_interval_s = float(raw)
        elif key == "sync_interval_s":
            config.sync_interval_s = float(raw)
        elif key == "time_compression":
            config.time_compression = float(raw)
        elif key == "seed":
            config.seed = int(raw)
        elif key == "start":
            config.start = parse_timestamp(raw)
        elif key == "random_fault_node_hour_rate":
            config.random_fault_node_hour_rate = float(raw)
        elif key == "final_hour_connected":
            config.final_hour_connected = _BOOLEANS[raw.lower()]
        elif key == "sensor_fault_rate":
            config.sensor_fault_rate = float(raw)
        elif key == "ack_loss_rate":
            config.ack_loss_rate = float(raw)
        elif key == "max_file_bytes":
            config.max_file_bytes = int(raw)
        else:
            raise ValueError(f"unknown scenario key {key!r}")
    config.__post_init__()
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def random_fault_windows(
    node_ids: list[str],
    duration_s: float,
    rate: float,
    seed: int,
    spare_final_hour: bool = True,
) -> dict[str, list[tuple[float, float]]]:
    """Seeded hour-granular disconnects: each node-hour goes dark with
    probability ``rate``. The final hour can be spared so a scenario always
    ends reachable."""
    hours = int(duration_s // 3600)
    last = hours - 1 if spare_final_hour else hours
    windows: dict[str, list[tuple[float, float]]] = {}
    for node_id in node_ids:
        node_seed = stable_seed(seed, node_id, "disconnect")
        spans = [
            (h * 3600.0, (h + 1) * 3600.0)
            for h in range(last)
            if unit_noise(node_seed, h) < rate
        ]
        if spans:
            windows[node_id] = spans
    return windows


class _SimNode:
    def __init__(self, node_id: str, label: str, profile: str, daemon: NodeDaemon):
        self.node_id = node_id
        self.label = label
        self.profile = profile
        self.daemon = daemon
        self.uploads: list[UploadEvent] = []


class Scenario:
    """One configured run; ``run()`` executes it and returns the report.
    The server store and per-node daemons stay inspectable afterwards."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.clock = VirtualClock(config.start)
        self.server = CentralStore(clock=self.clock)
        self.nodes: list[_SimNode] = []

        policy = SyncPolicy(
            sync_interval_s=config.sync_interval_s,
            max_file_bytes=config.max_file_bytes,
        )
        windows: dict[str, list[tuple[float, float]]] = {}
        start_ts = self.clock.now_ts

        node_ids = []
        for index in range(config.node_count):
            house = index // config.nodes_per_house + 1
            room = _ROOMS[index % len(_ROOMS)]
            desc = self.server.register_node(
                f"house{house}/{room}", int(config.record_interval_s)
            )
            node_ids.append(desc.node_id)

        for nodes, lo, hi in config.fault_windows:
            targets = node_ids if nodes == "*" else nodes
            for node_id in targets:
                if node_id not in node_ids:
                    raise ValueError(f"fault window names unknown node {node_id!r}")
                windows.setdefault(node_id, []).append((start_ts + lo, start_ts + hi))
        if config.random_fault_node_hour_rate > 0:
            generated = random_fault_windows(
                node_ids,
                config.duration_s,
                config.random_fault_node_hour_rate,
                config.seed,
                config.final_hour_connected,
            )
            for node_id, spans in generated.items():
                windows.setdefault(node_id, []).extend(
                    (start_ts + lo, start_ts + hi) for lo, hi in spans
                )

        self.network = VirtualNetwork(
            self.clock,
            windows=windows,
            ack_loss_rate=config.ack_loss_rate,
            seed=config.seed,
        )

        for index, node_id in enumerate(node_ids):
            profile = config.profiles[index % len(config.profiles)]
            drivers = build_profile_drivers(
                profile, stable_seed(config.seed, index), config.sensor_fault_rate
            )
            store = LocalStore(node_id)
            transport = InProcessTransport(node_id, self.server, self.network)
            client = SyncClient(
                node_id,
                store,
                policy,
                transport,
                sensor_specs=[d.spec for d in drivers],
                record_interval_s=int(config.record_interval_s),
            )
            daemon = NodeDaemon(
                node_id,
                drivers,
                store,
                client,
                record_interval_s=config.record_interval_s,
                sync_interval_s=config.sync_interval_s,
            )
            desc = self.server.node(node_id)
            self.nodes.append(_SimNode(node_id, desc.label, profile, daemon))

    # -- execution ---------------------------------------------------------

    def _record_sync(self, node: _SimNode, final: bool = False) -> None:
        now = self.clock.now()
        outcome = node.daemon.sync_at(now)
        node.uploads.append(
            UploadEvent(
                at_s=self.clock.now_ts - self.config.start.timestamp(),
                records=outcome.records_sent,
                batches=outcome.batches_sent,
                duplicates=outcome.duplicates,
                failed_stage=outcome.failed_stage,
                final=final,
            )
        )

    def run(self, quiesce: bool = True) -> SimReport:
        """Execute the scenario. ``quiesce=False`` skips the final connected
        sync pass (the oracle's precondition), leaving whatever the fault
        schedule left behind -- useful for mid-run assertions."""
        config = self.config
        begun = time.perf_counter()
        scheduler = EventScheduler(self.clock)
        start_ts = self.clock.now_ts
        end_ts = start_ts + config.duration_s

        def make_sampler(node: _SimNode):
            def fire() -> None:
                node.daemon.sample_at(self.clock.now())
                after = self.clock.now_ts + config.record_interval_s
                if after <= end_ts:
                    scheduler.schedule(after, 0, fire)

            return fire

        def make_syncer(node: _SimNode):
            def fire() -> None:
                self._record_sync(node)
                after = self.clock.now_ts + config.sync_interval_s
                if after <= end_ts:
                    scheduler.schedule(after, 1, fire)

            return fire

        for node in self.nodes:
            scheduler.schedule(start_ts, 0, make_sampler(node))
            scheduler.schedule(start_ts + config.sync_interval_s, 1, make_syncer(node))

        scheduler.run_until(end_ts)

        # Quiesce: every node gets one final connected sync so the oracle's
        # precondition holds regardless of the fault schedule.
        if quiesce:
            self.network.force_connected = True
            for node in self.nodes:
                if node.daemon.store.pending():
                    self._record_sync(node, final=True)

        verdict = consistency_oracle(
            {node.node_id: node.daemon.store.records() for node in self.nodes},
            self.server.partition_snapshot(),
        )

        node_reports = []
        for node in self.nodes:
            store = node.daemon.store
            generated = len(store)
            pending = len(store.pending())
            errors = store.errors()
            node_reports.append(
                NodeReport(
                    node_id=node.node_id,
                    label=node.label,
                    profile=node.profile,
                    generated=generated,
                    synced=generated - pending,
                    pending=pending,
                    sensor_faults=sum(
                        1 for e in errors if e.category.value == "sensor_fault"
                    ),
                    transport_faults=sum(
                        1 for e in errors if e.category.value == "transport_fault"
                    ),
                    uploads=node.uploads,
                )
            )

        return SimReport(
            seed=config.seed,
            node_count=config.node_count,
            duration_s=config.duration_s,
            started_at=config.start,
            time_compression=config.time_compression,
            nodes=node_reports,
            duplicates_absorbed=sum(
                event.duplicates for node in self.nodes for event in node.uploads
            ),
            consistent=verdict.consistent,
            violations=list(verdict.violations),
            wall_runtime_s=time.perf_counter() - begun,
        )


def run_scenario(config: ScenarioConfig) -> SimReport:
    return Scenario(config).run()
