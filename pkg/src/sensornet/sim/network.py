"""Virtual lossy network: an in-process transport whose availability is
scripted by per-node disconnect windows on the virtual clock.

Loss is modeled at transfer granularity. Two fault modes:

* disconnect window -- the exchange never reaches the server;
* ack loss (seeded, optional) -- the upload is applied server-side but the
  response is lost, which is the hazard idempotent ingestion absorbs.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Sequence

from ..clock import VirtualClock
from ..records import IngestReport, RecordId, SensorSpec
from ..server.store import CentralStore
from ..sync.transport import TransportError
from .signals import stable_seed, unit_noise

__all__ = ["InProcessTransport", "VirtualNetwork"]


class VirtualNetwork:
    def __init__(
        self,
        clock: VirtualClock,
        windows: dict[str, list[tuple[float, float]]] | None = None,
        ack_loss_rate: float = 0.0,
        seed: int = 0,
    ):
        self.clock = clock
        self.force_connected = False
        self._ack_loss_rate = ack_loss_rate
        self._seed = seed
        self._node_seeds: dict[str, int] = {}
        self._starts: dict[str, list[float]] = {}
        self._ends: dict[str, list[float]] = {}
        for node_id, spans in (windows or {}).items():
            spans = sorted(spans)
            self._starts[node_id] = [s for s, _ in spans]
            self._ends[node_id] = [e for _, e in spans]

    def is_blocked(self, node_id: str) -> bool:
        if self.force_connected:
            return False
        starts = self._starts.get(node_id)
        if not starts:
            return False
        now = self.clock.now_ts
        index = bisect_right(starts, now) - 1
        return index >= 0 and now < self._ends[node_id][index]

    def ack_lost(self, node_id: str) -> bool:
        if self.force_connected or self._ack_loss_rate <= 0:
            return False
        seed = self._node_seeds.get(node_id)
        if seed is None:
            seed = self._node_seeds[node_id] = stable_seed(self._seed, node_id, "ack")
        return unit_noise(seed, int(self.clock.now_ts)) < self._ack_loss_rate


class InProcessTransport:
    """The sync client's view of the server inside a simulation."""

    def __init__(self, node_id: str, server: CentralStore, network: VirtualNetwork):
        self.node_id = node_id
        self.server = server
        self.network = network

    def _check_link(self) -> None:
        if self.network.is_blocked(self.node_id):
            raise TransportError("network unreachable (simulated disconnect)")

    def request_checkpoint(self, node_id: str) -> RecordId | None:
        self._check_link()
        return self.server.handle_checkpoint(node_id)

    def upload_batch(self, data: bytes) -> IngestReport:
        self._check_link()
        report = self.server.ingest(data)
        if self.network.ack_lost(self.node_id):
            # applied server-side, response lost: at-least-once territory
            raise TransportError("response lost (simulated ack loss)")
        return report

    def push_sensor_specs(
        self, node_id: str, specs: Sequence[SensorSpec], record_interval_s: int
    ) -> None:
        self._check_link()
        self.server.push_sensors(node_id, list(specs), record_interval_s)

    def fetch_node_config(self, node_id: str) -> list[SensorSpec]:
        self._check_link()
        return list(self.server.fetch_config(node_id).sensors)
