"""Client-side transport: how a node talks to the central server.

The HTTP implementation is the production path; the simulation harness
plugs in an in-process implementation behind the same interface.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import httpx

from ..records import (
    IngestReport,
    RecordId,
    SensorInterface,
    SensorSpec,
    ValueKind,
    parse_record_id,
)

__all__ = ["HttpTransport", "Transport", "TransportError", "spec_to_json", "spec_from_json"]


class TransportError(RuntimeError):
    """Any failure to complete a server exchange: unreachable, timeout,
    or a non-success response."""


class Transport(Protocol):
    def request_checkpoint(self, node_id: str) -> RecordId | None: ...

    def upload_batch(self, data: bytes) -> IngestReport: ...

    def push_sensor_specs(
        self, node_id: str, specs: Sequence[SensorSpec], record_interval_s: int
    ) -> None: ...

    def fetch_node_config(self, node_id: str) -> list[SensorSpec]: ...


def spec_to_json(spec: SensorSpec) -> dict:
    return {
        "name": spec.name,
        "interface_type": int(spec.interface_type),
        "value_kind": spec.value_kind.value,
        "channel": spec.channel,
        "unit": spec.unit,
        "active": spec.active,
    }


def spec_from_json(data: dict) -> SensorSpec:
    return SensorSpec(
        name=data["name"],
        interface_type=SensorInterface(data["interface_type"]),
        value_kind=ValueKind(data["value_kind"]),
        channel=data["channel"],
        unit=data.get("unit", ""),
        active=data.get("active", True),
        sensor_id=data.get("sensor_id", ""),
    )


class HttpTransport:
    """Talks to the server's HTTP API; every failure surfaces as
    TransportError so the sync cycle can log it and move on."""

    def __init__(self, base_url: str, timeout_s: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(base_url=self.base_url, timeout=timeout_s)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, **kwargs) -> httpx.Response:
        return self._request("POST", path, **kwargs)

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        try:
            response = self._client.request(method, path, **kwargs)
        except httpx.HTTPError as exc:
            raise TransportError(f"{method} {path}: {exc}") from exc
        if response.status_code >= 400:
            raise TransportError(
                f"{method} {path}: HTTP {response.status_code}: {response.text[:200]}"
            )
        return response

    def request_checkpoint(self, node_id: str) -> RecordId | None:
        response = self._post("/api/checkpoint", content=node_id.encode("utf-8"))
        text = response.text.strip()
        return parse_record_id(text) if text else None

    def upload_batch(self, data: bytes) -> IngestReport:
        response = self._post(
            "/api/ingest", content=data, headers={"content-type": "text/csv"}
        )
        body = response.json()
        return IngestReport(
            inserted=body["inserted"],
            duplicates=body["duplicates"],
            rejected=tuple((r["line"], r["reason"]) for r in body.get("rejected", [])),
        )

    def push_sensor_specs(
        self, node_id: str, specs: Sequence[SensorSpec], record_interval_s: int
    ) -> None:
        self._post(
            f"/api/nodes/{node_id}/sensors",
            json={
                "record_interval_s": record_interval_s,
                "sensors": [spec_to_json(s) for s in specs],
            },
        )

    def fetch_node_config(self, node_id: str) -> list[SensorSpec]:
        response = self._request("GET", f"/api/nodes/{node_id}/config")
        return [spec_from_json(s) for s in response.json()["sensors"]]
