"""HTTP API over the central store.

All request/response bodies are UTF-8; transport security is the
channel's job (terminate TLS in front of the service).
"""

from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import Union

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..catalog import SENSOR_CATALOG
from ..csvcodec import CodecError
from ..records import (
    SensorInterface,
    SensorSpec,
    ValueKind,
    parse_timestamp,
)
from ..sync.client import DEFAULT_MAX_FILE_BYTES
from .export import export_data_csv, export_errors_csv
from .resample import ResampleQuery, query_resampled
from .store import CentralStore, RegistryError, UnknownNodeError, descriptor_to_json

__all__ = ["create_app"]


class NodeCreate(BaseModel):
    label: str
    record_interval_s: int = Field(default=60, ge=2)


class SensorSpecIn(BaseModel):
    name: str
    interface_type: int
    value_kind: str
    channel: int
    unit: str = ""
    active: bool = True

    def to_spec(self) -> SensorSpec:
        try:
            return SensorSpec(
                name=self.name,
                interface_type=SensorInterface(self.interface_type),
                value_kind=ValueKind(self.value_kind),
                channel=self.channel,
                unit=self.unit,
                active=self.active,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None


class SensorPushIn(BaseModel):
    """A node reconciling its own configuration, record interval included."""

    sensors: list[SensorSpecIn]
    record_interval_s: int | None = Field(default=None, ge=2)


def _parse_time_param(name: str, raw: str | None) -> datetime | None:
    if raw is None:
        return None
    try:
        return parse_timestamp(raw)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"{name}: {exc}") from None


def create_app(
    store: CentralStore,
    max_upload_bytes: int = DEFAULT_MAX_FILE_BYTES,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="sensornet central server", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownNodeError)
    async def _unknown_node(_request, exc: UnknownNodeError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(RegistryError)
    async def _registry_error(_request, exc: RegistryError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.post("/api/checkpoint", response_class=PlainTextResponse)
    async def checkpoint(request: Request) -> str:
        node_id = (await request.body()).decode("utf-8").strip()
        if not node_id:
            raise HTTPException(status_code=400, detail="empty node id")
        latest = store.handle_checkpoint(node_id)
        return latest.canonical if latest else ""

    @app.post("/api/ingest")
    async def ingest(request: Request) -> dict:
        data = await request.body()
        if len(data) > max_upload_bytes:
            raise HTTPException(
                status_code=413,
                detail=f"upload of {len(data)} bytes exceeds the "
                f"{max_upload_bytes} byte limit",
            )
        try:
            report = store.ingest(data)
        except CodecError as exc:
            raise HTTPException(
                status_code=400, detail={"error": str(exc), "line": exc.line}
            ) from None
        return {
            "inserted": report.inserted,
            "duplicates": report.duplicates,
            "rejected": [{"line": line, "reason": reason} for line, reason in report.rejected],
        }

    @app.post("/api/nodes")
    def create_node(body: NodeCreate) -> dict:
        desc = store.register_node(body.label, body.record_interval_s)
        return {"node_id": desc.node_id, "label": desc.label}

    @app.get("/api/nodes")
    def list_nodes() -> list[dict]:
        return [descriptor_to_json(d) for d in store.nodes()]

    @app.post("/api/nodes/{node_id}/sensors")
    def add_sensors(
        node_id: str, body: Union[SensorPushIn, SensorSpecIn, list[SensorSpecIn]]
    ) -> dict:
        if isinstance(body, SensorPushIn):
            desc = store.push_sensors(
                node_id, [s.to_spec() for s in body.sensors], body.record_interval_s
            )
        elif isinstance(body, list):
            # bare-list push: same reconcile, no interval update
            desc = store.push_sensors(node_id, [s.to_spec() for s in body])
        else:
            desc = store.add_sensor(node_id, body.to_spec())
        return descriptor_to_json(desc)

    @app.delete("/api/nodes/{node_id}/sensors/{name}")
    def delete_sensor(node_id: str, name: str) -> dict:
        return descriptor_to_json(store.remove_sensor(node_id, name))

    @app.get("/api/nodes/{node_id}/config")
    def node_config(node_id: str) -> dict:
        desc = store.fetch_config(node_id)
        payload = descriptor_to_json(desc)
        payload["updated"] = False  # the fetch itself cleared it
        return payload

    @app.get("/api/data")
    def data(
        node: str,
        sensors: str,
        interval: float,
        request: Request,
    ) -> list[dict]:
        start = _parse_time_param("from", request.query_params.get("from"))
        end = _parse_time_param("to", request.query_params.get("to"))
        if start is None or end is None:
            raise HTTPException(status_code=400, detail="from and to are required")
        desc = store.node(node)
        names = tuple(s for s in sensors.split(",") if s)
        try:
            query = ResampleQuery(
                node_id=node, sensors=names, start=start, end=end, interval_s=interval
            )
            buckets = query_resampled(store.records_for(node, start, end), desc, query)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return [
            {
                "bucket_start": bucket.bucket_start.isoformat().replace("+00:00", "Z"),
                "sensors": {
                    name: {
                        "count": sb.count,
                        "min": sb.minimum,
                        "max": sb.maximum,
                        "mean": sb.mean,
                        "aggregate": sb.aggregate,
                    }
                    for name, sb in bucket.sensors.items()
                },
            }
            for bucket in buckets
        ]

    def _csv_response(payload: bytes, filename: str) -> Response:
        return Response(
            content=payload,
            media_type="text/csv",
            headers={"content-disposition": f'attachment; filename="{filename}"'},
        )

    @app.get("/api/export/data")
    def export_data(node: str, request: Request, sensors: str | None = None) -> Response:
        start = _parse_time_param("from", request.query_params.get("from"))
        end = _parse_time_param("to", request.query_params.get("to"))
        desc = store.node(node)
        names = [s for s in sensors.split(",") if s] if sensors else None
        try:
            payload = export_data_csv(desc, store.records_for(node, start, end), names)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return _csv_response(payload, f"{node}_data.csv")

    @app.get("/api/export/errors")
    def export_errors(node: str, request: Request) -> Response:
        start = _parse_time_param("from", request.query_params.get("from"))
        end = _parse_time_param("to", request.query_params.get("to"))
        store.node(node)
        payload = export_errors_csv(store.errors_for(node, start, end))
        return _csv_response(payload, f"{node}_errors.csv")

    @app.get("/api/sensors/supported")
    def supported_sensors() -> list[dict]:
        return [
            {
                "name": name,
                "interface_type": int(interface),
                "value_kind": kind.value,
                "channel": channel,
                "unit": unit,
                "description": description,
            }
            for name, (interface, kind, channel, unit, description) in SENSOR_CATALOG.items()
        ]

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
