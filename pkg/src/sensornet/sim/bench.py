"""Ingest throughput benchmark: drive the HTTP API with realistic hourly
files at a target request rate and count rejections."""

from __future__ import annotations

import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import httpx

from ..catalog import profile_specs
from ..csvcodec import encode_batch
from ..records import BatchFile, Record, SensorSpec, ValueKind, make_record_id
from ..sync.transport import spec_to_json

__all__ = ["BenchReport", "bench_ingest"]

_BASE = datetime(2021, 8, 1, tzinfo=timezone.utc)


@dataclass
class BenchReport:
    requests: int
    succeeded: int
    failed: int
    inserted: int
    rejected_rows: int
    duplicates: int
    elapsed_s: float
    achieved_rpm: float
    latency_p50_ms: float
    latency_p95_ms: float

    @property
    def clean(self) -> bool:
        return self.failed == 0 and self.rejected_rows == 0

    def summary(self) -> str:
        return (
            f"{self.requests} requests in {self.elapsed_s:.1f} s "
            f"({self.achieved_rpm:.0f}/min), {self.failed} failed, "
            f"{self.rejected_rows} rows rejected, "
            f"latency p50 {self.latency_p50_ms:.1f} ms / "
            f"p95 {self.latency_p95_ms:.1f} ms"
        )


def _reading_for(spec: SensorSpec, tick: int) -> float | int:
    if spec.value_kind is ValueKind.BINARY:
        return tick % 2
    if spec.value_kind is ValueKind.EVENT_COUNT:
        return (tick * 7) % 5
    return 20.0 + (tick % 600) / 10.0


def _hourly_file(node_id: str, specs: list[SensorSpec], hour_index: int, rows: int) -> bytes:
    start = _BASE + timedelta(hours=hour_index)
    records = []
    for row in range(rows):
        ts = start + timedelta(seconds=60 * row)
        tick = hour_index * rows + row
        readings = {s.name: _reading_for(s, tick + i) for i, s in enumerate(specs)}
        records.append(Record(make_record_id(node_id, ts), readings))
    return encode_batch(BatchFile(node_id, records))


def bench_ingest(
    base_url: str,
    rpm: int = 200,
    minutes: float = 2.0,
    node_count: int = 8,
    rows_per_request: int = 60,
    pace: bool = True,
) -> BenchReport:
    """Send ``rpm * minutes`` unique hourly files and report what came back.

    With ``pace`` the requests are spread to hit the target rate exactly
    (a sustained-load test); without it they go back-to-back (a burst
    test). Every file is unique, so any duplicate or rejection counts
    against the server.
    """
    total = int(rpm * minutes)
    interval = 60.0 / rpm
    specs = profile_specs("enviro")

    with httpx.Client(base_url=base_url, timeout=30.0) as client:
        node_ids = []
        for index in range(node_count):
            response = client.post("/api/nodes", json={"label": f"bench/{index}"})
            response.raise_for_status()
            node_id = response.json()["node_id"]
            client.post(
                f"/api/nodes/{node_id}/sensors",
                json=[spec_to_json(s) for s in specs],
            ).raise_for_status()
            node_ids.append(node_id)

        latencies = []
        succeeded = failed = inserted = rejected = duplicates = 0
        started = time.perf_counter()
        for index in range(total):
            if pace:
                target = started + index * interval
                delay = target - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
            payload = _hourly_file(
                node_ids[index % node_count],
                specs,
                index // node_count,
                rows_per_request,
            )
            sent = time.perf_counter()
            try:
                response = client.post(
                    "/api/ingest",
                    content=payload,
                    headers={"content-type": "text/csv"},
                )
            except httpx.HTTPError:
                failed += 1
                continue
            latencies.append((time.perf_counter() - sent) * 1000)
            if response.status_code != 200:
                failed += 1
                continue
            body = response.json()
            succeeded += 1
            inserted += body["inserted"]
            duplicates += body["duplicates"]
            rejected += len(body["rejected"])
        elapsed = time.perf_counter() - started

    latencies.sort()

    def percentile(fraction: float) -> float:
        if not latencies:
            return 0.0
        return latencies[min(len(latencies) - 1, int(fraction * len(latencies)))]

    return BenchReport(
        requests=total,
        succeeded=succeeded,
        failed=failed,
        inserted=inserted,
        rejected_rows=rejected,
        duplicates=duplicates,
        elapsed_s=elapsed,
        achieved_rpm=total / (elapsed / 60) if elapsed > 0 else 0.0,
        latency_p50_ms=percentile(0.50),
        latency_p95_ms=percentile(0.95),
    )
