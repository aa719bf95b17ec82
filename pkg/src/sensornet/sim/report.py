"""Scenario report: per-node tallies, upload log, oracle verdict, and the
artifact writers (JSON + CSV + summary text + PNG figures)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

__all__ = ["NodeReport", "SimReport", "UploadEvent", "write_report_artifacts"]


@dataclass
class UploadEvent:
    at_s: float                 # seconds since scenario start
    records: int
    batches: int
    duplicates: int
    failed_stage: str | None = None
    final: bool = False         # part of the quiesce pass

    @property
    def ok(self) -> bool:
        return self.failed_stage is None

    def to_dict(self) -> dict:
        return {
            "at_s": self.at_s,
            "records": self.records,
            "batches": self.batches,
            "duplicates": self.duplicates,
            "failed_stage": self.failed_stage,
            "final": self.final,
        }


@dataclass
class NodeReport:
    node_id: str
    label: str
    profile: str
    generated: int
    synced: int
    pending: int
    sensor_faults: int
    transport_faults: int
    uploads: list[UploadEvent] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "label": self.label,
            "profile": self.profile,
            "generated": self.generated,
            "synced": self.synced,
            "pending": self.pending,
            "sensor_faults": self.sensor_faults,
            "transport_faults": self.transport_faults,
            "uploads": [u.to_dict() for u in self.uploads],
        }


@dataclass
class SimReport:
    seed: int
    node_count: int
    duration_s: float
    started_at: datetime
    time_compression: float
    nodes: list[NodeReport]
    duplicates_absorbed: int
    consistent: bool
    violations: list[str]
    wall_runtime_s: float

    @property
    def records_generated(self) -> int:
        return sum(n.generated for n in self.nodes)

    @property
    def records_synced(self) -> int:
        return sum(n.synced for n in self.nodes)

    @property
    def records_pending(self) -> int:
        return sum(n.pending for n in self.nodes)

    def logical(self) -> dict:
        """Everything except wall-clock timing: two runs of the same config
        must agree on this exactly."""
        return {
            "seed": self.seed,
            "node_count": self.node_count,
            "duration_s": self.duration_s,
            "started_at": self.started_at.isoformat(),
            "nodes": [n.to_dict() for n in self.nodes],
            "duplicates_absorbed": self.duplicates_absorbed,
            "consistent": self.consistent,
            "violations": self.violations,
        }

    def to_dict(self) -> dict:
        payload = self.logical()
        payload["time_compression"] = self.time_compression
        payload["wall_runtime_s"] = self.wall_runtime_s
        payload["records_generated"] = self.records_generated
        payload["records_synced"] = self.records_synced
        payload["records_pending"] = self.records_pending
        return payload

    def summary(self) -> str:
        lines = [
            f"scenario: {self.node_count} node(s), "
            f"{self.duration_s / 3600:g} h simulated from "
            f"{self.started_at.isoformat()}, seed {self.seed}",
            f"records: {self.records_generated} generated, "
            f"{self.records_synced} synced, {self.records_pending} pending",
            f"duplicates absorbed by the server: {self.duplicates_absorbed}",
            f"consistency: {'CONSISTENT' if self.consistent else 'VIOLATIONS'}",
        ]
        for violation in self.violations[:20]:
            lines.append(f"  ! {violation}")
        if len(self.violations) > 20:
            lines.append(f"  ... and {len(self.violations) - 20} more")
        failed = sum(1 for n in self.nodes for u in n.uploads if not u.ok)
        attempted = sum(len(n.uploads) for n in self.nodes)
        lines.append(f"uploads: {attempted} attempted, {failed} failed")
        lines.append(f"wall runtime: {self.wall_runtime_s:.2f} s")
        return "\n".join(lines)


def _uploads_csv(report: SimReport) -> str:
    lines = ["node_id,at_s,records,batches,duplicates,status,final"]
    for node in report.nodes:
        for event in node.uploads:
            status = event.failed_stage or "ok"
            lines.append(
                f"{node.node_id},{event.at_s:g},{event.records},"
                f"{event.batches},{event.duplicates},{status},"
                f"{int(event.final)}"
            )
    return "\n".join(lines) + "\n"


def _render_figures(report: SimReport, outdir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []

    # Upload timeline: records per upload attempt over simulated hours.
    fig, ax = plt.subplots(figsize=(9, 4.5))
    ok_x, ok_y, bad_x, bad_y = [], [], [], []
    for node in report.nodes:
        for event in node.uploads:
            hour = event.at_s / 3600
            if event.ok:
                ok_x.append(hour)
                ok_y.append(event.records)
            else:
                bad_x.append(hour)
                bad_y.append(event.records)
    ax.scatter(ok_x, ok_y, s=14, alpha=0.6, label="delivered")
    if bad_x:
        ax.scatter(bad_x, bad_y, s=18, marker="x", color="crimson", label="failed")
    ax.set_xlabel("simulated time [h]")
    ax.set_ylabel("records in upload")
    ax.set_title(f"upload sizes, {report.node_count} node(s), seed {report.seed}")
    ax.legend(loc="best")
    fig.tight_layout()
    path = outdir / "uploads_timeline.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    # Per-node totals: generated vs synced (plus any pending gap).
    fig, ax = plt.subplots(figsize=(max(6, 0.22 * len(report.nodes) + 2), 4.5))
    names = [n.node_id for n in report.nodes]
    positions = range(len(names))
    ax.bar(positions, [n.generated for n in report.nodes], label="generated", alpha=0.5)
    ax.bar(positions, [n.synced for n in report.nodes], label="synced", alpha=0.9, width=0.5)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(names, rotation=90, fontsize=6)
    ax.set_ylabel("records")
    ax.set_title("per-node generated vs synced")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = outdir / "node_totals.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    return written


def write_report_artifacts(report: SimReport, outdir: str | Path) -> dict[str, Path]:
    """Write report.json, uploads.csv, summary.txt, and the PNG figures
    under ``outdir``; returns the paths keyed by artifact name."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    paths["report"] = outdir / "report.json"
    paths["report"].write_text(
        json.dumps(report.to_dict(), indent=1), encoding="utf-8"
    )
    paths["uploads"] = outdir / "uploads.csv"
    paths["uploads"].write_text(_uploads_csv(report), encoding="utf-8")
    paths["summary"] = outdir / "summary.txt"
    paths["summary"].write_text(report.summary() + "\n", encoding="utf-8")
    for index, figure in enumerate(_render_figures(report, outdir)):
        paths[f"figure_{index}"] = figure
    return paths
