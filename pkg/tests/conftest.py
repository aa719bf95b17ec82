"""Shared fixtures and the acceptance-criteria reporter.

Tests marked ``@pytest.mark.acceptance("<criterion>")`` get one PASS/FAIL
line each in the terminal summary, so the acceptance gate is readable at
a glance.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from sensornet.records import (
    NodeDescriptor,
    Record,
    SensorInterface,
    SensorSpec,
    ValueKind,
    make_record_id,
)

T0 = datetime(2021, 8, 1, 0, 0, 0, tzinfo=timezone.utc)

_RESULTS: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion covered by this test"
    )


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    marker_name = getattr(report, "_acceptance_name", None)
    if marker_name:
        _RESULTS[marker_name] = report.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and marker.args:
        report._acceptance_name = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_RESULTS):
        verdict = "PASS" if _RESULTS[name] else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {name}")


# -- shared builders ---------------------------------------------------------


def spec(
    name: str,
    kind: ValueKind = ValueKind.CONTINUOUS,
    interface: SensorInterface = SensorInterface.CUSTOM,
    channel: int = 4,
    active: bool = True,
) -> SensorSpec:
    return SensorSpec(
        name=name, interface_type=interface, value_kind=kind, channel=channel, active=active
    )


def node_with(node_id: str, *specs: SensorSpec, record_interval_s: int = 60) -> NodeDescriptor:
    return NodeDescriptor(
        node_id=node_id,
        label=node_id,
        sensors=list(specs),
        record_interval_s=record_interval_s,
    )


def record_at(node_id: str, seconds: int, readings: dict) -> Record:
    return Record(make_record_id(node_id, T0 + timedelta(seconds=seconds)), dict(readings))


@pytest.fixture
def two_sensor_node() -> NodeDescriptor:
    return node_with(
        "rpi_1",
        spec("temperature", ValueKind.CONTINUOUS),
        spec("humidity", ValueKind.CONTINUOUS),
    )
