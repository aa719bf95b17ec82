"""Command line entry points: run scenarios, benchmark ingest, serve the
central API, or run a sensing-node daemon."""

from __future__ import annotations

import sys
from pathlib import Path

import click

__all__ = ["main"]


@click.group()
def main() -> None:
    """Indoor-environment sensing stack: simulator, server, and node."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="override the scenario seed")
@click.option(
    "--report",
    "report_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="write report.json, uploads.csv, summary.txt and figures here",
)
def simulate(scenario_path: str, seed: int | None, report_dir: str | None) -> None:
    """Run a multi-node scenario file and print the outcome."""
    from .sim.report import write_report_artifacts
    from .sim.scenario import load_scenario, run_scenario

    config = load_scenario(scenario_path)
    if seed is not None:
        config.seed = seed
    report = run_scenario(config)
    click.echo(report.summary())
    if report_dir:
        paths = write_report_artifacts(report, report_dir)
        click.echo("artifacts:")
        for name, path in paths.items():
            click.echo(f"  {name}: {path}")
    if not report.consistent:
        sys.exit(2)


@main.command("bench-ingest")
@click.option("--rpm", type=int, default=200, show_default=True)
@click.option("--minutes", type=float, default=2.0, show_default=True)
@click.option("--url", default=None, help="target server; default spins up a local one")
@click.option("--nodes", type=int, default=8, show_default=True)
@click.option("--pace/--no-pace", default=True, show_default=True,
              help="spread requests to the target rate vs. send back-to-back")
def bench_ingest_command(
    rpm: int, minutes: float, url: str | None, nodes: int, pace: bool
) -> None:
    """Drive the ingest endpoint at a target request rate."""
    from .sim.bench import bench_ingest

    if url is None:
        from .server.app import create_app
        from .server.local import LocalServer
        from .server.store import CentralStore

        with LocalServer(create_app(CentralStore())) as server:
            click.echo(f"benchmarking local server at {server.base_url}")
            report = bench_ingest(server.base_url, rpm, minutes, nodes, pace=pace)
    else:
        report = bench_ingest(url, rpm, minutes, nodes, pace=pace)
    click.echo(report.summary())
    if not report.clean:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None, help="override listen host")
@click.option("--port", type=int, default=None, help="override listen port")
@click.option("--storage", type=click.Path(file_okay=False), default=None)
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="serve a dashboard bundle at /")
def serve(
    config_path: str | None,
    host: str | None,
    port: int | None,
    storage: str | None,
    static_dir: str | None,
) -> None:
    """Run the central server."""
    import uvicorn

    from .server.app import create_app
    from .server.config import ServerConfig, load_server_config
    from .server.store import CentralStore

    config = load_server_config(config_path) if config_path else ServerConfig()
    if host:
        config.host = host
    if port:
        config.port = port
    if storage:
        config.storage_dir = Path(storage)
    store = CentralStore(storage_dir=config.storage_dir)
    app = create_app(
        store, max_upload_bytes=config.max_upload_bytes, static_dir=static_dir
    )
    uvicorn.run(app, host=config.host, port=config.port)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def node(config_path: str) -> None:
    """Run a sensing-node daemon with simulated drivers per its config."""
    from .node.config import load_node_config
    from .node.daemon import NodeDaemon
    from .node.store import LocalStore
    from .sim.signals import simulated_driver, stable_seed
    from .sync.client import SyncClient, SyncPolicy
    from .sync.transport import HttpTransport

    config = load_node_config(config_path)
    drivers = [
        simulated_driver(s.name, seed=stable_seed(config.node_id), spec=s)
        for s in config.sensors
    ]
    store = LocalStore(config.node_id, path=config.journal)
    transport = HttpTransport(config.server_url)
    client = SyncClient(
        config.node_id,
        store,
        SyncPolicy(sync_interval_s=config.sync_interval_s),
        transport,
        sensor_specs=[d.spec for d in drivers],
        record_interval_s=int(config.record_interval_s),
    )
    daemon = NodeDaemon(
        config.node_id,
        drivers,
        store,
        client,
        record_interval_s=config.record_interval_s,
        sync_interval_s=config.sync_interval_s,
    )
    click.echo(
        f"node {config.node_id}: {len(drivers)} sensor(s), sampling every "
        f"{config.record_interval_s:g} s, syncing to {config.server_url} every "
        f"{config.sync_interval_s:g} s"
    )
    try:
        daemon.run()
    except KeyboardInterrupt:
        click.echo("shutting down")
    finally:
        store.close()


if __name__ == "__main__":
    main()
