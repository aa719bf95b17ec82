"""Server configuration file: plain ``key = value`` lines.

    listen = 127.0.0.1:8080
    storage_dir = /var/lib/sensornet
    max_upload_bytes = 2097152
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..node.config import parse_kv_lines
from ..sync.client import DEFAULT_MAX_FILE_BYTES

__all__ = ["ServerConfig", "load_server_config", "parse_server_config"]


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    storage_dir: Path | None = None
    max_upload_bytes: int = DEFAULT_MAX_FILE_BYTES


def parse_server_config(text: str) -> ServerConfig:
    values = dict(parse_kv_lines(text))
    unknown = set(values) - {"listen", "storage_dir", "max_upload_bytes"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    config = ServerConfig()
    if "listen" in values:
        host, sep, port = values["listen"].rpartition(":")
        if not sep:
            raise ValueError("listen must look like host:port")
        config.host = host
        config.port = int(port)
    if "storage_dir" in values:
        config.storage_dir = Path(values["storage_dir"])
    if "max_upload_bytes" in values:
        config.max_upload_bytes = int(values["max_upload_bytes"])
        if config.max_upload_bytes <= 0:
            raise ValueError("max_upload_bytes must be positive")
    return config


def load_server_config(path: str | Path) -> ServerConfig:
    return parse_server_config(Path(path).read_text(encoding="utf-8"))
