"""Run the API server on a background thread, mainly for benchmarks and
end-to-end tests. Binds an ephemeral port by default."""

from __future__ import annotations

import threading
import time

import uvicorn
from fastapi import FastAPI

__all__ = ["LocalServer"]


class LocalServer:
    def __init__(self, app: FastAPI, host: str = "127.0.0.1", port: int = 0):
        self._config = uvicorn.Config(app, host=host, port=port, log_level="warning")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self.base_url = ""

    def __enter__(self) -> "LocalServer":
        self._thread.start()
        deadline = time.monotonic() + 10
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server failed to start within 10 s")
            if not self._thread.is_alive():
                raise RuntimeError("server thread died during startup")
            time.sleep(0.01)
        sock = self._server.servers[0].sockets[0]
        host, port = sock.getsockname()[:2]
        self.base_url = f"http://{host}:{port}"
        return self

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)
