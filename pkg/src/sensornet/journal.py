"""Append-only JSON-lines journal reading with crash-tail repair."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

__all__ = ["replay_journal"]


def replay_journal(path: Path) -> Iterator[dict]:
    """Yield every complete JSON line; truncate a torn tail (from a crash
    mid-append) so subsequent appends start on a clean line."""
    data = path.read_bytes()
    offset = 0
    ops = []
    while True:
        newline = data.find(b"\n", offset)
        if newline == -1:
            break  # unterminated: torn, not replayed
        line = data[offset:newline].strip()
        if line:
            try:
                ops.append(json.loads(line))
            except (json.JSONDecodeError, UnicodeDecodeError):
                break
        offset = newline + 1
    if offset < len(data):
        with open(path, "r+b") as fh:
            fh.truncate(offset)
    yield from ops
