"""Append-only newline-delimited JSON journal used by the annotation service
and the leaderboard.

Each record is one JSON object on one line. Crash safety comes from the
format: a torn final line (interrupted write) is detected and ignored on
replay, so reloading always yields a prefix of the appended records.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Iterator


class Journal:
    def __init__(self, path: str | Path, durable: bool = True):
        """durable=False skips the per-record fsync (offline/bulk use)."""
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.durable = durable
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
                f.flush()
                if self.durable:
                    os.fsync(f.fileno())

    def replay(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                if not line.endswith("\n"):
                    return  # torn trailing record from an interrupted write
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    return  # corrupt tail; keep the clean prefix
