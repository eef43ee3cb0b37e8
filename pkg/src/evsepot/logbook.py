"""Append-only structured interaction log.

One JSON object per line, newline-terminated, so a crash can tear at most
the final line.  Files rotate daily (`interactions-YYYYMMDD.log`).  Record
ids increase strictly in file order and survive daemon restarts.

Line schema (version 1):
    {"schema": 1, "id": <int>, "ts": "<ISO-8601 UTC>", "category": "<str>",
     "port": <int>, "src": "<ip>", "payload": {<category-specific fields>}}
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CATEGORIES = ("Port", "Actions", "HttpRequest", "Timing", "Ftp", "Telnet",
              "Login")


class LogCorruption(Exception):
    """A non-trailing log line failed to parse."""

    def __init__(self, path, line_no):
        super().__init__(f"corrupt log line {line_no} in {path}")
        self.path = str(path)
        self.line_no = line_no


@dataclass
class InteractionRecord:
    record_id: int
    category: str
    port: int
    source_ip: str
    timestamp: str
    payload: dict = field(default_factory=dict)


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class InteractionLog:
    """Serialized appender shared by all decoy services.

    If the destination becomes unwritable, records are buffered in memory
    up to ``buffer_limit``; beyond that the oldest are dropped and a
    drop-counter record is emitted once writing recovers.
    """

    def __init__(self, directory, rotate_daily: bool = True,
                 buffer_limit: int = 1000):
        self.directory = Path(directory)
        self.rotate_daily = rotate_daily
        self.buffer_limit = buffer_limit
        self._lock = threading.Lock()
        self._next_id = 1
        self._open_path: Optional[Path] = None
        self._fh = None
        self._buffer: list = []
        self._dropped = 0
        self.directory.mkdir(parents=True, exist_ok=True)
        self._next_id = self._scan_last_id() + 1

    def _file_for(self, when: datetime) -> Path:
        if self.rotate_daily:
            return self.directory / f"interactions-{when:%Y%m%d}.log"
        return self.directory / "interactions.log"

    def _scan_last_id(self) -> int:
        last = 0
        for path in sorted(self.directory.glob("interactions*.log")):
            try:
                for rec in _parse_file(path, strict=False):
                    last = max(last, rec.record_id)
            except OSError:
                continue
        return last

    def record(self, category: str, port: int, source_ip: str,
               payload: Optional[dict] = None,
               timestamp: Optional[datetime] = None) -> int:
        if category not in CATEGORIES:
            raise ValueError(f"unknown log category: {category}")
        when = timestamp or _utc_now()
        with self._lock:
            rec_id = self._next_id
            self._next_id += 1
            line = self._format(rec_id, when, category, port, source_ip,
                                payload or {})
            written = self._append(line, when)
            if written and self._dropped:
                count, self._dropped = self._dropped, 0
                marker_id = self._next_id
                self._next_id += 1
                marker = self._format(marker_id, _utc_now(), "Port", 0, "-",
                                      {"event": "records-dropped",
                                       "count": count})
                self._append(marker, when)
            return rec_id

    @staticmethod
    def _format(rec_id: int, when: datetime, category: str, port: int,
                source_ip: str, payload: dict) -> str:
        return json.dumps({
            "schema": SCHEMA_VERSION,
            "id": rec_id,
            "ts": when.isoformat(),
            "category": category,
            "port": port,
            "src": source_ip,
            "payload": payload,
        }, separators=(",", ":"))

    def _append(self, line: str, when: datetime) -> bool:
        try:
            self._ensure_open(when)
            while self._buffer:
                self._fh.write(self._buffer[0] + "\n")
                self._buffer.pop(0)
            self._fh.write(line + "\n")
            self._fh.flush()
            return True
        except OSError as exc:
            log.warning("log destination unwritable (%s); buffering", exc)
            self._buffer.append(line)
            if len(self._buffer) > self.buffer_limit:
                self._buffer.pop(0)
                self._dropped += 1
            return False

    def _ensure_open(self, when: datetime) -> None:
        path = self._file_for(when)
        if self._fh is not None and path == self._open_path:
            return
        if self._fh is not None:
            self._fh.close()
            self._fh = None
        self._fh = open(path, "a", encoding="utf-8")
        self._open_path = path

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None
                self._open_path = None


def _parse_file(path: Path, strict: bool = True) -> Iterator[InteractionRecord]:
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        lines = fh.read().split("\n")
    # a well-formed file ends with a newline, leaving one empty tail element
    if lines and lines[-1] == "":
        lines.pop()
    for i, line in enumerate(lines):
        try:
            obj = json.loads(line)
            yield InteractionRecord(
                record_id=obj["id"],
                category=obj["category"],
                port=obj["port"],
                source_ip=obj["src"],
                timestamp=obj["ts"],
                payload=obj.get("payload", {}),
            )
        except (ValueError, KeyError, TypeError):
            if i == len(lines) - 1:
                # torn final line from a crash: lose that record only
                log.warning("skipping torn trailing line in %s", path)
                return
            if strict:
                raise LogCorruption(path, i + 1)
            log.warning("skipping corrupt line %d in %s", i + 1, path)


def read_log(location, category: Optional[str] = None,
             source_ip: Optional[str] = None,
             since: Optional[str] = None,
             until: Optional[str] = None) -> list:
    """Read records from a log file or directory, in record-id order.

    ``since``/``until`` are ISO timestamps compared lexically against the
    stored UTC timestamps (both use the same format, so this is sound).
    """
    location = Path(location)
    if location.is_dir():
        paths = sorted(location.glob("interactions*.log"))
    else:
        paths = [location]
    records = []
    for path in paths:
        for rec in _parse_file(path, strict=True):
            if category is not None and rec.category != category:
                continue
            if source_ip is not None and rec.source_ip != source_ip:
                continue
            if since is not None and rec.timestamp < since:
                continue
            if until is not None and rec.timestamp > until:
                continue
            records.append(rec)
    records.sort(key=lambda r: r.record_id)
    return records
