"""Session record logging with FAT 8.3 naming and append semantics.

File names follow the storage device convention: a stem of at most 8
characters from [A-Z0-9_-] (case-folded to upper) plus a csv or txt
extension.  Opening an existing file appends; a fresh file gets a
single header row.  CSV uses commas, TXT the same columns separated by
tabs.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import (ExtensionError, QueueOverflowError, StemCharacterError,
                     StemLengthError, StorageError)

HEADER_FIELDS = ("datetime", "elapsed_ms", "sample_index", "adc", "beat")
FLUSH_INTERVAL = 250  # records between forced flushes (beats always flush)

_ALLOWED_STEM = set("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-")
_EXTENSIONS = {"csv": ",", "txt": "\t"}


@dataclass(frozen=True)
class SessionFileName:
    stem: str
    extension: str

    def render(self) -> str:
        return f"{self.stem}.{self.extension}"

    @property
    def separator(self) -> str:
        return _EXTENSIONS[self.extension]


def validate_name(raw: str) -> SessionFileName:
    """Parse and case-fold an 8.3 session file name.

    Distinct error kinds: StemLengthError (empty or > 8 chars),
    StemCharacterError (outside [A-Z0-9_-]) and ExtensionError
    (missing, or not csv/txt).
    """
    stem, dot, ext = raw.rpartition(".")
    if not dot:
        raise ExtensionError(f"{raw!r} has no extension (need .csv or .txt)")
    ext = ext.lower()
    if ext not in _EXTENSIONS:
        raise ExtensionError(f"unsupported extension {ext!r} (csv or txt)")
    if not stem:
        raise StemLengthError("file name stem is empty")
    if len(stem) > 8:
        raise StemLengthError(
            f"stem {stem!r} exceeds 8 characters ({len(stem)})")
    stem = stem.upper()
    for ch in stem:
        if ch not in _ALLOWED_STEM:
            raise StemCharacterError(
                f"illegal character {ch!r} in stem {stem!r}")
    return SessionFileName(stem, ext)


@dataclass(frozen=True)
class LogRecord:
    """One logged data point: wall time, session timer, counter, value
    and a 0/1 flag marking a beat detection at this sample."""

    wall_datetime: datetime
    elapsed_ms: int
    sample_index: int
    adc_value: int
    beat_flag: int


def format_datetime(dt: datetime) -> str:
    """ISO-8601 UTC, whole seconds, with milliseconds only when nonzero."""
    dt = dt.astimezone(timezone.utc)
    base = dt.strftime("%Y-%m-%dT%H:%M:%S")
    if dt.microsecond:
        return f"{base}.{dt.microsecond // 1000:03d}Z"
    return base + "Z"


def parse_datetime(text: str) -> datetime:
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_record(rec: LogRecord, separator: str) -> str:
    return separator.join((
        format_datetime(rec.wall_datetime),
        str(rec.elapsed_ms),
        str(rec.sample_index),
        str(rec.adc_value),
        str(rec.beat_flag),
    ))


def parse_record(line: str, separator: str) -> LogRecord:
    parts = line.split(separator)
    if len(parts) != len(HEADER_FIELDS):
        raise ValueError(
            f"expected {len(HEADER_FIELDS)} fields, got {len(parts)}")
    return LogRecord(
        wall_datetime=parse_datetime(parts[0]),
        elapsed_ms=int(parts[1]),
        sample_index=int(parts[2]),
        adc_value=int(parts[3]),
        beat_flag=int(parts[4]),
    )


class SessionLogger:
    """Writer for one session file; use ``open_session`` to create.

    Records are flushed every FLUSH_INTERVAL records or immediately on
    a beat record, bounding data loss without flushing every sample.
    A failed write raises StorageError carrying the number of records
    already durably written.
    """

    def __init__(self, fh, separator: str):
        self._fh = fh
        self._sep = separator
        self.records_written = 0
        self._records_durable = 0
        self._since_flush = 0

    def write_record(self, rec: LogRecord) -> None:
        line = format_record(rec, self._sep) + "\n"
        try:
            self._fh.write(line)
            self._since_flush += 1
            if rec.beat_flag or self._since_flush >= FLUSH_INTERVAL:
                self._fh.flush()
                self._records_durable = self.records_written + 1
                self._since_flush = 0
        except (OSError, ValueError) as exc:
            # ValueError covers writes on a handle the OS already closed
            raise StorageError(f"session write failed: {exc}",
                               records_durable=self._records_durable) from exc
        self.records_written += 1

    def close(self) -> None:
        try:
            self._fh.flush()
            self._records_durable = self.records_written
        except (OSError, ValueError):
            pass
        finally:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def open_session(name: SessionFileName, directory) -> SessionLogger:
    """Open a session file: fresh files get a header row, existing
    files are appended to without repeating the header."""
    path = os.path.join(os.fspath(directory), name.render())
    write_header = not (os.path.exists(path) and os.path.getsize(path) > 0)
    try:
        fh = open(path, "a", encoding="utf-8", newline="")
        if write_header:
            fh.write(name.separator.join(HEADER_FIELDS) + "\n")
            fh.flush()
    except OSError as exc:
        raise StorageError(f"cannot open session file {path!r}: {exc}",
                           records_durable=0) from exc
    return SessionLogger(fh, name.separator)


class BoundedRecordQueue:
    """Constant-time bounded queue between the detection path and the
    logger; overflow is a reported error, never a silent drop."""

    def __init__(self, capacity: int = 8192):
        self._items: deque[LogRecord] = deque()
        self._capacity = capacity

    def __len__(self) -> int:
        return len(self._items)

    def put(self, rec: LogRecord) -> None:
        if len(self._items) >= self._capacity:
            raise QueueOverflowError(
                f"logging queue full ({self._capacity} records)")
        self._items.append(rec)

    def drain(self, logger: SessionLogger) -> int:
        """Write all queued records; returns the number written.

        A record is only dequeued once its write call returned, so a
        storage failure leaves the unwritten tail in the queue.
        """
        n = 0
        while self._items:
            logger.write_record(self._items[0])
            self._items.popleft()
            n += 1
        return n
