"""Recording loaders: session-logger files and a bare one-column format.

Logger CSV/TXT files round-trip exactly: the record sequence read back
equals the sequence written, and beat-flag columns come back as
annotations.  The raw format is one ADC integer per line with the
sample rate supplied by the caller.
"""

from __future__ import annotations

import os

from .errors import IngestParseError, SourceError
from .samples import Annotation, RawSample, Recording, RecordingMeta
from .sessionlog import HEADER_FIELDS, LogRecord, parse_record

_FORMAT_SEPARATORS = {"csv": ",", "txt": "\t"}


def _detect_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        return fmt
    ext = os.path.splitext(path)[1].lstrip(".").lower()
    if ext in _FORMAT_SEPARATORS or ext == "raw":
        return ext
    raise SourceError(
        f"cannot infer format from {path!r}; pass fmt= csv, txt or raw")


def read_log_records(path, fmt: str | None = None) -> list[LogRecord]:
    """Read a logger-format file back into its exact record sequence."""
    path = os.fspath(path)
    fmt = _detect_format(path, fmt)
    if fmt not in _FORMAT_SEPARATORS:
        raise SourceError(f"not a logger format: {fmt!r}")
    sep = _FORMAT_SEPARATORS[fmt]
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise SourceError(f"cannot open {path!r}: {exc}") from exc
    records = []
    with fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line_no == 1 and line == sep.join(HEADER_FIELDS):
                continue
            try:
                records.append(parse_record(line, sep))
            except ValueError as exc:
                raise IngestParseError(
                    f"{path}:{line_no}: {exc}", line_no=line_no) from exc
    return records


def _infer_sample_rate(timestamps: list[int]) -> int | None:
    if len(timestamps) < 2:
        return None
    diffs = sorted(timestamps[i + 1] - timestamps[i]
                   for i in range(len(timestamps) - 1))
    median = diffs[len(diffs) // 2]
    if median <= 0:
        return None
    return int(round(1000.0 / median))


def load_recording(path, fmt: str | None = None,
                   sample_rate_hz: int | None = None) -> Recording:
    """Load a recording for replay.

    Logger files carry their own timestamps; the sample rate is
    inferred from them and checked against ``sample_rate_hz`` when
    given (>1% disagreement is an error).  The raw format requires
    ``sample_rate_hz``.  An empty file is an empty Recording, not an
    error.
    """
    path = os.fspath(path)
    fmt = _detect_format(path, fmt)
    if fmt == "raw":
        return _load_raw(path, sample_rate_hz)

    records = read_log_records(path, fmt)
    samples = []
    annotations = []
    for rec in records:
        if rec.sample_index != len(samples):
            raise IngestParseError(
                f"{path}: sample_index {rec.sample_index} breaks contiguity "
                f"(expected {len(samples)})")
        samples.append(RawSample(rec.sample_index, rec.elapsed_ms,
                                 rec.adc_value))
        if rec.beat_flag:
            annotations.append(Annotation(rec.sample_index, rec.elapsed_ms))

    inferred = _infer_sample_rate([s.timestamp_ms for s in samples])
    rate = sample_rate_hz or inferred
    if sample_rate_hz and inferred and \
            abs(inferred - sample_rate_hz) > 0.01 * sample_rate_hz:
        raise SourceError(
            f"{path}: file timestamps imply {inferred} Hz but "
            f"{sample_rate_hz} Hz was requested")
    return Recording(samples=samples,
                     annotations=annotations,
                     meta=RecordingMeta(sample_rate_hz=rate, source=path))


def _load_raw(path: str, sample_rate_hz: int | None) -> Recording:
    if not sample_rate_hz:
        raise SourceError("raw format needs an explicit sample rate")
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SourceError(f"cannot open {path!r}: {exc}") from exc
    samples = []
    with fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError as exc:
                raise IngestParseError(
                    f"{path}:{line_no}: not an integer: {text!r}",
                    line_no=line_no) from exc
            i = len(samples)
            ts = int(round(i * 1000.0 / sample_rate_hz))
            samples.append(RawSample(i, ts, value))
    return Recording(samples=samples,
                     annotations=None,
                     meta=RecordingMeta(sample_rate_hz=sample_rate_hz,
                                        source=path))
