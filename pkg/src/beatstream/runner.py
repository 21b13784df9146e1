"""Pipeline orchestration: ingest -> detector -> scheduler -> logger/wire.

One ordered ingest loop with the detection path inline; trigger frames
are written to the wire in the same loop tick as the detection, while
log records flow through a bounded queue so storage latency never sits
on the detection path.
"""

from __future__ import annotations

import itertools
import math
import socket
import sys
import time
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .config import DetectorConfig
from .detector import BeatEvent, Detector
from .errors import ConfigError, SourceError, WireError
from .ingest import load_recording
from .samples import RawSample, Recording
from .scheduler import BeatScheduler, FeedbackMode
from .sessionlog import (BoundedRecordQueue, LogRecord, SessionFileName,
                         open_session)
from .synth import SyntheticEcgSpec, generate
from .wire import FrameWriter, Info, SampleFrame, StreamDecoder, Trigger

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class RunConfig:
    source: str
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    mode: FeedbackMode | None = None
    log_name: SessionFileName | None = None
    log_dir: str = "."
    wire: str = "off"  # off | stdout | tcp:HOST:PORT | file path
    stream_raw: bool = False
    emit_tones: bool = False
    log_beats_only: bool = False
    train_seconds: float = 4.0
    pace: str = "fast"  # fast | realtime (replay sources only)
    session_start: datetime = EPOCH

    def __post_init__(self):
        if self.log_name is None and self.wire == "off":
            raise ConfigError("run needs a log file, a wire, or both")
        if self.pace not in ("fast", "realtime"):
            raise ConfigError("pace must be 'fast' or 'realtime'")
        if self.train_seconds < 0:
            raise ConfigError("train_seconds must be >= 0")


@dataclass
class RunSummary:
    beats: int = 0
    samples: int = 0
    duration_ms: int = 0
    tones: int = 0
    errors: int = 0

    def render(self) -> str:
        return (f"summary beats={self.beats} samples={self.samples} "
                f"duration_ms={self.duration_ms} tones={self.tones} "
                f"errors={self.errors}")


def parse_synth_source(source: str) -> SyntheticEcgSpec:
    """Parse 'synth:key=value,...' into a generator spec."""
    body = source[len("synth:"):]
    kwargs = {}
    if body:
        for item in body.split(","):
            if "=" not in item:
                raise ConfigError(f"bad synth parameter {item!r}")
            key, value = item.split("=", 1)
            key = key.strip()
            fields = SyntheticEcgSpec.__dataclass_fields__
            if key not in fields or key == "burst_artifacts":
                raise ConfigError(f"unknown synth parameter {key!r}")
            typ = fields[key].type
            kwargs[key] = int(value) if typ == "int" else float(value)
    return SyntheticEcgSpec(**kwargs)


def resolve_source(config: RunConfig) -> Recording:
    """Materialize a replayable recording from a source string."""
    src = config.source
    if src.startswith("synth:"):
        recording = generate(parse_synth_source(src))
    else:
        recording = load_recording(
            src, sample_rate_hz=config.detector.sample_rate_hz
            if src.endswith(".raw") else None)
    rate = recording.meta.sample_rate_hz
    want = config.detector.sample_rate_hz
    if rate and abs(rate - want) > 0.01 * want:
        raise ConfigError(
            f"source is {rate} Hz but the detector expects {want} Hz")
    return recording


def open_wire(target: str):
    """Open the wire transport named by the run config; None when off."""
    if target == "off":
        return None
    if target == "stdout":
        return FrameWriter(sys.stdout.buffer)
    if target.startswith("tcp:"):
        try:
            host, port = target[4:].rsplit(":", 1)
            sock = socket.create_connection((host, int(port)), timeout=10)
        except (OSError, ValueError) as exc:
            raise WireError(f"cannot connect wire {target!r}: {exc}") from exc
        return FrameWriter(sock.makefile("wb"))
    try:
        return FrameWriter(open(target, "wb"))
    except OSError as exc:
        raise WireError(f"cannot open wire {target!r}: {exc}") from exc


def train_on_head(detector: Detector, recording: Recording,
                  train_seconds: float) -> None:
    """Train on up to train_seconds from the head of the recording."""
    if train_seconds <= 0:
        return
    fs = detector.config.sample_rate_hz
    count = min(len(recording.samples), math.ceil(train_seconds * fs))
    detector.train(recording.samples[:count])


def detect_recording(recording: Recording,
                     config: DetectorConfig | None = None,
                     train_seconds: float = 4.0,
                     backend: str | None = None) -> list[BeatEvent]:
    """Train on the recording head, then block-detect the full stream."""
    detector = Detector(config, backend=backend)
    train_on_head(detector, recording, train_seconds)
    return detector.process_recording(recording)


class _LaggedLog:
    """Holds recent records back so beat flags can land on the
    delay-compensated peak sample before it reaches storage."""

    def __init__(self, queue: BoundedRecordQueue, logger, lag: int,
                 beats_only: bool):
        self._queue = queue
        self._logger = logger
        self._lag = lag
        self._beats_only = beats_only
        self._held: deque[list] = deque()

    def add(self, wall: datetime, sample: RawSample) -> None:
        self._held.append([wall, sample.timestamp_ms, sample.index,
                           sample.value, 0])
        if len(self._held) > self._lag:
            self._release(self._held.popleft())

    def flag_beat(self, peak_index: int) -> None:
        for item in reversed(self._held):
            if item[2] == peak_index:
                item[4] = 1
                return
        # peak already left the window (pathological stream); flag the
        # newest held record so counts still reconcile
        if self._held:
            self._held[-1][4] = 1

    def _release(self, item) -> None:
        if self._beats_only and not item[4]:
            return
        self._queue.put(LogRecord(item[0], item[1], item[2], item[3],
                                  item[4]))
        self._queue.drain(self._logger)

    def finish(self) -> None:
        while self._held:
            self._release(self._held.popleft())
        self._queue.drain(self._logger)


def _iter_live(path: str, summary: RunSummary):
    """Yield RawSamples decoded from S frames on a byte stream; decode
    errors are counted, the decoder resyncs at the next newline."""
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise SourceError(f"cannot open live source {path!r}: {exc}") from exc
    decoder = StreamDecoder()
    index = 0
    with fh:
        while True:
            chunk = fh.read(4096)
            if not chunk:
                break
            for item in decoder.feed(chunk):
                if isinstance(item, SampleFrame):
                    yield RawSample(index, item.timestamp_ms, item.adc)
                    index += 1
                elif isinstance(item, Exception):
                    summary.errors += 1
        if decoder.end():
            summary.errors += 1


def run(config: RunConfig, probe=None) -> RunSummary:
    """Stream the source through the pipeline; returns the summary.

    ``probe``, when given, is called as probe(kind, tick, value) with
    kind in {"beat", "trigger"} -- instrumentation for the latency
    contract (a trigger must land on the wire in its beat's tick).
    """
    summary = RunSummary()
    detector = Detector(config.detector)

    live = config.source.startswith(("wire:", "serial:"))
    if live:
        path = config.source.split(":", 1)[1]
        sample_iter = _iter_live(path, summary)
        if config.train_seconds > 0:
            fs = config.detector.sample_rate_hz
            count = math.ceil(config.train_seconds * fs)
            head = list(itertools.islice(sample_iter, count))
            detector.train(head)  # live: the head is consumed, not replayed
    else:
        recording = resolve_source(config)
        if config.train_seconds > 0 and recording.samples:
            train_on_head(detector, recording, config.train_seconds)
        sample_iter = iter(recording.samples)

    scheduler = BeatScheduler(config.mode) if config.mode else None
    writer = open_wire(config.wire)

    logger = None
    lagged = None
    if config.log_name is not None:
        logger = open_session(config.log_name, config.log_dir)
        cfg = config.detector
        lag = max(4 * (cfg.group_delay_samples + cfg.lp_window), 128)
        lagged = _LaggedLog(BoundedRecordQueue(), logger, lag,
                            config.log_beats_only)

    start_wall = time.monotonic()
    try:
        for tick, sample in enumerate(sample_iter):
            if config.pace == "realtime" and not live:
                target = start_wall + sample.timestamp_ms / 1000.0
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)

            out = detector.process_sample(sample)
            if writer is not None and config.stream_raw:
                writer.write(SampleFrame(sample.timestamp_ms, sample.value))
            if out.beat is not None:
                summary.beats += 1
                if probe is not None:
                    probe("beat", tick, out.beat.seq)
                if writer is not None:
                    writer.write(Trigger(out.beat.seq,
                                         out.beat.peak_timestamp_ms))
                    if probe is not None:
                        probe("trigger", tick, out.beat.seq)
                if scheduler is not None:
                    scheduler.on_beat(out.beat)
            if scheduler is not None:
                while True:
                    tone = scheduler.next_due(sample.timestamp_ms)
                    if tone is None:
                        break
                    summary.tones += 1
                    if writer is not None and config.emit_tones:
                        writer.write(Info(
                            f"tone {tone.source_beat_seq} "
                            f"due {int(tone.due_at_ms)}"))
            if lagged is not None:
                wall = config.session_start + timedelta(
                    milliseconds=sample.timestamp_ms)
                lagged.add(wall, sample)
                if out.beat is not None:
                    lagged.flag_beat(out.beat.peak_index)
            summary.samples += 1
            summary.duration_ms = sample.timestamp_ms
    finally:
        if lagged is not None:
            lagged.finish()
        if logger is not None:
            logger.close()
        if writer is not None and config.wire != "stdout":
            writer.close()
    return summary
