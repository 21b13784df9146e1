"""Streaming ECG R-peak detection toolkit.

A simplified Pan-Tompkins pipeline (adaptive high-pass, rectified
moving-sum envelope, adaptive threshold; no derivative, no squaring)
for sample-by-sample beat detection, plus beat-feedback scheduling,
session logging with 8.3 naming, a newline-delimited trigger wire
protocol, an annotated synthetic ECG generator and a validation
harness for sensitivity/PPV assessment.
"""

from .config import DetectorConfig
from .detector import BeatEvent, Detector, FilterState, StepOutput, ibi_stats
from .ingest import load_recording, read_log_records
from .kernels import DEFAULT_BACKEND, available_backends
from .runner import RunConfig, RunSummary, detect_recording, run
from .samples import Annotation, RawSample, Recording
from .scheduler import BeatScheduler, Delayed, Scaled, Sync, ToneEvent
from .sessionlog import (LogRecord, SessionFileName, SessionLogger,
                         open_session, validate_name)
from .smoothing import savitzky_golay
from .synth import SyntheticEcgSpec, generate
from .validation import (MatchResult, latency_stats, match_beats, metrics,
                         ppv, sensitivity)
from .wire import (Frame, FrameWriter, Info, SampleFrame, StreamDecoder,
                   Trigger, decode_frame, encode_frame)

__version__ = "0.1.0"

__all__ = [
    "Annotation", "BeatEvent", "BeatScheduler", "DEFAULT_BACKEND",
    "Delayed", "Detector", "DetectorConfig", "FilterState", "Frame",
    "FrameWriter", "Info", "LogRecord", "MatchResult", "RawSample",
    "Recording", "RunConfig", "RunSummary", "SampleFrame", "Scaled",
    "SessionFileName", "SessionLogger", "StepOutput", "StreamDecoder",
    "Sync", "SyntheticEcgSpec", "ToneEvent", "Trigger",
    "available_backends", "decode_frame", "detect_recording",
    "encode_frame", "generate", "ibi_stats", "latency_stats",
    "load_recording", "match_beats", "metrics", "open_session", "ppv",
    "read_log_records", "run", "savitzky_golay", "sensitivity",
    "validate_name",
]
