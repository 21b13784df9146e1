"""Command-line tool: run, synth, validate, plot.

Exit codes: 0 ok, 2 configuration, 3 source, 4 storage, 5 wire.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import DetectorConfig
from .errors import (BeatstreamError, ConfigError, SourceError, StorageError,
                     WireError)
from .ingest import load_recording
from .runner import EPOCH, RunConfig, RunSummary, run
from .samples import Recording
from .scheduler import Delayed, Scaled, Sync
from .sessionlog import (HEADER_FIELDS, LogRecord, format_record,
                         parse_datetime, validate_name)
from .smoothing import savitzky_golay
from .synth import SyntheticEcgSpec, generate
from .validation import latency_stats, match_beats, ppv, sensitivity

EXIT_CONFIG = 2
EXIT_SOURCE = 3
EXIT_STORAGE = 4
EXIT_WIRE = 5

_DETECTOR_FLAGS = ("sample_rate_hz", "hp_window", "lp_window",
                   "threshold_window", "update_rate", "peak_fraction",
                   "refractory_ms", "adc_max")


def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("detector tunables")
    defaults = DetectorConfig()
    for name in _DETECTOR_FLAGS:
        value = getattr(defaults, name)
        group.add_argument(f"--{name.replace('_', '-')}", type=type(value),
                           default=None, dest=name,
                           help=f"default {value}")


def _detector_config(args) -> DetectorConfig:
    overrides = {name: getattr(args, name) for name in _DETECTOR_FLAGS
                 if getattr(args, name, None) is not None}
    return DetectorConfig(**overrides)


def _parse_mode(text: str):
    if text == "sync":
        return Sync()
    if text.startswith("scaled:"):
        return Scaled(float(text.split(":", 1)[1]))
    if text.startswith("delayed:"):
        return Delayed(float(text.split(":", 1)[1]))
    raise ConfigError(f"unknown feedback mode {text!r} "
                      "(sync, scaled:FACTOR or delayed:MS)")


_BOOL_KEYS = {"stream_raw", "emit_tones", "log_beats_only"}


def _apply_config_file(argv: list[str], run_parser: argparse.ArgumentParser):
    """Key=value config file; command-line flags win over file entries."""
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    known = {a.dest for a in run_parser._actions}
    defaults = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{line_no}: expected key=value")
                key, value = line.split("=", 1)
                key = key.strip().replace("-", "_")
                value = value.strip()
                if key not in known:
                    raise ConfigError(
                        f"{path}:{line_no}: unknown setting {key!r}")
                if key in _BOOL_KEYS:
                    defaults[key] = value.lower() in ("1", "true", "yes",
                                                      "on")
                else:
                    defaults[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    run_parser.set_defaults(**defaults)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beatstream",
        description="Streaming R-peak detection with beat feedback, "
                    "session logging and a line-based trigger wire.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="stream a source through the pipeline")
    p_run.add_argument("--source", required=True,
                       help="recording file (.csv/.txt/.raw), synth:k=v,... "
                            "or wire:PATH / serial:PATH for live S-frames")
    p_run.add_argument("--wire", default="off",
                       help="off, stdout, tcp:HOST:PORT or a file/device path")
    p_run.add_argument("--log", default=None,
                       help="8.3 session file name (STEM.csv or STEM.txt)")
    p_run.add_argument("--log-dir", default=".")
    p_run.add_argument("--log-beats-only", action="store_true",
                       help="log only records with a beat flag")
    p_run.add_argument("--mode", default=None,
                       help="feedback mode: sync, scaled:F or delayed:MS")
    p_run.add_argument("--stream-raw", action="store_true",
                       help="also send every raw sample as an S frame")
    p_run.add_argument("--emit-tones", action="store_true",
                       help="send scheduled tones as I frames")
    p_run.add_argument("--train-seconds", type=float, default=4.0)
    p_run.add_argument("--pace", choices=("fast", "realtime"),
                       default="fast")
    p_run.add_argument("--session-start", default=None,
                       help="ISO-8601 wall time of sample 0 "
                            "(default 1970-01-01T00:00:00Z)")
    p_run.add_argument("--config", default=None,
                       help="key=value file of defaults; flags win")
    _add_detector_flags(p_run)

    p_synth = sub.add_parser("synth",
                             help="generate an annotated synthetic recording")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--duration-s", type=float, default=60.0)
    p_synth.add_argument("--mean-hr-bpm", type=float, default=70.0)
    p_synth.add_argument("--hr-jitter-pct", type=float, default=0.0)
    p_synth.add_argument("--noise-std", type=float, default=0.0)
    p_synth.add_argument("--baseline-wander-amp", type=float, default=0.0)
    p_synth.add_argument("--baseline-wander-hz", type=float, default=0.25)
    p_synth.add_argument("--burst", action="append", default=[],
                         metavar="START:DUR:AMP",
                         help="saturated-noise burst (repeatable)")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--sample-rate-hz", type=int, default=250)

    p_val = sub.add_parser("validate",
                           help="match detections against annotations")
    p_val.add_argument("--detections", required=True,
                       help="logger file whose beat flags are detections")
    p_val.add_argument("--annotations", required=True,
                       help="logger file whose beat flags are ground truth")
    p_val.add_argument("--tol-ms", type=float, default=75.0)
    p_val.add_argument("--report-csv", default=None)

    p_plot = sub.add_parser("plot",
                            help="emit smoothed plot data with beat markers")
    p_plot.add_argument("--log", required=True)
    p_plot.add_argument("--window", type=int, default=15)
    p_plot.add_argument("--polyorder", type=int, default=3)
    p_plot.add_argument("--out", required=True)

    parser.run_parser = p_run
    return parser


def _cmd_run(args) -> int:
    mode = _parse_mode(args.mode) if args.mode else None
    log_name = validate_name(args.log) if args.log else None
    session_start = (parse_datetime(args.session_start)
                     if args.session_start else EPOCH)
    config = RunConfig(
        source=args.source,
        detector=_detector_config(args),
        mode=mode,
        log_name=log_name,
        log_dir=args.log_dir,
        wire=args.wire,
        stream_raw=args.stream_raw,
        emit_tones=args.emit_tones,
        log_beats_only=args.log_beats_only,
        train_seconds=args.train_seconds,
        pace=args.pace,
        session_start=session_start,
    )
    summary = run(config)
    out = sys.stderr if args.wire == "stdout" else sys.stdout
    print(summary.render(), file=out)
    return 0


def _cmd_synth(args) -> int:
    bursts = []
    for item in args.burst:
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad burst {item!r}, expected START:DUR:AMP")
        bursts.append(tuple(float(p) for p in parts))
    spec = SyntheticEcgSpec(
        sample_rate_hz=args.sample_rate_hz,
        duration_s=args.duration_s,
        mean_hr_bpm=args.mean_hr_bpm,
        hr_jitter_pct=args.hr_jitter_pct,
        noise_std=args.noise_std,
        baseline_wander_amp=args.baseline_wander_amp,
        baseline_wander_hz=args.baseline_wander_hz,
        burst_artifacts=tuple(bursts),
        seed=args.seed,
    )
    recording = generate(spec)
    write_recording_csv(recording, args.out)
    print(f"wrote {len(recording.samples)} samples, "
          f"{len(recording.annotations)} beats to {args.out}")
    return 0


def write_recording_csv(recording: Recording, path: str) -> None:
    """Persist a recording in the logger CSV schema (beat flags mark
    the annotated R peaks), so it replays and round-trips exactly."""
    from datetime import timedelta

    beat_indices = {a.beat_index for a in (recording.annotations or [])}
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(HEADER_FIELDS) + "\n")
            for s in recording.samples:
                rec = LogRecord(
                    wall_datetime=EPOCH + timedelta(
                        milliseconds=s.timestamp_ms),
                    elapsed_ms=s.timestamp_ms,
                    sample_index=s.index,
                    adc_value=s.value,
                    beat_flag=1 if s.index in beat_indices else 0,
                )
                fh.write(format_record(rec, ",") + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write {path!r}: {exc}") from exc


def _as_beats(recording: Recording):
    from .detector import BeatEvent

    return [BeatEvent(i, a.beat_index, a.beat_timestamp_ms, None)
            for i, a in enumerate(recording.annotations or [])]


def _cmd_validate(args) -> int:
    det_rec = load_recording(args.detections)
    ann_rec = load_recording(args.annotations)
    detections = _as_beats(det_rec)
    annotations = ann_rec.annotations or []
    result = match_beats(detections, annotations, args.tol_ms)

    lines = [
        f"annotations {len(annotations)}",
        f"detections {len(detections)}",
        f"tp {result.tp}",
        f"fp {result.fp}",
        f"fn {result.fn}",
        f"sensitivity {sensitivity(result):.6f}",
        f"ppv_specificity {ppv(result):.6f}",
    ]
    if result.matched_pairs:
        stats = latency_stats(result)
        lines += [
            f"latency_median_ms {stats.median_ms:.3f}",
            f"latency_median_abs_ms {stats.median_abs_ms:.3f}",
            f"latency_p95_ms {stats.p95_ms:.3f}",
            f"latency_max_ms {stats.max_ms:.3f}",
        ]
    print("\n".join(lines))

    if args.report_csv:
        try:
            with open(args.report_csv, "w", encoding="utf-8") as fh:
                fh.write("metric,value\n")
                for line in lines:
                    key, value = line.split(" ", 1)
                    fh.write(f"{key},{value}\n")
        except OSError as exc:
            raise StorageError(
                f"cannot write {args.report_csv!r}: {exc}") from exc
    return 0


def _cmd_plot(args) -> int:
    recording = load_recording(args.log)
    if not recording.samples:
        raise SourceError(f"{args.log}: no samples to plot")
    smoothed = savitzky_golay(recording.values(), args.window,
                              args.polyorder)
    marker = 1.05 * float(max(smoothed.max(), 0.0))
    beat_ts = {a.beat_timestamp_ms for a in (recording.annotations or [])}
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("time_ms,value\n")
            for s, v in zip(recording.samples, smoothed):
                fh.write(f"{s.timestamp_ms},{v:.6f}\n")
                if s.timestamp_ms in beat_ts:
                    fh.write(f"{s.timestamp_ms},{marker:.6f}\n")
    except OSError as exc:
        raise StorageError(f"cannot write {args.out!r}: {exc}") from exc
    print(f"wrote {len(recording.samples)} points to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(argv, parser.run_parser)
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "plot":
            return _cmd_plot(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    except StorageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STORAGE
    except WireError as exc:
        print(f"error: {exc}", file=sys.stderr)
        try:
            # a consumer hanging up mid-stream (broken pipe on stdout)
            # would otherwise warn again during interpreter shutdown
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
        except OSError:
            pass
        return EXIT_WIRE
    except BeatstreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
