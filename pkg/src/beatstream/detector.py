"""Streaming R-peak detector.

Simplified Pan-Tompkins pipeline: baseline-removing high-pass,
rectified moving-sum envelope (no derivative, no squaring) and an
adaptive threshold with refractory gating.  Peaks are reported at the
argmax of the envelope between the upward and downward threshold
crossings, shifted back by the pipeline group delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import DetectorConfig
from .errors import InsufficientDataError, SampleOrderError, TrainingError
from .kernels import kernel_class
from .samples import RawSample, Recording


@dataclass(frozen=True)
class BeatEvent:
    """A detected R-peak.

    ``peak_index``/``peak_timestamp_ms`` point at the estimated R-peak
    sample after group-delay compensation, not at the sample that
    triggered the detection.  ``ibi_ms`` is None for the first beat of
    a session.
    """

    seq: int
    peak_index: int
    peak_timestamp_ms: int
    ibi_ms: float | None


@dataclass(frozen=True)
class StepOutput:
    """Per-sample pipeline output: filter taps plus an optional beat."""

    hp_out: float
    envelope: float
    beat: BeatEvent | None


@dataclass(frozen=True)
class FilterState:
    """Snapshot of the detector's running state (for inspection/tests)."""

    hp_buffer: tuple[float, ...]
    lp_buffer: tuple[float, ...]
    threshold: float
    window_peak: float
    window_pos: int
    last_beat_index: int | None
    trained: bool


class Detector:
    """One detector per stream; feed samples in arrival order.

    The detector performs no I/O and never reads a clock: timestamps
    travel with the samples, so identical input streams yield identical
    output streams.
    """

    def __init__(self, config: DetectorConfig | None = None,
                 backend: str | None = None):
        self.config = config or DetectorConfig()
        self._kernel = kernel_class(backend)(
            self.config.hp_window,
            self.config.lp_window,
            self.config.threshold_window,
            self.config.update_rate,
            self.config.peak_fraction,
            self.config.refractory_samples,
            self.config.group_delay_samples,
        )
        self._expected_index: int | None = None
        self._base_index = 0
        self._live_step_offset = 0
        self._beat_count = 0
        self._last_peak_ts: int | None = None
        self.degenerate_calibration = False

    @property
    def trained(self) -> bool:
        return self._kernel.trained

    @property
    def beat_count(self) -> int:
        return self._beat_count

    @property
    def state(self) -> FilterState:
        snap = self._kernel.state_snapshot()
        last = snap["last_beat_step"]
        if last is not None:
            last = self._base_index + (last - self._live_step_offset)
        return FilterState(
            hp_buffer=tuple(snap["hp_buffer"]),
            lp_buffer=tuple(snap["lp_buffer"]),
            threshold=snap["threshold"],
            window_peak=snap["window_peak"],
            window_pos=snap["window_pos"],
            last_beat_index=last,
            trained=snap["trained"],
        )

    def _make_beat(self, peak_step: int, peak_ts: int) -> BeatEvent:
        peak_index = self._base_index + (peak_step - self._live_step_offset)
        if peak_index < self._base_index:
            peak_index = self._base_index
        ibi = None
        if self._last_peak_ts is not None:
            ibi = float(peak_ts - self._last_peak_ts)
        self._last_peak_ts = peak_ts
        beat = BeatEvent(self._beat_count, peak_index, peak_ts, ibi)
        self._beat_count += 1
        return beat

    def process_sample(self, sample: RawSample) -> StepOutput:
        """Run one sample through the pipeline.

        Raises SampleOrderError when the index is not the previous
        index + 1 (dropped or duplicated samples).
        """
        if self._expected_index is None:
            self._base_index = sample.index
            self._live_step_offset = self._kernel.steps
        elif sample.index != self._expected_index:
            raise SampleOrderError(
                f"expected sample index {self._expected_index}, "
                f"got {sample.index}")
        self._expected_index = sample.index + 1

        hp, env, raw_beat = self._kernel.step(sample.value,
                                              sample.timestamp_ms)
        beat = None
        if raw_beat is not None:
            beat = self._make_beat(raw_beat[0], raw_beat[1])
        return StepOutput(hp, env, beat)

    def process_recording(self, recording: Recording) -> list[BeatEvent]:
        """Block-process a whole recording; returns the detected beats.

        Equivalent to calling process_sample over the recording (same
        kernel, block path).  The recording's samples must be index-
        contiguous starting anywhere.
        """
        if not recording.samples:
            return []
        first = recording.samples[0].index
        if self._expected_index is None:
            self._base_index = first
            self._live_step_offset = self._kernel.steps
        elif first != self._expected_index:
            raise SampleOrderError(
                f"expected sample index {self._expected_index}, got {first}")
        self._expected_index = recording.samples[-1].index + 1

        _, _, raw_beats = self._kernel.process(recording.values(),
                                               recording.timestamps())
        return [self._make_beat(ps, ts) for _, ps, ts in raw_beats]

    def train(self, calibration) -> "Detector":
        """Prime the filters and threshold from a calibration stream.

        The stream must hold at least threshold_window + hp_window +
        lp_window samples.  No beats are emitted during training.  A
        flat/zero stream trains to threshold 0 and sets the
        ``degenerate_calibration`` flag.
        """
        if isinstance(calibration, Recording):
            values = calibration.values()
            timestamps = calibration.timestamps()
        else:
            samples = list(calibration)
            values = [s.value for s in samples]
            timestamps = [s.timestamp_ms for s in samples]
        cfg = self.config
        minimum = cfg.threshold_window + cfg.hp_window + cfg.lp_window
        if len(values) < minimum:
            raise TrainingError(
                f"calibration stream too short: {len(values)} samples, "
                f"minimum is {minimum}")
        self._kernel.emit_enabled = False
        self._kernel.process(values, timestamps)
        self._kernel.end_training()
        self.degenerate_calibration = self._kernel.threshold <= 0.0
        # live samples establish a fresh index origin after training
        self._expected_index = None
        return self


def ibi_stats(beats) -> "IbiStats":
    """Interbeat-interval statistics over a beat sequence.

    Needs at least 2 beats.  sdnn_ms is the population standard
    deviation of the intervals.
    """
    beats = list(beats)
    if len(beats) < 2:
        raise InsufficientDataError(
            f"need at least 2 beats for IBI statistics, got {len(beats)}")
    ibis = [b.ibi_ms for b in beats[1:] if b.ibi_ms is not None]
    if len(ibis) < 1:
        raise InsufficientDataError("beats carry no interbeat intervals")
    mean_ibi = sum(ibis) / len(ibis)
    var = sum((x - mean_ibi) ** 2 for x in ibis) / len(ibis)
    return IbiStats(
        mean_hr_bpm=60000.0 / mean_ibi,
        mean_ibi_ms=mean_ibi,
        sdnn_ms=math.sqrt(var),
        count=len(beats),
    )


@dataclass(frozen=True)
class IbiStats:
    mean_hr_bpm: float
    mean_ibi_ms: float
    sdnn_ms: float
    count: int
