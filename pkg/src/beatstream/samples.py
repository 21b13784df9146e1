"""Signal atoms: raw samples, ground-truth beat marks, recordings."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RawSample:
    """One timestamped ADC reading.

    Within a session ``index`` increases by exactly 1 per sample and
    ``timestamp_ms`` is non-decreasing (consecutive samples differ by
    about 1000/sample_rate_hz ms).  ``value`` lies in [0, adc_max].
    """

    index: int
    timestamp_ms: int
    value: int


@dataclass(frozen=True)
class Annotation:
    """Ground-truth R-peak position (sample index + its timestamp)."""

    beat_index: int
    beat_timestamp_ms: int


@dataclass(frozen=True)
class RecordingMeta:
    sample_rate_hz: int | None = None
    source: str = ""


@dataclass
class Recording:
    """A replayable sample sequence with optional ground-truth beat marks.

    Sample indices are contiguous from 0.
    """

    samples: list[RawSample]
    annotations: list[Annotation] | None = None
    meta: RecordingMeta = field(default_factory=RecordingMeta)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_ms(self) -> int:
        return self.samples[-1].timestamp_ms if self.samples else 0

    def values(self) -> list[int]:
        return [s.value for s in self.samples]

    def timestamps(self) -> list[int]:
        return [s.timestamp_ms for s in self.samples]
