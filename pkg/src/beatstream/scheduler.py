"""Beat-feedback scheduling.

Maps detected beats to feedback (tone/trigger) times that are
concurrent with the heartbeat, shifted by a fixed delay, or running
faster/slower by an interval scale factor.  Time is injected through
``now_ms`` so the scheduler never reads a clock and is fully
deterministic under test.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .detector import BeatEvent
from .errors import ConfigError


@dataclass(frozen=True)
class Sync:
    """Feedback exactly at each detected beat."""


@dataclass(frozen=True)
class Scaled:
    """Feedback chain at factor * last interbeat interval.

    factor < 1 plays faster than the heart, factor > 1 slower; the
    scaling applies to the interval (rate scales by its reciprocal).
    """

    factor: float

    def __post_init__(self):
        if self.factor <= 0:
            raise ConfigError("scale factor must be positive")


@dataclass(frozen=True)
class Delayed:
    """Feedback a fixed delay after each detected beat."""

    delay_ms: float

    def __post_init__(self):
        if self.delay_ms < 0:
            raise ConfigError("delay_ms must be non-negative")


FeedbackMode = Sync | Scaled | Delayed


@dataclass(frozen=True)
class ToneEvent:
    due_at_ms: float
    source_beat_seq: int
    mode: FeedbackMode


class BeatScheduler:
    """Single-owner scheduler driven by the runner loop.

    Sync and Delayed schedule one tone per beat.  Scaled keeps a
    self-continuing chain: each emitted tone schedules its successor
    one scaled interval later, and each new beat re-anchors the pending
    tone to (last emitted tone + factor * newest IBI), so the perceived
    rate tracks the heart without accumulating drift.  The first beat
    carries no IBI and schedules nothing in Scaled mode; the chain
    starts at the second beat's own timestamp.
    """

    def __init__(self, mode: FeedbackMode):
        self.mode = mode
        self._heap: list[tuple[float, int, ToneEvent]] = []
        self._counter = 0
        # Scaled-mode chain state
        self._ibi_ms: float | None = None
        self._last_beat_seq = 0
        self._last_emitted_due: float | None = None
        self._pending: ToneEvent | None = None

    def _push(self, tone: ToneEvent) -> None:
        heapq.heappush(self._heap, (tone.due_at_ms, self._counter, tone))
        self._counter += 1

    def on_beat(self, beat: BeatEvent) -> list[ToneEvent]:
        """Schedule feedback for one detected beat; returns the tones
        newly scheduled (or re-anchored) by this beat."""
        mode = self.mode
        if isinstance(mode, Sync):
            tone = ToneEvent(float(beat.peak_timestamp_ms), beat.seq, mode)
            self._push(tone)
            return [tone]
        if isinstance(mode, Delayed):
            tone = ToneEvent(beat.peak_timestamp_ms + mode.delay_ms,
                             beat.seq, mode)
            self._push(tone)
            return [tone]

        if beat.ibi_ms is None:
            return []
        self._ibi_ms = beat.ibi_ms
        self._last_beat_seq = beat.seq
        if self._pending is None and self._last_emitted_due is None:
            self._pending = ToneEvent(float(beat.peak_timestamp_ms),
                                      beat.seq, mode)
            return [self._pending]
        if self._last_emitted_due is not None:
            self._pending = ToneEvent(
                self._last_emitted_due + mode.factor * self._ibi_ms,
                beat.seq, mode)
            return [self._pending]
        # chain not started yet (bootstrap tone still pending): keep it
        return []

    def next_due(self, now_ms: float) -> ToneEvent | None:
        """Pop the earliest tone due at or before now_ms, else None.
        Repeated calls drain pending tones in due-time order."""
        if isinstance(self.mode, Scaled):
            tone = self._pending
            if tone is None or tone.due_at_ms > now_ms:
                return None
            self._last_emitted_due = tone.due_at_ms
            self._pending = ToneEvent(
                tone.due_at_ms + self.mode.factor * self._ibi_ms,
                self._last_beat_seq, self.mode)
            return tone
        if self._heap and self._heap[0][0] <= now_ms:
            return heapq.heappop(self._heap)[2]
        return None
