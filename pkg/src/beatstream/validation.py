"""Detection-vs-annotation matching and performance metrics.

Beat detection has no defined true negatives, so the usual QRS
convention is followed: the second reported rate is positive
predictive value, labelled "PPV (specificity)" in reports.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientDataError, UndefinedMetricError, UnsortedInputError


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    # (annotation, detection, delta_ms = detection - annotation) triples
    matched_pairs: tuple


def match_beats(detections, annotations, tol_ms: float) -> MatchResult:
    """One-to-one in-order matching within +/- tol_ms.

    Both sequences must be time-sorted.  Each annotation is paired with
    the earliest unmatched detection inside the tolerance window, which
    yields a maximum-cardinality matching: swapping the two inputs
    swaps fp and fn.  Unpaired detections count as false positives,
    unpaired annotations as false negatives.
    """
    if tol_ms <= 0:
        raise ValueError("tol_ms must be positive")
    det_ts = [d.peak_timestamp_ms for d in detections]
    ann_ts = [a.beat_timestamp_ms for a in annotations]
    if any(det_ts[i] > det_ts[i + 1] for i in range(len(det_ts) - 1)):
        raise UnsortedInputError("detections are not time-sorted")
    if any(ann_ts[i] > ann_ts[i + 1] for i in range(len(ann_ts) - 1)):
        raise UnsortedInputError("annotations are not time-sorted")

    pairs = []
    j = 0
    for i, ann in enumerate(annotations):
        t = ann_ts[i]
        while j < len(det_ts) and det_ts[j] < t - tol_ms:
            j += 1
        if j < len(det_ts) and det_ts[j] <= t + tol_ms:
            pairs.append((ann, detections[j], float(det_ts[j] - t)))
            j += 1
    tp = len(pairs)
    return MatchResult(tp=tp,
                       fp=len(detections) - tp,
                       fn=len(annotations) - tp,
                       matched_pairs=tuple(pairs))


def sensitivity(m: MatchResult) -> float:
    """TP / (TP + FN): fraction of true beats detected."""
    if m.tp + m.fn == 0:
        raise UndefinedMetricError("no annotations: sensitivity undefined")
    return m.tp / (m.tp + m.fn)


def ppv(m: MatchResult) -> float:
    """TP / (TP + FP): fraction of detections that are true beats."""
    if m.tp + m.fp == 0:
        raise UndefinedMetricError("no detections: PPV undefined")
    return m.tp / (m.tp + m.fp)


@dataclass(frozen=True)
class DetectionMetrics:
    sensitivity: float
    ppv: float


def metrics(m: MatchResult) -> DetectionMetrics:
    """Both rates at once; raises UndefinedMetricError if either
    denominator is zero (use sensitivity()/ppv() for partial results)."""
    return DetectionMetrics(sensitivity(m), ppv(m))


@dataclass(frozen=True)
class LatencyStats:
    """Detection-time offsets over matched pairs.

    median_ms is the signed median of (detection - annotation);
    median_abs_ms, p95_ms and max_ms are over the absolute offsets.
    """

    median_ms: float
    median_abs_ms: float
    p95_ms: float
    max_ms: float


def _percentile(sorted_values, q: float) -> float:
    # linear interpolation between closest ranks
    if len(sorted_values) == 1:
        return float(sorted_values[0])
    pos = q * (len(sorted_values) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(sorted_values) - 1)
    frac = pos - lo
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac


def latency_stats(m: MatchResult) -> LatencyStats:
    if not m.matched_pairs:
        raise InsufficientDataError("no matched pairs: latency undefined")
    deltas = sorted(p[2] for p in m.matched_pairs)
    abs_deltas = sorted(abs(d) for d in deltas)
    return LatencyStats(
        median_ms=_percentile(deltas, 0.5),
        median_abs_ms=_percentile(abs_deltas, 0.5),
        p95_ms=_percentile(abs_deltas, 0.95),
        max_ms=abs_deltas[-1],
    )
