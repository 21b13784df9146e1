"""Defining formulas of the two filter stages, applied offline.

These are the reference semantics: the streaming kernels must agree
with them sample for sample (covered by the equivalence tests).  The
functions here favor clarity over speed; real-time paths go through
``beatstream.kernels``.
"""

from __future__ import annotations

from collections.abc import Sequence


def high_pass(values: Sequence[float], window: int) -> list[float]:
    """Baseline-removing high-pass: centered sample minus moving average.

    out[n] = x[n - (window-1)/2] - mean(x[n-window+1 .. n])

    The output is 0 until ``window`` samples have been seen.  A constant
    input therefore maps to 0 after warm-up, and slow baseline drift is
    strongly attenuated while sharp deflections pass.

    ``window`` must be odd so the delayed tap sits exactly on the
    window center.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    half = (window - 1) // 2
    out = []
    for n in range(len(values)):
        if n + 1 < window:
            out.append(0.0)
            continue
        acc = 0.0
        for k in range(window):
            acc += values[n - k]
        out.append(values[n - half] - acc / window)
    return out


def rectified_envelope(hp_values: Sequence[float], window: int) -> list[float]:
    """Rectified moving-sum envelope of a high-pass stream.

    out[n] = sum(|hp[n-k]| for k in 0..window-1), missing history counts
    as 0.  Rectification turns the bipolar high-pass output into a
    unipolar envelope without squaring, so the result is always >= 0
    and bounded by window * max|hp|.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    out = []
    for n in range(len(hp_values)):
        acc = 0.0
        for k in range(min(window, n + 1)):
            v = hp_values[n - k]
            acc += v if v >= 0.0 else -v
        out.append(acc)
    return out
