"""Savitzky-Golay smoothing for plot output.

Coefficients come from a direct least-squares fit per (window, order)
pair and are cached.  Interior points use the sliding-window
convolution; the half window at each edge is evaluated from a
least-squares polynomial fitted to the first/last full window, so the
filter reproduces polynomials up to its order exactly over the whole
output.  Output length equals input length, and the filter is linear.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _coefficients(window: int, polyorder: int) -> np.ndarray:
    # value at the window center of a least-squares polynomial fit:
    # first row of the design matrix pseudoinverse
    half = window // 2
    pos = np.arange(-half, half + 1, dtype=float)
    design = np.vander(pos, polyorder + 1, increasing=True)
    return np.linalg.pinv(design)[0]


@lru_cache(maxsize=32)
def _edge_fit_matrix(window: int, polyorder: int) -> np.ndarray:
    # maps a window of samples to the fitted polynomial's values over
    # that same window: design @ pinv(design)
    pos = np.arange(window, dtype=float)
    design = np.vander(pos, polyorder + 1, increasing=True)
    return design @ np.linalg.pinv(design)


def savitzky_golay(values, window: int, polyorder: int) -> np.ndarray:
    """Smooth a sequence; window must be odd and > polyorder >= 0,
    and the sequence at least window long."""
    if window % 2 == 0 or window < 1:
        raise ValueError("window must be odd")
    if polyorder < 0 or polyorder >= window:
        raise ValueError("need window > polyorder >= 0")
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if len(x) < window:
        raise ValueError(
            f"need at least {window} samples, got {len(x)}")
    half = window // 2
    coeffs = _coefficients(window, polyorder)
    out = np.convolve(x, coeffs[::-1], mode="same")
    fit = _edge_fit_matrix(window, polyorder)
    out[:half] = (fit @ x[:window])[:half]
    out[-half:] = (fit @ x[-window:])[-half:]
    return out
