"""Detector configuration."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class DetectorConfig:
    """Filter and threshold tunables for the streaming R-peak detector.

    All lengths are in samples at ``sample_rate_hz``.  The defaults are
    calibrated for 250 Hz input with R amplitudes around half the ADC
    range and pass the full acceptance suite; every value can be
    overridden to adjust for the quality of the incoming signal.

    hp_window
        Length of the centered moving-average window subtracted from
        the signal (baseline removal).  Must be odd so the window has
        an exact center.
    lp_window
        Length of the rectified moving-sum envelope window.
    threshold_window
        Number of samples per adaptive-threshold update window.
    update_rate
        Fraction of the new window-peak estimate blended into the
        threshold at each window boundary (exponential forgetting).
    peak_fraction
        Fraction of the tracked window peak the threshold aims at.
    refractory_ms
        Minimum spacing between detections; floored at 100 ms because
        two R-peaks cannot physiologically be closer.
    """

    sample_rate_hz: int = 250
    hp_window: int = 21
    lp_window: int = 15
    threshold_window: int = 375
    update_rate: float = 0.75
    peak_fraction: float = 0.45
    refractory_ms: float = 200.0
    adc_max: int = 1023

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ConfigError("sample_rate_hz must be positive")
        if self.hp_window < 3 or self.hp_window % 2 == 0:
            raise ConfigError("hp_window must be odd and >= 3")
        if self.lp_window < 1:
            raise ConfigError("lp_window must be >= 1")
        if self.threshold_window < self.lp_window:
            raise ConfigError("threshold_window must be >= lp_window")
        if not 0.0 < self.update_rate < 1.0:
            raise ConfigError("update_rate must be in (0, 1)")
        if not 0.0 < self.peak_fraction < 1.0:
            raise ConfigError("peak_fraction must be in (0, 1)")
        if self.refractory_ms < 100.0:
            raise ConfigError("refractory_ms must be >= 100 ms")
        if self.adc_max < 1:
            raise ConfigError("adc_max must be >= 1")

    @property
    def refractory_samples(self) -> int:
        """Refractory period in samples, rounded up so the ms floor holds."""
        import math

        return max(1, math.ceil(self.refractory_ms * self.sample_rate_hz / 1000.0))

    @property
    def group_delay_samples(self) -> int:
        """Pipeline group delay (hp_window - 1)/2 + (lp_window - 1)/2, floored."""
        return (self.hp_window - 1) // 2 + (self.lp_window - 1) // 2

    @property
    def ms_per_sample(self) -> float:
        return 1000.0 / self.sample_rate_hz
