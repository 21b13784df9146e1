"""Pure-Python streaming kernel (fallback backend).

Reference implementation of the per-sample pipeline: baseline-removing
high-pass, rectified moving-sum envelope, adaptive threshold with
refractory gating and delay-compensated peak localization.

The compiled twin in ``_kernel.pyx`` must perform the same operations
in the same order so both backends produce bit-identical output; any
change here has to be mirrored there.
"""

from __future__ import annotations


class DetectorKernel:
    """Per-sample filter/threshold state machine.

    The kernel counts its own steps starting at 0 and knows nothing
    about sample objects; callers feed (value, timestamp_ms) pairs and
    receive beats as (peak_step, peak_timestamp_ms) pairs, where
    peak_step is already compensated for the pipeline group delay.
    """

    def __init__(self, hp_window, lp_window, threshold_window,
                 update_rate, peak_fraction, refractory_samples,
                 delay_samples):
        self.hp_window = hp_window
        self.lp_window = lp_window
        self.threshold_window = threshold_window
        self.update_rate = update_rate
        self.peak_fraction = peak_fraction
        self.refractory_samples = refractory_samples
        self.delay_samples = delay_samples

        self._x_ring = [0.0] * hp_window
        self._hp_sum = 0.0
        self._abs_ring = [0.0] * lp_window
        self._env_sum = 0.0
        self._ts_ring = [0] * (delay_samples + 1)

        self.steps = 0
        self.threshold = 0.0
        self.window_peak = 0.0
        self.window_pos = 0
        self.trained = False
        self.emit_enabled = True
        self.emit_floor_step = 0

        self._prev_env = 0.0
        self._in_peak = False
        self._region_max = 0.0
        self._region_peak_step = 0
        self._region_peak_ts = 0
        self._beat_seen = False
        self._last_beat_step = 0

    def step(self, value, timestamp_ms):
        """Advance one sample.

        Returns (hp, envelope, beat) where beat is None or a
        (peak_step, peak_timestamp_ms) pair.
        """
        n = self.steps
        m = self.hp_window

        slot = n % m
        old = self._x_ring[slot]
        self._x_ring[slot] = value
        self._hp_sum = self._hp_sum + value - old
        if n + 1 >= m:
            center = self._x_ring[(n - (m - 1) // 2) % m]
            hp = center - self._hp_sum / m
        else:
            hp = 0.0

        ts_size = self.delay_samples + 1
        self._ts_ring[n % ts_size] = timestamp_ms

        a = hp if hp >= 0.0 else -hp
        slot = n % self.lp_window
        old = self._abs_ring[slot]
        self._abs_ring[slot] = a
        self._env_sum = self._env_sum + a - old
        env = self._env_sum
        if env < 0.0:
            # float dust from the running sum; both backends reset alike
            env = 0.0
            self._env_sum = 0.0

        beat = None
        theta = self.threshold
        if self._in_peak:
            if env > self._region_max:
                self._region_max = env
                ps = n - self.delay_samples
                if ps < 0:
                    ps = 0
                self._region_peak_step = ps
                self._region_peak_ts = self._ts_ring[ps % ts_size]
            if env <= theta:
                self._in_peak = False
                if (not self._beat_seen or
                        self._region_peak_step - self._last_beat_step
                        >= self.refractory_samples):
                    if (self.emit_enabled
                            and (self.trained or n >= self.threshold_window)
                            and self._region_peak_step >= self.emit_floor_step):
                        beat = (self._region_peak_step, self._region_peak_ts)
                        self._beat_seen = True
                        self._last_beat_step = self._region_peak_step
        elif env > theta and self._prev_env <= theta:
            self._in_peak = True
            self._region_max = env
            ps = n - self.delay_samples
            if ps < 0:
                ps = 0
            self._region_peak_step = ps
            self._region_peak_ts = self._ts_ring[ps % ts_size]
        self._prev_env = env

        if env > self.window_peak:
            self.window_peak = env
        self.window_pos += 1
        if self.window_pos >= self.threshold_window:
            self.threshold = (self.update_rate * self.peak_fraction
                              * self.window_peak
                              + (1.0 - self.update_rate) * self.threshold)
            self.window_peak = 0.0
            self.window_pos = 0

        self.steps = n + 1
        return hp, env, beat

    def process(self, values, timestamps):
        """Feed a block of samples; returns (hp_list, env_list, beats).

        Beats are (fire_step, peak_step, peak_timestamp_ms) triples;
        fire_step is the step at which the beat was emitted (the
        envelope's downward threshold crossing).
        """
        hp_out = []
        env_out = []
        beats = []
        step = self.step
        for i in range(len(values)):
            hp, env, beat = step(values[i], timestamps[i])
            hp_out.append(hp)
            env_out.append(env)
            if beat is not None:
                beats.append((self.steps - 1, beat[0], beat[1]))
        return hp_out, env_out, beats

    def end_training(self):
        """Mark training finished: close any open peak region, arm emission.

        Peaks localized within hp_window + lp_window samples of the
        training/live boundary are discarded: the filter rings still
        hold calibration data there, so a splice transient could
        otherwise fake a beat.
        """
        self.trained = True
        self.emit_enabled = True
        self._in_peak = False
        self.emit_floor_step = self.steps + self.hp_window + self.lp_window

    def state_snapshot(self):
        """Ordered copies of the filter rings plus threshold bookkeeping."""
        n = self.steps
        hp_buf = [self._x_ring[k % self.hp_window]
                  for k in range(max(0, n - self.hp_window), n)]
        lp_buf = [self._abs_ring[k % self.lp_window]
                  for k in range(max(0, n - self.lp_window), n)]
        return {
            "hp_buffer": hp_buf,
            "lp_buffer": lp_buf,
            "threshold": self.threshold,
            "window_peak": self.window_peak,
            "window_pos": self.window_pos,
            "last_beat_step": self._last_beat_step if self._beat_seen else None,
            "trained": self.trained,
        }
