# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled streaming kernel (hot path).

Mirror of ``_kernel_py.DetectorKernel``: identical operations in
identical order, so output is bit-identical to the pure-Python
backend.  Compiled with -ffp-contract=off to keep IEEE semantics.
"""

from libc.stdlib cimport calloc, free


cdef class DetectorKernel:
    cdef readonly int hp_window
    cdef readonly int lp_window
    cdef readonly int threshold_window
    cdef readonly double update_rate
    cdef readonly double peak_fraction
    cdef readonly int refractory_samples
    cdef readonly int delay_samples

    cdef double* _x_ring
    cdef double _hp_sum
    cdef double* _abs_ring
    cdef double _env_sum
    cdef long long* _ts_ring

    cdef readonly long long steps
    cdef readonly double threshold
    cdef readonly double window_peak
    cdef readonly int window_pos
    cdef public bint trained
    cdef public bint emit_enabled
    cdef readonly long long emit_floor_step

    cdef double _prev_env
    cdef bint _in_peak
    cdef double _region_max
    cdef long long _region_peak_step
    cdef long long _region_peak_ts
    cdef bint _beat_seen
    cdef long long _last_beat_step

    def __cinit__(self, int hp_window, int lp_window, int threshold_window,
                  double update_rate, double peak_fraction,
                  int refractory_samples, int delay_samples):
        self.hp_window = hp_window
        self.lp_window = lp_window
        self.threshold_window = threshold_window
        self.update_rate = update_rate
        self.peak_fraction = peak_fraction
        self.refractory_samples = refractory_samples
        self.delay_samples = delay_samples

        self._x_ring = <double*>calloc(hp_window, sizeof(double))
        self._abs_ring = <double*>calloc(lp_window, sizeof(double))
        self._ts_ring = <long long*>calloc(delay_samples + 1, sizeof(long long))
        if self._x_ring == NULL or self._abs_ring == NULL or self._ts_ring == NULL:
            raise MemoryError()

        self._hp_sum = 0.0
        self._env_sum = 0.0
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

    def __dealloc__(self):
        free(self._x_ring)
        free(self._abs_ring)
        free(self._ts_ring)

    cdef inline tuple _step(self, double value, long long timestamp_ms):
        cdef long long n = self.steps
        cdef int m = self.hp_window
        cdef int ts_size = self.delay_samples + 1
        cdef long long slot, ps
        cdef double old, center, hp, a, env, theta
        cdef object beat = None

        slot = n % m
        old = self._x_ring[slot]
        self._x_ring[slot] = value
        self._hp_sum = self._hp_sum + value - old
        if n + 1 >= m:
            center = self._x_ring[(n - (m - 1) // 2) % m]
            hp = center - self._hp_sum / m
        else:
            hp = 0.0

        self._ts_ring[n % ts_size] = timestamp_ms

        a = hp if hp >= 0.0 else -hp
        slot = n % self.lp_window
        old = self._abs_ring[slot]
        self._abs_ring[slot] = a
        self._env_sum = self._env_sum + a - old
        env = self._env_sum
        if env < 0.0:
            env = 0.0
            self._env_sum = 0.0

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
        return (hp, env, beat)

    def step(self, value, timestamp_ms):
        """Advance one sample; returns (hp, envelope, beat-or-None)."""
        return self._step(value, timestamp_ms)

    def process(self, values, timestamps):
        """Feed a block; returns (hp_list, env_list, beats) like the
        pure backend: beats are (fire_step, peak_step, peak_ts) triples."""
        cdef Py_ssize_t i, count = len(values)
        cdef double* vals = <double*>calloc(count if count else 1, sizeof(double))
        cdef long long* tss = <long long*>calloc(count if count else 1, sizeof(long long))
        if vals == NULL or tss == NULL:
            free(vals)
            free(tss)
            raise MemoryError()
        cdef list hp_out = []
        cdef list env_out = []
        cdef list beats = []
        cdef tuple r
        try:
            for i in range(count):
                vals[i] = values[i]
                tss[i] = timestamps[i]
            for i in range(count):
                r = self._step(vals[i], tss[i])
                hp_out.append(r[0])
                env_out.append(r[1])
                if r[2] is not None:
                    beats.append((self.steps - 1, r[2][0], r[2][1]))
        finally:
            free(vals)
            free(tss)
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
        cdef long long n = self.steps
        cdef long long k
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
