"""Synthetic ECG generator: determinism, counts, morphology bounds."""

import pytest
from hypothesis import given, settings, strategies as st

from beatstream import SyntheticEcgSpec, generate
from beatstream.errors import ConfigError
from beatstream.synth import ADC_MAX


def test_deterministic_for_seed():
    spec = SyntheticEcgSpec(duration_s=20, mean_hr_bpm=70, noise_std=10,
                            hr_jitter_pct=0.05, seed=99)
    a = generate(spec)
    b = generate(spec)
    assert a.samples == b.samples
    assert a.annotations == b.annotations


def test_70bpm_60s_clean_counts(clean_70bpm_60s):
    anns = clean_70bpm_60s.annotations
    assert abs(len(anns) - 70) <= 1
    diffs = [b.beat_timestamp_ms - a.beat_timestamp_ms
             for a, b in zip(anns, anns[1:])]
    assert all(abs(d - 857.14) <= 5 for d in diffs)


def test_paper_scale_counts(make_recording):
    rec = make_recording(duration_s=303.0, mean_hr_bpm=68.7, seed=11)
    assert abs(len(rec.annotations) - 347) <= 1


def test_values_stay_in_adc_range(make_recording):
    rec = make_recording(duration_s=30.0, mean_hr_bpm=70.0, seed=3,
                         noise_std=30.0, baseline_wander_amp=40.0,
                         burst_artifacts=((10.0, 2.0, 2000.0),))
    values = rec.values()
    assert min(values) >= 0
    assert max(values) <= ADC_MAX


def test_burst_saturates_signal(make_recording):
    rec = make_recording(duration_s=30.0, mean_hr_bpm=70.0, seed=3,
                         burst_artifacts=((10.0, 2.0, 2000.0),))
    inside = [s.value for s in rec.samples[10 * 250:12 * 250]]
    railed = sum(1 for v in inside if v in (0, ADC_MAX))
    assert railed / len(inside) > 0.5


def test_sample_indices_contiguous_timestamps_regular(clean_70bpm_60s):
    samples = clean_70bpm_60s.samples
    assert [s.index for s in samples[:100]] == list(range(100))
    assert all(s.timestamp_ms == s.index * 4 for s in samples[:1000])


def test_annotations_strictly_increasing_with_spacing_floor():
    spec = SyntheticEcgSpec(duration_s=60, mean_hr_bpm=180,
                            hr_jitter_pct=0.2, seed=8)
    rec = generate(spec)
    anns = rec.annotations
    for a, b in zip(anns, anns[1:]):
        assert b.beat_index > a.beat_index
        assert b.beat_timestamp_ms - a.beat_timestamp_ms >= 200


@settings(max_examples=25, deadline=None)
@given(hr=st.floats(min_value=40, max_value=120),
       jitter=st.floats(min_value=0.0, max_value=0.1),
       seed=st.integers(min_value=0, max_value=10**6))
def test_beat_count_tracks_rate(hr, jitter, seed):
    # the +-1 count claim holds while the 0.8 s lead margins stay
    # well under two interbeat intervals, i.e. up to ~120 bpm
    spec = SyntheticEcgSpec(duration_s=30.0, mean_hr_bpm=hr,
                            hr_jitter_pct=jitter, seed=seed)
    rec = generate(spec)
    assert abs(len(rec.annotations) - 30.0 * hr / 60.0) <= 1.5


@pytest.mark.parametrize("kwargs", [
    {"mean_hr_bpm": 20},
    {"mean_hr_bpm": 300},
    {"hr_jitter_pct": 0.5},
    {"duration_s": -1},
    {"noise_std": -2},
])
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ConfigError):
        SyntheticEcgSpec(**kwargs)
