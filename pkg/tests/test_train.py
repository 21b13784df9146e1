"""Training behavior: priming, degenerate calibration, determinism."""

import pytest

from beatstream import Detector, DetectorConfig, RawSample
from beatstream.errors import TrainingError


def test_training_sets_threshold_and_flag(clean_70bpm_60s):
    det = Detector()
    det.train(clean_70bpm_60s.samples[:2000])
    assert det.trained
    assert det.state.threshold > 0.0
    assert not det.degenerate_calibration


def test_first_beat_within_2s_and_before_untrained(clean_70bpm_60s):
    def first_detection_ms(det):
        for s in clean_70bpm_60s.samples:
            out = det.process_sample(s)
            if out.beat:
                return out.beat.peak_timestamp_ms
        return None

    trained = Detector()
    trained.train(clean_70bpm_60s.samples[:2000])
    t_trained = first_detection_ms(trained)

    t_untrained = first_detection_ms(Detector())

    assert t_trained is not None
    assert t_trained <= 2000
    assert t_untrained is None or t_trained < t_untrained


def test_zero_calibration_flags_degenerate():
    det = Detector()
    det.train([RawSample(i, i * 4, 0) for i in range(1000)])
    assert det.trained
    assert det.state.threshold == 0.0
    assert det.degenerate_calibration


def test_training_twice_same_stream_same_threshold(clean_70bpm_60s):
    thetas = []
    for _ in range(2):
        det = Detector()
        det.train(clean_70bpm_60s.samples[:2000])
        thetas.append(det.state.threshold)
    assert thetas[0] == thetas[1]


def test_too_short_calibration_names_minimum():
    cfg = DetectorConfig()
    det = Detector(cfg)
    minimum = cfg.threshold_window + cfg.hp_window + cfg.lp_window
    with pytest.raises(TrainingError) as exc:
        det.train([RawSample(i, i * 4, 300) for i in range(minimum - 1)])
    assert str(minimum) in str(exc.value)


def test_no_beats_emitted_during_training(clean_70bpm_60s):
    det = Detector()
    det.train(clean_70bpm_60s.samples[:5000])
    assert det.beat_count == 0
