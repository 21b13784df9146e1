"""End-to-end runner and CLI behavior: replay, determinism, exit codes."""

import os

import pytest

from beatstream import DetectorConfig, RunConfig, run, validate_name
from beatstream.cli import main, write_recording_csv
from beatstream.errors import ConfigError
from beatstream.ingest import load_recording
from beatstream.runner import parse_synth_source
from beatstream.scheduler import Delayed, Sync


@pytest.fixture()
def synth_csv(tmp_path, clean_70bpm_60s):
    path = tmp_path / "clean70.csv"
    write_recording_csv(clean_70bpm_60s, path)
    return path


def run_replay(source, tmp_path, stem="RUN1", **overrides):
    config = RunConfig(
        source=str(source),
        log_name=validate_name(f"{stem}.csv"),
        log_dir=str(tmp_path),
        wire=str(tmp_path / f"{stem}.wire"),
        **overrides,
    )
    summary = run(config)
    wire_bytes = (tmp_path / f"{stem}.wire").read_bytes()
    log_bytes = (tmp_path / f"{stem}.csv").read_bytes()
    return summary, wire_bytes, log_bytes


class TestReplayRun:
    def test_beat_count_and_trigger_lines(self, synth_csv, tmp_path,
                                          clean_70bpm_60s):
        summary, wire, _ = run_replay(synth_csv, tmp_path)
        lines = wire.decode().splitlines()
        triggers = [ln for ln in lines if ln.startswith("T,")]
        assert abs(len(triggers) - 70) <= 1
        assert summary.beats == len(triggers)
        assert summary.samples == len(clean_70bpm_60s.samples)

    def test_trigger_seqs_gapless(self, synth_csv, tmp_path):
        _, wire, _ = run_replay(synth_csv, tmp_path, stem="RUN2")
        seqs = [int(ln.split(",")[1]) for ln in wire.decode().splitlines()
                if ln.startswith("T,")]
        assert seqs == list(range(len(seqs)))

    def test_summary_equals_wire_equals_log(self, synth_csv, tmp_path):
        summary, wire, _ = run_replay(synth_csv, tmp_path, stem="RUN3")
        triggers = sum(1 for ln in wire.decode().splitlines()
                       if ln.startswith("T,"))
        log = load_recording(tmp_path / "RUN3.csv")
        assert summary.beats == triggers == len(log.annotations)

    def test_replay_determinism_bytes(self, synth_csv, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        a = run_replay(synth_csv, tmp_path / "a", stem="DET")
        b = run_replay(synth_csv, tmp_path / "b", stem="DET")
        assert a[0] == b[0]
        assert a[1] == b[1]
        assert a[2] == b[2]

    def test_log_beats_match_annotations(self, synth_csv, tmp_path,
                                         clean_70bpm_60s):
        from beatstream import Annotation, BeatEvent, match_beats

        _, _, _ = run_replay(synth_csv, tmp_path, stem="RUN4")
        log = load_recording(tmp_path / "RUN4.csv")
        detections = [BeatEvent(i, a.beat_index, a.beat_timestamp_ms, None)
                      for i, a in enumerate(log.annotations)]
        m = match_beats(detections, clean_70bpm_60s.annotations, 75.0)
        assert m.fn == 0 and m.fp == 0

    def test_synth_source_inline(self, tmp_path):
        summary, wire, _ = run_replay(
            "synth:duration_s=20,mean_hr_bpm=70,seed=4", tmp_path,
            stem="RUN5")
        assert summary.beats >= 20

    def test_stream_raw_emits_sample_frames(self, tmp_path):
        summary, wire, _ = run_replay(
            "synth:duration_s=10,mean_hr_bpm=70,seed=4", tmp_path,
            stem="RUN6", stream_raw=True)
        lines = wire.decode().splitlines()
        assert sum(1 for ln in lines if ln.startswith("S,")) == \
               summary.samples

    def test_scheduler_tones_counted(self, tmp_path):
        summary, wire, _ = run_replay(
            "synth:duration_s=30,mean_hr_bpm=70,seed=4", tmp_path,
            stem="RUN7", mode=Sync(), emit_tones=True)
        assert summary.tones == summary.beats
        info = [ln for ln in wire.decode().splitlines()
                if ln.startswith("I,tone")]
        assert len(info) == summary.tones

    def test_delayed_tones_lag_beats(self, tmp_path):
        summary, wire, _ = run_replay(
            "synth:duration_s=30,mean_hr_bpm=70,seed=4", tmp_path,
            stem="RUN8", mode=Delayed(250.0), emit_tones=True)
        lines = wire.decode().splitlines()
        trigger_ts = [int(ln.split(",")[2]) for ln in lines
                      if ln.startswith("T,")]
        tone_due = [int(ln.rsplit(" ", 1)[1]) for ln in lines
                    if ln.startswith("I,tone")]
        assert tone_due == [t + 250 for t in trigger_ts[:len(tone_due)]]

    def test_probe_sees_trigger_in_same_tick(self, synth_csv, tmp_path):
        events = []
        config = RunConfig(source=str(synth_csv),
                           wire=str(tmp_path / "probe.wire"))
        run(config, probe=lambda kind, tick, seq: events.append(
            (kind, tick, seq)))
        beats = {seq: tick for kind, tick, seq in events if kind == "beat"}
        triggers = {seq: tick for kind, tick, seq in events
                    if kind == "trigger"}
        assert beats and beats == triggers

    def test_needs_log_or_wire(self):
        with pytest.raises(ConfigError):
            RunConfig(source="x.csv")

    def test_log_beats_only(self, synth_csv, tmp_path):
        summary, _, _ = run_replay(synth_csv, tmp_path, stem="RUN9",
                                   log_beats_only=True)
        lines = (tmp_path / "RUN9.csv").read_text().splitlines()[1:]
        assert len(lines) == summary.beats
        assert all(ln.endswith(",1") for ln in lines)

    def test_live_wire_source(self, tmp_path, clean_70bpm_60s):
        feed = tmp_path / "feed.bin"
        payload = bytearray()
        for s in clean_70bpm_60s.samples[:6000]:
            payload += f"S,{s.timestamp_ms},{s.value}\n".encode()
        payload += b"garbage line\n"
        feed.write_bytes(payload)
        config = RunConfig(source=f"wire:{feed}",
                           wire=str(tmp_path / "out.wire"),
                           train_seconds=4.0)
        summary = run(config)
        # 1000 samples consumed by training, the rest processed
        assert summary.samples == 5000
        assert summary.errors == 1
        assert summary.beats > 0


class TestSynthSourceParsing:
    def test_round_trip_keys(self):
        spec = parse_synth_source(
            "synth:duration_s=12,mean_hr_bpm=80,seed=3,noise_std=5")
        assert spec.duration_s == 12.0
        assert spec.mean_hr_bpm == 80.0
        assert spec.seed == 3
        assert spec.noise_std == 5.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_synth_source("synth:bogus=1")


class TestCli:
    def test_synth_deterministic_bytes(self, tmp_path, capsys):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        for out in (out_a, out_b):
            assert main(["synth", "--out", str(out), "--duration-s", "20",
                         "--mean-hr-bpm", "70", "--seed", "9"]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_run_then_validate_perfect(self, tmp_path, capsys):
        truth = tmp_path / "truth.csv"
        assert main(["synth", "--out", str(truth), "--duration-s", "30",
                     "--mean-hr-bpm", "70", "--seed", "21"]) == 0
        assert main(["run", "--source", str(truth),
                     "--log", "SES1.csv", "--log-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        assert main(["validate",
                     "--detections", str(tmp_path / "SES1.csv"),
                     "--annotations", str(truth)]) == 0
        report = capsys.readouterr().out
        assert "sensitivity 1.000000" in report
        assert "ppv_specificity 1.000000" in report

    def test_validate_tolerance_monotonic(self, tmp_path, capsys):
        truth = tmp_path / "truth.csv"
        main(["synth", "--out", str(truth), "--duration-s", "30",
              "--mean-hr-bpm", "70", "--seed", "22"])
        main(["run", "--source", str(truth), "--log", "SES2.csv",
              "--log-dir", str(tmp_path)])
        capsys.readouterr()

        def sens_at(tol):
            main(["validate", "--detections", str(tmp_path / "SES2.csv"),
                  "--annotations", str(truth), "--tol-ms", str(tol)])
            out = capsys.readouterr().out
            return float([ln for ln in out.splitlines()
                          if ln.startswith("sensitivity")][0].split()[1])

        assert sens_at(0.001) <= sens_at(75.0)

    def test_unwritable_log_dir_exit_4_no_partial(self, tmp_path, synth_csv,
                                                  capsys):
        bogus_dir = tmp_path / "file_not_dir"
        bogus_dir.write_text("block")
        code = main(["run", "--source", str(synth_csv), "--log", "X.csv",
                     "--log-dir", str(bogus_dir)])
        assert code == 4
        assert not (tmp_path / "file_not_dir" / "X.csv").exists()

    def test_bad_mode_exit_2(self, synth_csv, capsys):
        assert main(["run", "--source", str(synth_csv), "--wire", "off",
                     "--log", "Y.csv", "--mode", "warp"]) == 2

    def test_bad_log_name_exit_2(self, synth_csv, capsys):
        assert main(["run", "--source", str(synth_csv),
                     "--log", "toolongname.csv"]) == 2

    def test_missing_source_exit_3(self, tmp_path, capsys):
        assert main(["run", "--source", str(tmp_path / "ghost.csv"),
                     "--wire", str(tmp_path / "w.bin")]) == 3

    def test_plot_constant_log(self, tmp_path, capsys):
        log = tmp_path / "const.csv"
        log.write_text(
            "datetime,elapsed_ms,sample_index,adc,beat\n" + "".join(
                f"1970-01-01T00:00:00Z,{4 * i},{i},500,0\n"
                for i in range(100)))
        out = tmp_path / "plot.csv"
        assert main(["plot", "--log", str(log), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "time_ms,value"
        values = {ln.split(",")[1] for ln in lines[1:]}
        assert values == {"500.000000"}

    def test_plot_marks_beats(self, tmp_path, synth_csv, capsys):
        out = tmp_path / "plot.csv"
        assert main(["plot", "--log", str(synth_csv),
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()[1:]
        times = [ln.split(",")[0] for ln in lines]
        # beat markers duplicate their sample's timestamp
        assert len(times) > len(set(times))

    def test_config_file_flags_win(self, tmp_path, synth_csv, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text("train-seconds=8\nwire=off\n")
        wire = tmp_path / "w.bin"
        code = main(["run", "--source", str(synth_csv), "--config",
                     str(cfg), "--wire", str(wire)])
        assert code == 0
        assert wire.exists()  # flag overrode wire=off from the file

    def test_config_file_unknown_key_exit_2(self, tmp_path, synth_csv):
        cfg = tmp_path / "run.conf"
        cfg.write_text("warp-drive=1\n")
        assert main(["run", "--source", str(synth_csv), "--config",
                     str(cfg), "--wire", "off", "--log", "Z.csv"]) == 2

    def test_run_summary_on_stdout(self, tmp_path, synth_csv, capsys):
        assert main(["run", "--source", str(synth_csv),
                     "--wire", str(tmp_path / "w.bin")]) == 0
        out = capsys.readouterr().out
        assert out.startswith("summary beats=")

    def test_raw_source(self, tmp_path, clean_70bpm_60s, capsys):
        raw = tmp_path / "sig.raw"
        raw.write_text("".join(f"{s.value}\n"
                               for s in clean_70bpm_60s.samples))
        assert main(["run", "--source", str(raw),
                     "--wire", str(tmp_path / "w.bin"),
                     "--sample-rate-hz", "250"]) == 0
        out = capsys.readouterr().out
        beats = int(out.split("beats=")[1].split()[0])
        assert abs(beats - 70) <= 1

    def test_wire_open_failure_exit_5(self, synth_csv, tmp_path, capsys):
        assert main(["run", "--source", str(synth_csv), "--wire",
                     str(tmp_path / "no_dir" / "w.bin")]) == 5
