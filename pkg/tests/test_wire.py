"""Wire protocol framing: encode/decode round trips, errors, resync."""

import json
import pathlib
import random

import pytest
from hypothesis import given, strategies as st

from beatstream import (Info, SampleFrame, StreamDecoder, Trigger,
                        decode_frame, encode_frame)
from beatstream.errors import (FieldCountError, FieldValueError,
                               FrameDecodeError, MissingNewlineError,
                               UnknownTagError)

DATA = pathlib.Path(__file__).parent / "data"


class TestEncode:
    def test_trigger(self):
        assert encode_frame(Trigger(12, 34567)) == b"T,12,34567\n"

    def test_sample(self):
        assert encode_frame(SampleFrame(100, 512)) == b"S,100,512\n"

    def test_info(self):
        assert encode_frame(Info("trained")) == b"I,trained\n"

    def test_info_rejects_commas_and_control(self):
        with pytest.raises(ValueError):
            Info("a,b")
        with pytest.raises(ValueError):
            Info("a\tb")

    def test_negative_fields_rejected(self):
        with pytest.raises(ValueError):
            Trigger(-1, 0)
        with pytest.raises(ValueError):
            SampleFrame(0, -2)


class TestDecode:
    def test_trigger_round(self):
        assert decode_frame(b"T,12,34567\n") == Trigger(12, 34567)

    def test_unknown_tag(self):
        with pytest.raises(UnknownTagError):
            decode_frame(b"X,1\n")

    def test_field_count(self):
        with pytest.raises(FieldCountError):
            decode_frame(b"T,1\n")
        with pytest.raises(FieldCountError):
            decode_frame(b"S,1,2,3\n")

    def test_field_value(self):
        with pytest.raises(FieldValueError):
            decode_frame(b"T,x,1\n")
        with pytest.raises(FieldValueError):
            decode_frame(b"T,1,-5\n")

    def test_missing_newline(self):
        with pytest.raises(MissingNewlineError):
            decode_frame(b"T,1,2")

    def test_crlf_tolerated(self):
        assert decode_frame(b"T,1,2\r\n") == Trigger(1, 2)


def roundtrip_thousand_seeded_frames():
    """Shared by the unit and acceptance suites: 1000 generated frames
    must survive encode -> decode unchanged."""
    rng = random.Random(20240101)
    frames = []
    for _ in range(1000):
        kind = rng.randrange(3)
        if kind == 0:
            frames.append(Trigger(rng.randrange(10**6),
                                  rng.randrange(10**9)))
        elif kind == 1:
            frames.append(SampleFrame(rng.randrange(10**9),
                                      rng.randrange(1024)))
        else:
            text = "".join(rng.choice(
                "abcdefghijklmnopqrstuvwxyz -_.:") for _ in range(12))
            frames.append(Info(text))
    for frame in frames:
        assert decode_frame(encode_frame(frame)) == frame


class TestRoundTrip:
    @given(st.integers(min_value=0, max_value=2**40),
           st.integers(min_value=0, max_value=2**40))
    def test_trigger_property(self, seq, ts):
        assert decode_frame(encode_frame(Trigger(seq, ts))) == Trigger(seq, ts)

    @given(st.text(alphabet=st.characters(min_codepoint=0x20,
                                          max_codepoint=0x7E,
                                          exclude_characters=","),
                   max_size=60))
    def test_info_property(self, text):
        assert decode_frame(encode_frame(Info(text))) == Info(text)

    def test_thousand_seeded_frames(self):
        roundtrip_thousand_seeded_frames()


class TestStreamDecoder:
    def test_resync_after_garbage(self):
        dec = StreamDecoder()
        out = dec.feed(b"\x01\x02 not a frame\n" + b"T,0,0\n")
        assert len(out) == 2
        assert isinstance(out[0], FrameDecodeError)
        assert out[1] == Trigger(0, 0)

    def test_partial_lines_buffer(self):
        dec = StreamDecoder()
        assert dec.feed(b"T,5,1") == []
        assert dec.feed(b"00\nS,8") == [Trigger(5, 100)]
        assert dec.feed(b",9\n") == [SampleFrame(8, 9)]
        assert dec.end() == []

    def test_truncated_tail_reported_at_end(self):
        dec = StreamDecoder()
        dec.feed(b"T,1,2\nT,3,4")
        tail = dec.end()
        assert len(tail) == 1
        assert isinstance(tail[0], MissingNewlineError)

    def test_vector_file_conformance(self):
        raw = (DATA / "wire_vectors.bin").read_bytes()
        expected = json.loads(
            (DATA / "wire_vectors_expected.json").read_text())
        dec = StreamDecoder()
        events = dec.feed(raw) + dec.end()
        assert len(events) == len(expected)
        kind_names = {UnknownTagError: "unknown_tag",
                      FieldCountError: "field_count",
                      FieldValueError: "field_value",
                      MissingNewlineError: "missing_newline"}
        for got, want in zip(events, expected):
            if want["type"] == "trigger":
                assert got == Trigger(want["seq"], want["timestamp_ms"])
            elif want["type"] == "sample":
                assert got == SampleFrame(want["timestamp_ms"], want["adc"])
            elif want["type"] == "info":
                assert got == Info(want["text"])
            else:
                assert isinstance(got, FrameDecodeError)
                assert kind_names[type(got)] == want["kind"]
