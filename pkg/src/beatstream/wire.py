"""Line-based trigger protocol.

Newline-terminated ASCII frames, one per line:

    T,<seq>,<timestamp_ms>    beat trigger
    S,<timestamp_ms>,<adc>    raw sample (optional streaming)
    I,<text>                  informational message

The format is deliberately inspectable and cheap to parse from any
language that can read serial lines; throughput is at most a few KB/s
even with raw-sample streaming enabled.  decode_frame is the exact
inverse of encode_frame; a stream decoder recovers from garbage at the
next newline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (FieldCountError, FieldValueError, FrameDecodeError,
                     MissingNewlineError, UnknownTagError, WireError)


def _check_uint(value: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer")


@dataclass(frozen=True)
class Trigger:
    seq: int
    timestamp_ms: int

    def __post_init__(self):
        _check_uint(self.seq, "seq")
        _check_uint(self.timestamp_ms, "timestamp_ms")


@dataclass(frozen=True)
class SampleFrame:
    timestamp_ms: int
    adc: int

    def __post_init__(self):
        _check_uint(self.timestamp_ms, "timestamp_ms")
        _check_uint(self.adc, "adc")


@dataclass(frozen=True)
class Info:
    text: str

    def __post_init__(self):
        if "," in self.text:
            raise ValueError("info text must not contain commas")
        if any(ord(c) < 0x20 or ord(c) == 0x7F for c in self.text):
            raise ValueError("info text must not contain control characters")


Frame = Trigger | SampleFrame | Info


def encode_frame(frame: Frame) -> bytes:
    if isinstance(frame, Trigger):
        return f"T,{frame.seq},{frame.timestamp_ms}\n".encode("ascii")
    if isinstance(frame, SampleFrame):
        return f"S,{frame.timestamp_ms},{frame.adc}\n".encode("ascii")
    if isinstance(frame, Info):
        return f"I,{frame.text}\n".encode("ascii")
    raise TypeError(f"not a frame: {frame!r}")


def _parse_uint(field: bytes) -> int:
    if not field or not field.isdigit():
        raise FieldValueError(f"not a non-negative integer: {field!r}")
    return int(field)


def decode_frame(line: bytes) -> Frame:
    """Decode one newline-terminated frame line.

    Raises a FrameDecodeError subclass naming what went wrong:
    MissingNewlineError, UnknownTagError, FieldCountError or
    FieldValueError.  A trailing CR before the LF is tolerated.
    """
    if not line.endswith(b"\n"):
        raise MissingNewlineError(f"frame line lacks newline: {line!r}")
    body = line[:-1]
    if body.endswith(b"\r"):
        body = body[:-1]
    fields = body.split(b",")
    tag = fields[0]
    if tag == b"T":
        if len(fields) != 3:
            raise FieldCountError(
                f"T frame needs 3 fields, got {len(fields)}")
        return Trigger(_parse_uint(fields[1]), _parse_uint(fields[2]))
    if tag == b"S":
        if len(fields) != 3:
            raise FieldCountError(
                f"S frame needs 3 fields, got {len(fields)}")
        return SampleFrame(_parse_uint(fields[1]), _parse_uint(fields[2]))
    if tag == b"I":
        if len(fields) != 2:
            raise FieldCountError(
                f"I frame needs 2 fields, got {len(fields)}")
        try:
            text = fields[1].decode("ascii")
            return Info(text)
        except (UnicodeDecodeError, ValueError) as exc:
            raise FieldValueError(f"bad info text: {fields[1]!r}") from exc
    raise UnknownTagError(f"unknown frame tag {tag!r}")


class StreamDecoder:
    """Incremental decoder over an arbitrary byte stream.

    feed() returns the decoded frames and the decode errors encountered,
    in stream order; after a malformed line the decoder resumes at the
    next newline.  Call end() when the stream closes to flag a
    truncated trailing line.
    """

    def __init__(self):
        self._buf = bytearray()
        self.frames_decoded = 0
        self.errors = 0

    def feed(self, data: bytes) -> list[Frame | FrameDecodeError]:
        self._buf.extend(data)
        out: list[Frame | FrameDecodeError] = []
        while True:
            nl = self._buf.find(b"\n")
            if nl < 0:
                break
            line = bytes(self._buf[:nl + 1])
            del self._buf[:nl + 1]
            try:
                out.append(decode_frame(line))
                self.frames_decoded += 1
            except FrameDecodeError as exc:
                self.errors += 1
                out.append(exc)
        return out

    def end(self) -> list[FrameDecodeError]:
        if not self._buf:
            return []
        exc = MissingNewlineError(
            f"stream ended mid-line: {bytes(self._buf)!r}")
        self._buf.clear()
        self.errors += 1
        return [exc]


class FrameWriter:
    """Single-owner writer pushing frames onto a binary transport.

    Frames are flushed immediately: triggers are latency-critical and
    the volume is tiny.
    """

    def __init__(self, stream):
        self._stream = stream
        self.frames_written = 0

    def write(self, frame: Frame) -> None:
        try:
            self._stream.write(encode_frame(frame))
            self._stream.flush()
        except (OSError, ValueError) as exc:
            raise WireError(f"wire write failed: {exc}") from exc
        self.frames_written += 1

    def close(self) -> None:
        try:
            self._stream.flush()
        except (OSError, ValueError):
            pass
