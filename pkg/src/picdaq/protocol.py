"""Wire format: one frame per sampling instant.

A frame carries the four channel codes as zero-padded 4-digit ASCII
decimals, so the payload is exactly 16 digit bytes, terminated by CR LF for
a fixed 18-byte frame. Codes are 10-bit, 0..1023; any 4-digit group above
1023 marks corruption and rejects the whole frame.

The streaming decoder scans the byte stream left to right: a window that
parses as a valid frame is emitted and consumed whole; a syntactically
well-formed window whose codes are out of range is rejected and consumed
whole; anything else slides the scan forward one byte. This makes the
decoder exactly equivalent to a whole-buffer left-to-right pattern scan, so
no well-formed frame is ever lost, no matter what garbage surrounds it, and
it re-locks within one frame length of clean data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

FRAME_LEN = 18
PAYLOAD_LEN = 16
DIGITS_PER_CODE = 4
NUM_CHANNELS = 4
MAX_CODE = 1023
TERMINATOR = b"\r\n"


class FrameError(ValueError):
    """Malformed or out-of-range frame data."""


def encode_frame(codes: Sequence[int]) -> bytes:
    """Render four channel codes as the 18-byte wire frame."""
    if len(codes) != NUM_CHANNELS:
        raise FrameError(f"expected {NUM_CHANNELS} codes, got {len(codes)}")
    for c in codes:
        if not 0 <= c <= MAX_CODE:
            raise FrameError(f"code {c} out of range 0..{MAX_CODE}")
    return ("".join(f"{c:04d}" for c in codes)).encode("ascii") + TERMINATOR


def decode_frame(data: bytes) -> Tuple[int, int, int, int]:
    """Inverse of :func:`encode_frame`; raises FrameError on malformed input."""
    if len(data) != FRAME_LEN:
        raise FrameError(f"frame must be {FRAME_LEN} bytes, got {len(data)}")
    payload = data[:PAYLOAD_LEN]
    if not payload.isdigit():
        raise FrameError("non-digit in payload")
    if data[PAYLOAD_LEN:] != TERMINATOR:
        raise FrameError("missing CR LF terminator")
    codes = tuple(
        int(payload[i : i + DIGITS_PER_CODE]) for i in range(0, PAYLOAD_LEN, DIGITS_PER_CODE)
    )
    for c in codes:
        if c > MAX_CODE:
            raise FrameError(f"code {c} out of range 0..{MAX_CODE}")
    return codes  # type: ignore[return-value]


@dataclass(frozen=True)
class FrameEvent:
    codes: Tuple[int, int, int, int]


@dataclass(frozen=True)
class RejectEvent:
    """A contiguous run of discarded bytes, with the first failure seen."""

    reason: str
    discarded: int


DecodeEvent = Union[FrameEvent, RejectEvent]


def _classify(window: bytes) -> str:
    if not window[:PAYLOAD_LEN].isdigit():
        return "non-digit in payload"
    return "missing CR LF terminator"


class FrameDecoder:
    """Incremental frame decoder over an arbitrarily chunked byte stream.

    Single-owner mutable state: use one decoder per stream. Counters only
    ever increase, and at most one partial frame (< 18 bytes) is buffered
    between ``feed`` calls.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self.frames_ok = 0
        self.frames_rejected = 0
        self.bytes_discarded = 0

    @property
    def counters(self) -> dict:
        return {
            "frames_ok": self.frames_ok,
            "frames_rejected": self.frames_rejected,
            "bytes_discarded": self.bytes_discarded,
        }

    def feed(self, chunk: bytes) -> List[DecodeEvent]:
        """Consume a chunk; return frames and rejections in stream order."""
        self._buf.extend(chunk)
        events: List[DecodeEvent] = []
        skipped = 0
        skip_reason = ""

        def flush_skip() -> None:
            nonlocal skipped, skip_reason
            if skipped:
                events.append(RejectEvent(skip_reason, skipped))
                self.frames_rejected += 1
                self.bytes_discarded += skipped
                skipped = 0
                skip_reason = ""

        while len(self._buf) >= FRAME_LEN:
            window = bytes(self._buf[:FRAME_LEN])
            if window[:PAYLOAD_LEN].isdigit() and window[PAYLOAD_LEN:] == TERMINATOR:
                try:
                    codes = decode_frame(window)
                except FrameError as exc:
                    # Well-formed candidate with an impossible code: reject
                    # and consume it whole.
                    flush_skip()
                    events.append(RejectEvent(str(exc), FRAME_LEN))
                    self.frames_rejected += 1
                    self.bytes_discarded += FRAME_LEN
                else:
                    flush_skip()
                    events.append(FrameEvent(codes))
                    self.frames_ok += 1
                del self._buf[:FRAME_LEN]
            else:
                if not skipped:
                    skip_reason = _classify(window)
                skipped += 1
                del self._buf[:1]
        flush_skip()
        return events
