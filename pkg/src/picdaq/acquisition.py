"""Host acquisition engine.

Event-driven reception: bytes are pushed into the session as they arrive
(``on_bytes``), decoded into frames, timestamped, scaled to volts, ring
buffered, folded into per-channel statistics, and appended to an armed
recording. The channel mask filters display/streaming only; the ring,
stats, and recording always carry all four channels.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, List, Optional, Sequence, Tuple

from picdaq.protocol import MAX_CODE, FrameDecoder, FrameEvent
from picdaq.transport import ByteStream

FULL_SCALE_VOLTS = 5.0
DEFAULT_RING_CAPACITY = 4096


class SessionError(RuntimeError):
    pass


def scale_counts(code: int) -> float:
    """Display scaling: code * 5 / 1023, so code 1023 reads exactly 5.000 V."""
    if not 0 <= code <= MAX_CODE:
        raise ValueError(f"code {code} out of range 0..{MAX_CODE}")
    return code * FULL_SCALE_VOLTS / MAX_CODE


@dataclass(frozen=True)
class Sample:
    seq: int
    timestamp: datetime
    codes: Tuple[int, int, int, int]
    volts: Tuple[float, float, float, float]


class ChannelStats:
    __slots__ = ("count", "min", "max", "_sum", "last")

    def __init__(self) -> None:
        self.count = 0
        self.min = float("inf")
        self.max = float("-inf")
        self._sum = 0.0
        self.last = 0.0

    def push(self, v: float) -> None:
        self.count += 1
        self.min = min(self.min, v)
        self.max = max(self.max, v)
        self._sum += v
        self.last = v

    @property
    def mean(self) -> float:
        return self._sum / self.count if self.count else 0.0

    def snapshot(self) -> dict:
        if not self.count:
            return {"count": 0, "min": None, "max": None, "mean": None, "last": None}
        return {
            "count": self.count,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "last": self.last,
        }


class Session:
    """One acquisition session: decoder, ring buffer, stats, recording.

    A single reception task calls ``on_bytes``; other threads may read
    stats and the ring concurrently. Control operations (start, stop, mask,
    recording arm/disarm) serialize with reception via the session lock, so
    readers never see a partially applied sample.
    """

    def __init__(
        self,
        ring_capacity: int = DEFAULT_RING_CAPACITY,
        clock: Callable[[], datetime] = datetime.now,
        on_sample: Optional[Callable[[Sample, Tuple[bool, bool, bool, bool]], None]] = None,
    ):
        self._lock = threading.RLock()
        self._decoder = FrameDecoder()
        self._ring: deque = deque(maxlen=ring_capacity)
        self._clock = clock
        self._on_sample = on_sample
        self._mask: Tuple[bool, bool, bool, bool] = (True, True, True, True)
        self._stats = [ChannelStats() for _ in range(4)]
        self._accepted = 0
        self.running = False
        self.recording = None  # storage.Recording, when armed
        self._reader: Optional[threading.Thread] = None
        self._stream: Optional[ByteStream] = None

    def start(self) -> None:
        with self._lock:
            if self.running:
                raise SessionError("session already running")
            self.running = True

    def on_bytes(self, chunk: bytes) -> List[Sample]:
        """Feed received bytes; returns newly accepted samples."""
        notify: List[Tuple[Sample, Tuple[bool, bool, bool, bool]]] = []
        with self._lock:
            if not self.running:
                raise SessionError("session is not running")
            samples: List[Sample] = []
            for event in self._decoder.feed(chunk):
                if not isinstance(event, FrameEvent):
                    continue  # rejects/resyncs only move counters
                codes = event.codes
                sample = Sample(
                    seq=self._accepted,
                    timestamp=self._clock(),
                    codes=codes,
                    volts=tuple(scale_counts(c) for c in codes),
                )
                self._accepted += 1
                self._ring.append(sample)
                for i in range(4):
                    self._stats[i].push(sample.volts[i])
                if self.recording is not None:
                    self.recording.append_sample(sample)
                samples.append(sample)
                notify.append((sample, self._mask))
        if self._on_sample is not None:
            for sample, mask in notify:
                self._on_sample(sample, mask)
        return samples

    def set_channel_mask(self, mask: Sequence[bool]) -> None:
        if len(mask) != 4:
            raise ValueError("mask must have 4 entries")
        with self._lock:
            self._mask = tuple(bool(m) for m in mask)

    @property
    def channel_mask(self) -> Tuple[bool, bool, bool, bool]:
        with self._lock:
            return self._mask

    def read_latest(self, n: int) -> List[Sample]:
        """Last min(n, buffered) samples in ascending seq order."""
        if n < 0:
            raise ValueError("n must be >= 0")
        with self._lock:
            if n == 0:
                return []
            return list(self._ring)[-n:]

    def arm_recording(self, recording) -> None:
        with self._lock:
            if self.recording is not None:
                raise SessionError("a recording is already armed")
            self.recording = recording

    def disarm_recording(self) -> int:
        """Close the armed recording; returns its row count."""
        with self._lock:
            if self.recording is None:
                raise SessionError("no recording armed")
            rows = self.recording.close()
            self.recording = None
            return rows

    def stats(self) -> dict:
        with self._lock:
            return {
                "accepted": self._accepted,
                "channels": [s.snapshot() for s in self._stats],
                "decoder": self._decoder.counters,
                "recording_rows": self.recording.rows if self.recording is not None else None,
                "mask": list(self._mask),
            }

    def stop(self) -> dict:
        """Halt reception, finalize any armed recording, return final stats."""
        with self._lock:
            if not self.running:
                raise SessionError("session is not running")
            self.running = False
            if self.recording is not None:
                self.recording.close()
                self.recording = None
            final = self.stats()
        if self._stream is not None:
            self._stream.close()
        if self._reader is not None and self._reader is not threading.current_thread():
            self._reader.join(timeout=5.0)
            self._reader = None
        return final


def start_session(
    stream: ByteStream,
    ring_capacity: int = DEFAULT_RING_CAPACITY,
    clock: Callable[[], datetime] = datetime.now,
    on_sample=None,
) -> Session:
    """Start a session with a background reader pushing bytes from ``stream``.

    The reader delivers chunks to ``on_bytes`` as they arrive and exits at
    end of stream; ``Session.stop`` closes the stream and joins the reader.
    """
    session = Session(ring_capacity=ring_capacity, clock=clock, on_sample=on_sample)
    session.start()
    session._stream = stream

    def pump() -> None:
        while True:
            data = stream.read()
            if not data:
                break
            try:
                session.on_bytes(data)
            except SessionError:
                break  # stopped while a read was in flight

    reader = threading.Thread(target=pump, name="picdaq-reader", daemon=True)
    session._reader = reader
    reader.start()
    return session
