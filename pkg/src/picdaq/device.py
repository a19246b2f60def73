"""Firmware emulator: sample, quantize, frame, transmit.

Models the microcontroller's main loop: at a fixed rate, read all four
analog channels, convert each through the ideal 10-bit ADC transfer
function, and write one wire frame to the transport. All four channels are
always sampled and sent; any host-side channel selection is display-only.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from picdaq.protocol import MAX_CODE, encode_frame
from picdaq.signals import WaveformSpec, sample_waveform
from picdaq.transport import ByteStream

ADC_LEVELS = 1024
DEFAULT_VREF = 5.0
DEFAULT_RATE_HZ = 1.0


def quantize(v: float, vref: float = DEFAULT_VREF) -> int:
    """Ideal SAR-ADC transfer: floor(v * 1024 / vref), clamped to 0..1023.

    1024 equal-width input bins with 1 LSB = vref/1024; the top bin absorbs
    full scale and out-of-range inputs saturate.
    """
    if vref <= 0:
        raise ValueError("vref must be positive")
    code = math.floor(v * ADC_LEVELS / vref)
    return min(max(code, 0), MAX_CODE)


@dataclass(frozen=True)
class DeviceConfig:
    sources: Tuple[WaveformSpec, WaveformSpec, WaveformSpec, WaveformSpec]
    rate_hz: float = DEFAULT_RATE_HZ
    vref_v: float = DEFAULT_VREF
    clock: str = "simulated"  # "simulated" | "wall"

    def __post_init__(self) -> None:
        if len(self.sources) != 4:
            raise ValueError("device has exactly 4 channels")
        if self.rate_hz <= 0:
            raise ValueError("rate_hz must be positive")
        if self.clock not in ("simulated", "wall"):
            raise ValueError(f"unknown clock mode: {self.clock!r}")


@dataclass
class DeviceState:
    t: float = 0.0
    seq: int = 0
    running: bool = True


@dataclass
class RunReport:
    frames_sent: int = 0
    duration: float = 0.0
    error: Optional[str] = None


def device_tick(state: DeviceState, config: DeviceConfig) -> bytes:
    """One firmware loop iteration: returns the frame, advances the clock."""
    codes = [quantize(sample_waveform(src, state.t), config.vref_v) for src in config.sources]
    state.seq += 1
    state.t = state.seq / config.rate_hz
    return encode_frame(codes)


def run_device(
    config: DeviceConfig,
    stream: ByteStream,
    stop: Optional[threading.Event] = None,
    max_frames: Optional[int] = None,
    duration: Optional[float] = None,
) -> RunReport:
    """Run the emulated firmware loop until stopped.

    Under the simulated clock, frames are emitted back to back with ideal
    timestamps (deterministic output). Under the wall clock, emission is
    paced to 1/rate_hz real seconds per frame. Stops on the stop signal,
    after ``max_frames`` frames, or after ``duration`` device seconds.
    """
    state = DeviceState()
    report = RunReport()
    wall = config.clock == "wall"
    start = time.monotonic()
    if duration is not None and max_frames is None:
        max_frames = int(round(duration * config.rate_hz))
    while state.running:
        if stop is not None and stop.is_set():
            break
        if max_frames is not None and state.seq >= max_frames:
            break
        frame = device_tick(state, config)
        try:
            stream.write(frame)
        except OSError as exc:
            report.error = str(exc)
            state.seq -= 1  # the failed frame was not delivered
            break
        report.frames_sent = state.seq
        if wall:
            deadline = start + state.t
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                if stop is not None and stop.wait(min(remaining, 0.05)):
                    state.running = False
                    break
                if stop is None:
                    time.sleep(remaining)
    report.frames_sent = max(report.frames_sent, 0)
    report.duration = time.monotonic() - start if wall else state.seq / config.rate_hz
    return report
