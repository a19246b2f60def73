"""Synthetic analog voltage sources.

Stand-ins for the bench instruments feeding the acquisition hardware: a
function generator (sine / square / triangle / dc) and an LM35 temperature
sensor modeled as a slow linear ramp. Every source is a pure function of
time and its output is clamped to the 0-5 V input range the ADC accepts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

V_MIN = 0.0
V_MAX = 5.0

# LM35 output scale: 10 mV per degree Celsius.
LM35_VOLTS_PER_C = 0.01

SHAPES = ("sine", "square", "triangle", "dc", "lm35_ramp")

_PERIODIC = ("sine", "square", "triangle")


@dataclass(frozen=True)
class WaveformSpec:
    """Definition of one synthetic channel source.

    ``temp_start_c`` / ``temp_slope_c_per_s`` apply to ``lm35_ramp`` only;
    ``frequency_hz`` / ``amplitude_v`` apply to the periodic shapes only.
    """

    shape: str
    frequency_hz: float = 0.0
    amplitude_v: float = 0.0
    offset_v: float = 0.0
    temp_start_c: float = 0.0
    temp_slope_c_per_s: float = 0.0

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise ValueError(f"unknown waveform shape: {self.shape!r}")
        if self.frequency_hz < 0:
            raise ValueError("frequency_hz must be >= 0")
        if self.amplitude_v < 0:
            raise ValueError("amplitude_v must be >= 0")


def sample_waveform(spec: WaveformSpec, t: float) -> float:
    """Evaluate the source at time ``t`` (seconds), clamped to [0, 5] V."""
    if spec.shape == "sine":
        raw = spec.offset_v + spec.amplitude_v * math.sin(2.0 * math.pi * spec.frequency_hz * t)
    elif spec.shape == "square":
        # 50% duty cycle, high first half-period.
        phase = math.fmod(spec.frequency_hz * t, 1.0)
        raw = spec.offset_v + (spec.amplitude_v if phase < 0.5 else -spec.amplitude_v)
    elif spec.shape == "triangle":
        # Symmetric ramp between offset +/- amplitude, low at phase 0.
        phase = math.fmod(spec.frequency_hz * t, 1.0)
        raw = spec.offset_v + spec.amplitude_v * (1.0 - 4.0 * abs(phase - 0.5))
    elif spec.shape == "dc":
        raw = spec.offset_v
    else:  # lm35_ramp
        temp_c = spec.temp_start_c + spec.temp_slope_c_per_s * t
        raw = LM35_VOLTS_PER_C * temp_c
    return min(max(raw, V_MIN), V_MAX)


_SHAPE_KEYS = {
    "sine": {"f": "frequency_hz", "amp": "amplitude_v", "offset": "offset_v"},
    "square": {"f": "frequency_hz", "amp": "amplitude_v", "offset": "offset_v"},
    "triangle": {"f": "frequency_hz", "amp": "amplitude_v", "offset": "offset_v"},
    "dc": {"offset": "offset_v"},
    "lm35": {"start": "temp_start_c", "slope": "temp_slope_c_per_s"},
}

_SHAPE_ALIASES = {"lm35": "lm35_ramp"}


def parse_waveform(text: str) -> WaveformSpec:
    """Parse the ``shape:key=value,...`` source grammar.

    Examples: ``sine:f=0.25,amp=2.5,offset=2.5``, ``dc:offset=1.0``,
    ``lm35:start=25,slope=0.1``. Unknown shapes or keys are errors.
    """
    shape, _, rest = text.strip().partition(":")
    if shape not in _SHAPE_KEYS:
        raise ValueError(f"unknown waveform shape: {shape!r}")
    keys = _SHAPE_KEYS[shape]
    fields: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in keys:
                raise ValueError(f"unknown key {key!r} for waveform shape {shape!r}")
            try:
                fields[keys[key]] = float(value)
            except ValueError:
                raise ValueError(f"bad numeric value for {key!r}: {value!r}") from None
    return WaveformSpec(shape=_SHAPE_ALIASES.get(shape, shape), **fields)
