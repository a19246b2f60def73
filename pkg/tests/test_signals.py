import math
import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from picdaq.signals import (
    SHAPES,
    V_MAX,
    V_MIN,
    WaveformSpec,
    parse_waveform,
    sample_waveform,
)


def test_sine_at_zero_is_offset():
    spec = WaveformSpec("sine", frequency_hz=0.25, amplitude_v=2.5, offset_v=2.5)
    assert sample_waveform(spec, 0.0) == pytest.approx(2.5)


def test_sine_quarter_period_hits_clamp_boundary():
    spec = WaveformSpec("sine", frequency_hz=0.25, amplitude_v=2.5, offset_v=2.5)
    assert sample_waveform(spec, 1.0) == pytest.approx(5.0)


def test_sine_overrange_clamps_to_full_scale():
    spec = WaveformSpec("sine", frequency_hz=1.0, amplitude_v=4.0, offset_v=4.0)
    assert sample_waveform(spec, 0.25) == 5.0


def test_lm35_25c_is_quarter_volt():
    spec = WaveformSpec("lm35_ramp", temp_start_c=25.0, temp_slope_c_per_s=0.0)
    assert sample_waveform(spec, 7.0) == pytest.approx(0.25)


def test_lm35_ramp_tracks_slope():
    spec = WaveformSpec("lm35_ramp", temp_start_c=20.0, temp_slope_c_per_s=0.5)
    assert sample_waveform(spec, 10.0) == pytest.approx(0.25)


def test_square_duty_cycle_high_first_half():
    spec = WaveformSpec("square", frequency_hz=1.0, amplitude_v=1.0, offset_v=2.0)
    assert sample_waveform(spec, 0.0) == 3.0
    assert sample_waveform(spec, 0.49) == 3.0
    assert sample_waveform(spec, 0.5) == 1.0
    assert sample_waveform(spec, 0.99) == 1.0


def test_triangle_spans_offset_plus_minus_amplitude():
    spec = WaveformSpec("triangle", frequency_hz=1.0, amplitude_v=1.0, offset_v=2.5)
    assert sample_waveform(spec, 0.0) == pytest.approx(1.5)
    assert sample_waveform(spec, 0.5) == pytest.approx(3.5)
    assert sample_waveform(spec, 0.25) == pytest.approx(2.5)


def test_dc_is_exactly_constant():
    spec = WaveformSpec("dc", offset_v=1.234)
    assert sample_waveform(spec, 0.0) == sample_waveform(spec, 1e6)


def _random_spec(rng):
    shape = rng.choice(SHAPES)
    return WaveformSpec(
        shape,
        frequency_hz=rng.uniform(0, 100),
        amplitude_v=rng.uniform(0, 20),
        offset_v=rng.uniform(-10, 10),
        temp_start_c=rng.uniform(-100, 600),
        temp_slope_c_per_s=rng.uniform(-10, 10),
    )


def test_clamp_totality_a_million_random_points():
    rng = random.Random(42)
    for _ in range(10**6):
        v = sample_waveform(_random_spec(rng), rng.uniform(0, 1e4))
        assert V_MIN <= v <= V_MAX


@settings(max_examples=300)
@given(
    shape=st.sampled_from(("sine", "square", "triangle")),
    f=st.floats(min_value=0.01, max_value=100.0, allow_nan=False),
    amp=st.floats(min_value=0.0, max_value=3.0, allow_nan=False),
    offset=st.floats(min_value=0.5, max_value=4.5, allow_nan=False),
    t=st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
)
def test_periodicity(shape, f, amp, offset, t):
    spec = WaveformSpec(shape, frequency_hz=f, amplitude_v=amp, offset_v=offset)
    if shape == "square":
        # Keep float noise away from the duty-cycle discontinuities.
        phase = math.fmod(f * t, 1.0)
        assume(min(abs(phase - edge) for edge in (0.0, 0.5, 1.0)) > 1e-6)
    assert abs(sample_waveform(spec, t) - sample_waveform(spec, t + 1.0 / f)) < 1e-9


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        WaveformSpec("noise")
    with pytest.raises(ValueError):
        WaveformSpec("sine", frequency_hz=-1.0)
    with pytest.raises(ValueError):
        WaveformSpec("sine", amplitude_v=-0.1)


class TestParseGrammar:
    def test_sine(self):
        spec = parse_waveform("sine:f=0.25,amp=2.5,offset=2.5")
        assert spec == WaveformSpec("sine", frequency_hz=0.25, amplitude_v=2.5, offset_v=2.5)

    def test_lm35_alias(self):
        spec = parse_waveform("lm35:start=25,slope=0.1")
        assert spec.shape == "lm35_ramp"
        assert spec.temp_start_c == 25.0
        assert spec.temp_slope_c_per_s == 0.1

    def test_dc(self):
        assert parse_waveform("dc:offset=1.0").offset_v == 1.0

    def test_bare_shape(self):
        assert parse_waveform("dc").offset_v == 0.0

    @pytest.mark.parametrize(
        "bad",
        [
            "sawtooth:f=1",
            "sine:freq=1",
            "dc:f=1",  # key not valid for this shape
            "lm35:start=hot",
            "sine:f",
        ],
    )
    def test_errors(self, bad):
        with pytest.raises(ValueError):
            parse_waveform(bad)
