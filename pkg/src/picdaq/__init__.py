"""picdaq: a 4-channel serial data acquisition system, entirely in software.

A simulated microcontroller samples four analog channels with a 10-bit ADC
and streams framed readings over a byte transport; the host side decodes,
scales, buffers, records to CSV, and broadcasts live samples to clients.
"""

__version__ = "0.1.0"

from picdaq.signals import WaveformSpec, sample_waveform, parse_waveform
from picdaq.protocol import FrameDecoder, encode_frame, decode_frame
from picdaq.device import DeviceConfig, quantize, run_device
from picdaq.acquisition import Sample, Session, scale_counts

__all__ = [
    "WaveformSpec",
    "sample_waveform",
    "parse_waveform",
    "FrameDecoder",
    "encode_frame",
    "decode_frame",
    "DeviceConfig",
    "quantize",
    "run_device",
    "Sample",
    "Session",
    "scale_counts",
]
