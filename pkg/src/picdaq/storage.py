"""CSV persistence and replay.

Recordings are plain ASCII, Excel-friendly CSV with the fixed header
``timestamp,seq,ch1,ch2,ch3,ch4``: raw ADC counts (lossless; any scaling is
recoverable), ISO-8601 millisecond timestamps, CRLF line endings on write,
either line ending accepted on read.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime
from typing import IO, List, Optional, Sequence, Tuple

from picdaq.acquisition import Sample, scale_counts
from picdaq.protocol import MAX_CODE
from picdaq.signals import LM35_VOLTS_PER_C

CSV_HEADER = ("timestamp", "seq", "ch1", "ch2", "ch3", "ch4")

TRANSFORMS = ("raw_counts", "volts", "lm35_celsius")


class RecordingError(ValueError):
    pass


class Recording:
    """Append-only CSV writer for one session's samples. Single writer."""

    def __init__(self, path: str):
        self.path = path
        self._fh: Optional[IO[str]] = open(path, "w", newline="", encoding="ascii")
        self._writer = csv.writer(self._fh, lineterminator="\r\n")
        self._writer.writerow(CSV_HEADER)
        self._last_seq: Optional[int] = None
        self.rows = 0

    def append_sample(self, sample: Sample) -> None:
        if self._fh is None:
            raise RecordingError("recording is closed")
        if self._last_seq is not None and sample.seq <= self._last_seq:
            raise RecordingError(
                f"out-of-order seq {sample.seq} after {self._last_seq}"
            )
        ts = sample.timestamp.isoformat(timespec="milliseconds")
        self._writer.writerow((ts, sample.seq, *sample.codes))
        self._last_seq = sample.seq
        self.rows += 1

    def close(self) -> int:
        if self._fh is not None:
            self._fh.flush()
            self._fh.close()
            self._fh = None
        return self.rows


def open_recording(path: str) -> Recording:
    return Recording(path)


def load_recording(path: str) -> List[Sample]:
    """Read a recording back; inverse of the append sequence.

    Codes, seq, and timestamps are recovered exactly (to the stored
    millisecond precision); volts are recomputed from the codes.
    """
    samples: List[Sample] = []
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RecordingError(f"{path}: missing header") from None
        if tuple(header) != CSV_HEADER:
            raise RecordingError(f"{path}: missing or wrong header: {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise RecordingError(f"{path}: line {lineno}: expected 6 fields, got {len(row)}")
            try:
                ts = datetime.fromisoformat(row[0])
                seq = int(row[1])
                codes = tuple(int(c) for c in row[2:6])
            except ValueError as exc:
                raise RecordingError(f"{path}: line {lineno}: {exc}") from None
            for c in codes:
                if not 0 <= c <= MAX_CODE:
                    raise RecordingError(
                        f"{path}: line {lineno}: code {c} out of range 0..{MAX_CODE}"
                    )
            samples.append(
                Sample(
                    seq=seq,
                    timestamp=ts,
                    codes=codes,  # type: ignore[arg-type]
                    volts=tuple(scale_counts(c) for c in codes),  # type: ignore[arg-type]
                )
            )
    return samples


def transform_series(
    samples: Sequence[Sample], channel: int, transform: str
) -> List[Tuple[datetime, float]]:
    """Extract one channel as (timestamp, value) pairs under a unit transform."""
    if not 0 <= channel <= 3:
        raise ValueError("channel must be 0..3")
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform: {transform!r}")
    out = []
    for s in samples:
        code = s.codes[channel]
        if transform == "raw_counts":
            value = float(code)
        elif transform == "volts":
            value = scale_counts(code)
        else:  # lm35_celsius: invert the sensor's 10 mV/degC scale
            value = scale_counts(code) / LM35_VOLTS_PER_C
        out.append((s.timestamp, value))
    return out


def render_plot(
    series: Sequence[Tuple[datetime, float]],
    out_path: str,
    width: int = 800,
    height: int = 400,
) -> None:
    """Write the series as a simple SVG polyline over a time axis."""
    if not series:
        raise ValueError("cannot plot an empty series")
    t0 = series[0][0]
    xs = [(t - t0).total_seconds() for t, _ in series]
    ys = [v for _, v in series]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    # Degenerate ranges (constant signals, single points) get fixed padding.
    if math.isclose(xmin, xmax):
        xmin, xmax = xmin - 0.5, xmax + 0.5
    if math.isclose(ymin, ymax):
        ymin, ymax = ymin - 0.5, ymax + 0.5
    margin = 40
    pw, ph = width - 2 * margin, height - 2 * margin

    def px(x: float) -> float:
        return margin + (x - xmin) / (xmax - xmin) * pw

    def py(y: float) -> float:
        return height - margin - (y - ymin) / (ymax - ymin) * ph

    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>\n'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>\n'
        f'<text x="{margin}" y="{height - margin + 16}" font-size="10">{xmin:.1f}s</text>\n'
        f'<text x="{width - margin - 20}" y="{height - margin + 16}" font-size="10">'
        f"{xmax:.1f}s</text>\n"
        f'<text x="4" y="{height - margin}" font-size="10">{ymin:.2f}</text>\n'
        f'<text x="4" y="{margin}" font-size="10">{ymax:.2f}</text>\n'
        f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>\n'
        f"</svg>\n"
    )
    with open(out_path, "w", encoding="ascii") as fh:
        fh.write(svg)
