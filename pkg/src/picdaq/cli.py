"""picdaq command line: simulate, acquire, serve, replay, selftest."""

from __future__ import annotations

import argparse
import sys
import threading
import time
from datetime import datetime, timedelta
from typing import List, Optional, Tuple

from picdaq import __version__, storage
from picdaq.acquisition import Session, start_session
from picdaq.device import DeviceConfig, DeviceState, device_tick, run_device
from picdaq.gateway import GatewayServer
from picdaq.protocol import FRAME_LEN, decode_frame
from picdaq.signals import WaveformSpec, parse_waveform
from picdaq.transport import open_loopback, open_transport, parse_transport

WAVEFORM_HELP = (
    "waveform grammar: shape:key=value,... where shape is sine|square|triangle"
    " (keys f, amp, offset), dc (key offset), or lm35 (keys start, slope);"
    " e.g. sine:f=0.25,amp=2.5,offset=2.5"
)
TRANSPORT_HELP = (
    "transport grammar: loopback | tcp:HOST:PORT | tcp-listen:HOST:PORT | serial:PATH[:BAUD]"
)

DEFAULT_SOURCES = (
    "sine:f=0.05,amp=2.0,offset=2.5",
    "square:f=0.02,amp=1.5,offset=2.5",
    "triangle:f=0.01,amp=2.5,offset=2.5",
    "lm35:start=25,slope=0.05",
)


def _waveform(text: str) -> WaveformSpec:
    try:
        return parse_waveform(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _mask(text: str) -> Tuple[bool, bool, bool, bool]:
    parts = text.split(",")
    if len(parts) != 4 or any(p not in ("0", "1") for p in parts):
        raise argparse.ArgumentTypeError("mask must be 4 comma-separated 0/1 flags, e.g. 1,0,1,1")
    return tuple(p == "1" for p in parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picdaq",
        description="4-channel serial data acquisition system, entirely in software.",
    )
    parser.add_argument("--version", action="version", version=f"picdaq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the device emulator", epilog=WAVEFORM_HELP)
    sim.add_argument("--transport", required=True, help=TRANSPORT_HELP)
    sim.add_argument("--rate", type=_positive, default=1.0, help="sampling rate in Hz (default 1)")
    for i in range(1, 5):
        sim.add_argument(f"--ch{i}", type=_waveform, default=None, help=f"channel {i} source")
    sim.add_argument("--duration", type=_positive, default=None, help="run time in device seconds")
    sim.add_argument(
        "--wall-clock", action="store_true", help="pace emission in real time (default simulated)"
    )

    acq = sub.add_parser("acquire", help="receive, decode, and record samples")
    acq.add_argument("--transport", required=True, help=TRANSPORT_HELP)
    acq.add_argument("--out", default=None, help="CSV recording path")
    acq.add_argument("--duration", type=_positive, default=None, help="seconds to acquire")
    acq.add_argument("--mask", type=_mask, default=None, help="display mask, e.g. 1,0,1,1")
    acq.add_argument(
        "--ring-capacity", type=int, default=4096, help="in-memory sample buffer size"
    )

    srv = sub.add_parser("serve", help="WebSocket gateway (and optional embedded simulator)")
    srv.add_argument("--listen", default="127.0.0.1:8765", help="HOST:PORT to listen on")
    srv.add_argument("--transport", required=True, help=TRANSPORT_HELP + "; loopback embeds a simulator")
    srv.add_argument("--ui-dir", default=None, help="directory of operator UI static assets")
    srv.add_argument("--rate", type=_positive, default=1.0, help="embedded simulator rate (Hz)")
    for i in range(1, 5):
        srv.add_argument(f"--ch{i}", type=_waveform, default=None, help=f"channel {i} source")

    rep = sub.add_parser("replay", help="transform and plot a stored recording")
    rep.add_argument("csv", help="recording to load")
    rep.add_argument("--channel", type=int, choices=(1, 2, 3, 4), default=1, help="channel 1..4")
    rep.add_argument(
        "--transform", choices=("raw", "volts", "lm35"), default="volts", help="unit transform"
    )
    rep.add_argument("--plot", default=None, help="write an SVG plot here")
    rep.add_argument("--out", default=None, help="write timestamp,value CSV here ('-' = stdout)")

    sub.add_parser("selftest", help="deterministic end-to-end loopback round-trip")

    return parser


def _sources(args) -> Tuple[WaveformSpec, ...]:
    specs = []
    for i, default in enumerate(DEFAULT_SOURCES, start=1):
        given = getattr(args, f"ch{i}")
        specs.append(given if given is not None else parse_waveform(default))
    return tuple(specs)


def cmd_simulate(args) -> int:
    config = DeviceConfig(
        sources=_sources(args),
        rate_hz=args.rate,
        clock="wall" if args.wall_clock else "simulated",
    )
    stream = open_transport(args.transport)
    try:
        report = run_device(config, stream, duration=args.duration)
    finally:
        stream.close()
    print(
        f"sent {report.frames_sent} frames in {report.duration:.2f}s", file=sys.stderr
    )
    if report.error:
        print(f"transport error: {report.error}", file=sys.stderr)
        return 1
    return 0


def cmd_acquire(args) -> int:
    stream = open_transport(args.transport)
    session = start_session(stream, ring_capacity=args.ring_capacity)
    if args.mask is not None:
        session.set_channel_mask(args.mask)
    if args.out:
        session.arm_recording(storage.open_recording(args.out))
    try:
        if args.duration is not None:
            time.sleep(args.duration)
        else:
            while session._reader is not None and session._reader.is_alive():
                session._reader.join(timeout=0.5)
    except KeyboardInterrupt:
        pass
    final = session.stop()
    print(
        f"accepted {final['accepted']} samples"
        f" ({final['decoder']['frames_rejected']} rejects,"
        f" {final['decoder']['bytes_discarded']} bytes discarded)",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        print(f"bad --listen address: {args.listen!r}", file=sys.stderr)
        return 2

    desc = parse_transport(args.transport)
    device_thread = None
    stop = threading.Event()
    rate_holder = {"rate": args.rate}

    if desc["kind"] == "loopback":
        # Self-contained demo: an embedded simulator feeds the session.
        device_end, host_end = open_loopback()

        def run_sim() -> None:
            while not stop.is_set():
                config = DeviceConfig(
                    sources=_sources(args), rate_hz=rate_holder["rate"], clock="wall"
                )
                rate = rate_holder["rate"]
                run_device(config, device_end, stop=stop_or_rate_change(rate))

        def stop_or_rate_change(rate: float) -> threading.Event:
            event = threading.Event()

            def watch() -> None:
                while not stop.is_set() and rate_holder["rate"] == rate:
                    time.sleep(0.1)
                event.set()

            threading.Thread(target=watch, daemon=True).start()
            return event

        stream = host_end
        device_thread = threading.Thread(target=run_sim, daemon=True)

        def set_rate(hz: float) -> None:
            rate_holder["rate"] = hz
    else:
        stream = open_transport(args.transport)
        set_rate = None

    gw_holder = {}

    def on_sample(sample, mask) -> None:
        gw_holder["gw"].broadcast(sample, mask)

    session = start_session(stream, on_sample=on_sample)
    gw = GatewayServer(
        session,
        host=host,
        port=int(port),
        ui_dir=args.ui_dir,
        rate_setter=set_rate,
    )
    gw_holder["gw"] = gw
    gw.start()
    if device_thread is not None:
        device_thread.start()
    print(f"gateway listening on ws://{host}:{gw.port} (control: /control, stream: /stream)")
    if args.ui_dir:
        print(f"operator UI at http://{host}:{gw.port}/")
    try:
        while True:
            time.sleep(1.0)
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        gw.stop()
        if session.running:
            session.stop()
    return 0


def cmd_replay(args) -> int:
    samples = storage.load_recording(args.csv)
    transform = {"raw": "raw_counts", "volts": "volts", "lm35": "lm35_celsius"}[args.transform]
    series = storage.transform_series(samples, args.channel - 1, transform)
    if args.plot:
        storage.render_plot(series, args.plot)
        print(f"wrote {args.plot}", file=sys.stderr)
    if args.out:
        fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="ascii")
        try:
            fh.write("timestamp,value\r\n")
            for ts, value in series:
                fh.write(f"{ts.isoformat(timespec='milliseconds')},{value:.6g}\r\n")
        finally:
            if fh is not sys.stdout:
                fh.close()
    if not args.plot and not args.out:
        for ts, value in series:
            print(f"{ts.isoformat(timespec='milliseconds')},{value:.6g}")
    return 0


def selftest(tmpdir: Optional[str] = None, frames: int = 10) -> Tuple[List, List]:
    """Deterministic loopback round-trip; returns (sent codes, recorded codes)."""
    import tempfile
    from pathlib import Path

    sources = tuple(parse_waveform(s) for s in DEFAULT_SOURCES)
    config = DeviceConfig(sources=sources, rate_hz=1.0, clock="simulated")

    # Expected codes straight from the tick function, independent of transport.
    expected = []
    state = DeviceState()
    for _ in range(frames):
        frame = device_tick(state, config)
        expected.append(list(decode_frame(frame)))

    dev_end, host_end = open_loopback()
    report = run_device(config, dev_end, max_frames=frames)
    dev_end.close()
    base = datetime(2000, 1, 1)
    ticks = iter(range(frames + 1))
    session = Session(clock=lambda: base + timedelta(seconds=next(ticks)))
    session.start()
    out_dir = tmpdir or tempfile.mkdtemp(prefix="picdaq-selftest-")
    csv_path = str(Path(out_dir) / "selftest.csv")
    session.arm_recording(storage.open_recording(csv_path))
    while True:
        chunk = host_end.read()
        if not chunk:
            break
        session.on_bytes(chunk)
    host_end.close()
    session.stop()
    recorded = [list(s.codes) for s in storage.load_recording(csv_path)]
    if report.frames_sent != frames:
        raise RuntimeError(f"simulator sent {report.frames_sent} frames, expected {frames}")
    return expected, recorded


def cmd_selftest(args) -> int:
    frames = 10
    expected, recorded = selftest(frames=frames)
    if recorded != expected:
        print("selftest FAILED: recorded codes differ from simulator output", file=sys.stderr)
        return 1
    print(f"selftest OK: {frames} frames round-tripped device -> loopback -> CSV")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "acquire": cmd_acquire,
        "serve": cmd_serve,
        "replay": cmd_replay,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"picdaq: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
