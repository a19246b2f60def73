"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with ``pytest tests/test_acceptance.py -v -s``."""

import json
import random
import re
import threading
import time
from datetime import datetime, timedelta

import pytest
from websockets.sync.client import connect

from picdaq.acquisition import Session, start_session
from picdaq.cli import main, selftest
from picdaq.device import (
    ADC_LEVELS,
    DeviceConfig,
    DeviceState,
    device_tick,
    quantize,
    run_device,
)
from picdaq.gateway import GatewayServer
from picdaq.protocol import (
    MAX_CODE,
    FrameDecoder,
    FrameEvent,
    decode_frame,
    encode_frame,
)
from picdaq.signals import WaveformSpec
from picdaq.transport import open_loopback
from picdaq import storage

FRAME_RE = re.compile(rb"[0-9]{16}\r\n")


def report(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, name


def oracle_scan(data: bytes):
    frames = []
    for m in FRAME_RE.finditer(data):
        codes = tuple(int(m.group(0)[i : i + 4]) for i in range(0, 16, 4))
        if all(c <= MAX_CODE for c in codes):
            frames.append(codes)
    return frames


def test_criterion_1_wire_roundtrip():
    start = time.monotonic()
    corners = (0, 1, 511, 512, 1022, 1023)
    for a in corners:
        for b in corners:
            for c in corners:
                for d in corners:
                    frame = (a, b, c, d)
                    assert decode_frame(encode_frame(frame)) == frame
    rng = random.Random(1)
    for _ in range(10**5):
        frame = tuple(rng.randrange(MAX_CODE + 1) for _ in range(4))
        assert decode_frame(encode_frame(frame)) == frame
    elapsed = time.monotonic() - start
    report(
        "criterion 1: wire round-trip (1296 corner + 100000 random frames)",
        elapsed < 5.0,
        f"{elapsed:.2f}s",
    )


def test_criterion_2_decoder_oracle_equivalence():
    start = time.monotonic()
    rng = random.Random(2)
    for _ in range(1000):
        parts = []
        for _ in range(rng.randrange(1, 15)):
            if rng.random() < 0.6:
                frame = tuple(rng.randrange(1100) for _ in range(4))
                parts.append(("".join(f"{c:04d}" for c in frame)).encode() + b"\r\n")
            else:
                alphabet = rng.choice(
                    [bytes(range(256)), b"0123456789", b"0123456789\r\n", b"xyz\r\n"]
                )
                parts.append(
                    bytes(rng.choice(alphabet) for _ in range(rng.randrange(1, 30)))
                )
        data = b"".join(parts)
        dec = FrameDecoder()
        events = []
        pos = 0
        while pos < len(data):
            n = rng.randrange(1, 40)
            events += dec.feed(data[pos : pos + n])
            pos += n
        got = [e.codes for e in events if isinstance(e, FrameEvent)]
        assert got == oracle_scan(data)
    elapsed = time.monotonic() - start
    report(
        "criterion 2: decoder equals whole-buffer regex oracle on 1000 corrupted streams",
        elapsed < 10.0,
        f"{elapsed:.2f}s",
    )


def test_criterion_3_adc_model():
    start = time.monotonic()
    assert quantize(0.0) == 0
    assert quantize(5.0) == 1023
    assert quantize(2.5) == 512
    n = 10**5
    prev = -1
    bound = 2 * 5.0 / ADC_LEVELS  # 9.765625 mV
    for i in range(n):
        v = -1.0 + 7.0 * i / (n - 1)
        code = quantize(v)
        assert code >= prev
        prev = code
        if 0.0 <= v <= 5.0:
            assert abs(code * 5.0 / MAX_CODE - v) <= bound + 1e-12
    elapsed = time.monotonic() - start
    report(
        "criterion 3: ADC monotone on 100000-point grid, |error| <= 9.8 mV, anchors exact",
        elapsed < 2.0,
        f"{elapsed:.2f}s",
    )


def test_criterion_4_end_to_end_determinism():
    start = time.monotonic()
    run1_expected, run1_recorded = selftest(frames=10)
    run2_expected, run2_recorded = selftest(frames=10)
    assert run1_recorded == run1_expected
    assert run2_recorded == run2_expected
    assert run1_recorded == run2_recorded
    assert main(["selftest"]) == 0
    elapsed = time.monotonic() - start
    report(
        "criterion 4: selftest CSV codes byte-identical to simulator output, twice",
        elapsed < 1.0,
        f"{elapsed:.2f}s",
    )


def test_criterion_5_wall_clock_rate():
    sources = (WaveformSpec("dc", offset_v=2.5),) * 4
    config = DeviceConfig(sources=sources, rate_hz=1.0, clock="wall")
    dev, host = open_loopback()
    timestamps = []
    session = start_session(host, clock=time.monotonic, on_sample=None)
    runner = threading.Thread(target=run_device, args=(config, dev), kwargs={"duration": 10.0})
    t0 = time.monotonic()
    runner.start()
    runner.join(timeout=20)
    dev.close()
    deadline = time.monotonic() + 2.0
    while time.monotonic() < deadline:
        time.sleep(0.05)
        if not session._reader.is_alive():
            break
    samples = session.read_latest(100)
    session.stop()
    frames = len(samples)
    spacings = [
        b.timestamp - a.timestamp for a, b in zip(samples, samples[1:])
    ]
    mean_spacing = sum(spacings) / len(spacings)
    ok = 9 <= frames <= 11 and abs(mean_spacing - 1.0) <= 0.05
    report(
        "criterion 5: wall-clock 1 Hz for 10 s -> 10 +/- 1 frames, spacing within 5%",
        ok,
        f"{frames} frames, mean spacing {mean_spacing:.3f}s",
    )


def test_criterion_6_lm35_reconstruction(tmp_path):
    start = time.monotonic()
    slope = 10.0 / 60.0  # 20 -> 30 degC over 60 s
    lm35 = WaveformSpec("lm35_ramp", temp_start_c=20.0, temp_slope_c_per_s=slope)
    quiet = WaveformSpec("dc", offset_v=0.0)
    config = DeviceConfig(sources=(lm35, quiet, quiet, quiet), rate_hz=1.0)

    state = DeviceState()
    wire = b"".join(device_tick(state, config) for _ in range(60))

    base = datetime(2000, 1, 1)
    tick = {"n": 0}

    def clock():
        t = base + timedelta(seconds=tick["n"])
        tick["n"] += 1
        return t

    session = Session(clock=clock)
    session.start()
    path = str(tmp_path / "lm35.csv")
    session.arm_recording(storage.open_recording(path))
    session.on_bytes(wire)
    session.stop()

    loaded = storage.load_recording(path)
    series = storage.transform_series(loaded, 0, "lm35_celsius")
    assert len(series) == 60
    worst = 0.0
    for k, (_, temp) in enumerate(series):
        truth = 20.0 + slope * k
        worst = max(worst, abs(temp - truth))
    elapsed = time.monotonic() - start
    report(
        "criterion 6: LM35 ramp 20->30 degC recovered within 0.5 degC at all 60 points",
        worst <= 0.5 and elapsed < 2.0,
        f"worst error {worst:.3f} degC, {elapsed:.2f}s",
    )


def test_criterion_7_mask_non_interference(tmp_path):
    start = time.monotonic()
    rng = random.Random(7)
    wire = b"".join(
        encode_frame([rng.randrange(1024) for _ in range(4)]) for _ in range(100)
    )
    paths = []
    for mask in ([True, True, True, True], [True, False, False, False]):
        base = datetime(2000, 1, 1)
        tick = {"n": 0}

        def clock():
            t = base + timedelta(seconds=tick["n"])
            tick["n"] += 1
            return t

        session = Session(clock=clock)
        session.start()
        session.set_channel_mask(mask)
        path = tmp_path / f"mask_{''.join(str(int(m)) for m in mask)}.csv"
        session.arm_recording(storage.open_recording(str(path)))
        session.on_bytes(wire)
        session.stop()
        paths.append(path)
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    elapsed = time.monotonic() - start
    report(
        "criterion 7: recordings under masks 1111 and 1000 are byte-identical",
        identical and elapsed < 2.0,
        f"{elapsed:.2f}s",
    )


def test_criterion_8_gateway_ordering():
    start = time.monotonic()
    holder = {}

    def on_sample(sample, mask):
        holder["gw"].broadcast(sample, mask)

    base = datetime(2000, 1, 1)
    tick = {"n": 0}

    def clock():
        t = base + timedelta(seconds=tick["n"])
        tick["n"] += 1
        return t

    session = Session(clock=clock, on_sample=on_sample)
    session.start()
    # Outbox sized so keeping-up clients never overflow at this volume but a
    # fully stalled client does.
    server = GatewayServer(
        session, port=0, outbox_limit=512, stream_sndbuf=4096, write_limit=4096
    )
    holder["gw"] = server
    server.start()
    try:
        n_clients, n_samples = 10, 1000
        clients = [connect(f"ws://127.0.0.1:{server.port}/stream") for _ in range(n_clients)]

        import socket as socketmod

        stalled_sock = socketmod.socket()
        stalled_sock.setsockopt(socketmod.SOL_SOCKET, socketmod.SO_RCVBUF, 2048)
        stalled_sock.connect(("127.0.0.1", server.port))
        stalled = connect(
            f"ws://127.0.0.1:{server.port}/stream",
            sock=stalled_sock,
            max_queue=1,
            close_timeout=0.5,
        )
        time.sleep(0.2)

        results = [None] * n_clients

        def reader(idx, conn):
            seqs = []
            for _ in range(n_samples):
                msg = json.loads(conn.recv(timeout=30))
                if msg["type"] != "sample":
                    break
                seqs.append(msg["sample"]["seq"])
            results[idx] = seqs

        threads = [
            threading.Thread(target=reader, args=(i, c)) for i, c in enumerate(clients)
        ]
        for t in threads:
            t.start()
        # Paced feed: keeping-up clients must never approach the outbox bound.
        for i in range(n_samples):
            session.on_bytes(encode_frame([i % 1024, 0, 0, 0]))
            if i % 10 == 0:
                time.sleep(0.005)
        for t in threads:
            t.join(timeout=30)

        expected = list(range(n_samples))
        all_ok = all(r == expected for r in results)

        drop_deadline = time.monotonic() + 5.0
        while len(server._clients) > n_clients and time.monotonic() < drop_deadline:
            time.sleep(0.05)
        stalled_dropped = len(server._clients) <= n_clients
        elapsed = time.monotonic() - start

        for c in clients:
            c.close()
        try:
            stalled.close()
        except Exception:
            pass
        report(
            "criterion 8: 10 clients x 1000 samples exactly once in order; stalled client dropped",
            all_ok and stalled_dropped and elapsed < 10.0,
            f"{elapsed:.2f}s",
        )
    finally:
        server.stop()
