"""Network gateway: session control plus live sample broadcast.

Exposes one acquisition session over WebSocket: ``/control`` is
request/reply (one JSON object per message), ``/stream`` pushes decoded
samples as JSON. Static operator UI assets are served on every other path.

The stream is live-only: a client sees samples from its connect time
onward, never a replay. Each client has a bounded outbox; a client that
falls behind it is disconnected (with a best-effort status message) so the
engine never blocks on slow consumers.
"""

from __future__ import annotations

import asyncio
import json
import mimetypes
import threading
from http import HTTPStatus
from pathlib import Path
from typing import Callable, Optional, Set, Tuple

from websockets.asyncio.server import serve
from websockets.datastructures import Headers
from websockets.http11 import Response

from picdaq import storage
from picdaq.acquisition import Sample, Session, SessionError

DEFAULT_OUTBOX_LIMIT = 1024

CONTROL_COMMANDS = (
    "start",
    "stop",
    "set_mask",
    "set_rate",
    "arm_recording",
    "disarm_recording",
    "get_stats",
)


def sample_message(sample: Sample, mask: Tuple[bool, bool, bool, bool]) -> dict:
    return {
        "type": "sample",
        "sample": {
            "seq": sample.seq,
            "timestamp": sample.timestamp.isoformat(timespec="milliseconds"),
            "codes": list(sample.codes),
            "volts": list(sample.volts),
            "mask": list(mask),
        },
    }


class _StreamClient:
    __slots__ = ("queue", "task", "dropped")

    def __init__(self, limit: int):
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=limit)
        self.task = asyncio.current_task()
        self.dropped = False


class GatewayServer:
    """WebSocket gateway around one Session, on its own event loop thread."""

    def __init__(
        self,
        session: Session,
        host: str = "127.0.0.1",
        port: int = 0,
        ui_dir: Optional[str] = None,
        outbox_limit: int = DEFAULT_OUTBOX_LIMIT,
        rate_setter: Optional[Callable[[float], None]] = None,
        stream_sndbuf: Optional[int] = None,
        write_limit: int = 32768,
    ):
        self.session = session
        self.host = host
        self.port = port
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self.outbox_limit = outbox_limit
        self.rate_setter = rate_setter
        # Caps kernel-side buffering per stream connection so a stalled
        # client backs up into the bounded outbox instead of hiding in
        # socket buffers.
        self.stream_sndbuf = stream_sndbuf
        self.write_limit = write_limit
        self._clients: Set[_StreamClient] = set()
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._thread: Optional[threading.Thread] = None
        self._stop: Optional[asyncio.Future] = None
        self._ready = threading.Event()
        self._startup_error: Optional[BaseException] = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, name="picdaq-gateway", daemon=True)
        self._thread.start()
        self._ready.wait(timeout=10.0)
        if self._startup_error is not None:
            raise self._startup_error

    def stop(self) -> None:
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(
                lambda: self._stop.set_result(None) if not self._stop.done() else None
            )
        if self._thread is not None:
            self._thread.join(timeout=10.0)

    def _run(self) -> None:
        try:
            asyncio.run(self._main())
        except BaseException as exc:  # surface bind failures to start()
            self._startup_error = exc
            self._ready.set()

    async def _main(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._stop = self._loop.create_future()
        try:
            async with serve(
                self._handler,
                self.host,
                self.port,
                process_request=self._process_request,
                close_timeout=1.0,
                write_limit=self.write_limit,
            ) as server:
                self.port = server.sockets[0].getsockname()[1]
                self._ready.set()
                await self._stop
                # Stream handlers block on their outbox; unblock them so the
                # server can close promptly.
                for client in list(self._clients):
                    if client.task is not None:
                        client.task.cancel()
        except OSError as exc:
            self._startup_error = exc
            self._ready.set()

    # -- broadcast ---------------------------------------------------------

    def broadcast(self, sample: Sample, mask: Tuple[bool, bool, bool, bool]) -> None:
        """Thread-safe fan-out of one sample to all stream clients."""
        if self._loop is None:
            return
        text = json.dumps(sample_message(sample, mask))
        try:
            self._loop.call_soon_threadsafe(self._fanout, text)
        except RuntimeError:
            pass  # loop already shut down

    def _fanout(self, text: str) -> None:
        for client in list(self._clients):
            try:
                client.queue.put_nowait(text)
            except asyncio.QueueFull:
                client.dropped = True
                if client.task is not None:
                    client.task.cancel()

    # -- connection handlers -------------------------------------------------

    async def _handler(self, conn) -> None:
        path = conn.request.path.split("?", 1)[0]
        if path == "/stream":
            await self._handle_stream(conn)
        elif path == "/control":
            await self._handle_control(conn)
        else:
            await conn.close(code=1008, reason="unknown path")

    async def _handle_stream(self, conn) -> None:
        if self.stream_sndbuf is not None:
            import socket as _socket

            raw = conn.transport.get_extra_info("socket")
            if raw is not None:
                raw.setsockopt(_socket.SOL_SOCKET, _socket.SO_SNDBUF, self.stream_sndbuf)
        client = _StreamClient(self.outbox_limit)
        self._clients.add(client)
        try:
            while True:
                text = await client.queue.get()
                await conn.send(text)
        except asyncio.CancelledError:
            if not client.dropped:
                raise  # server shutdown, not a slow-consumer drop
            try:
                status = json.dumps(
                    {"type": "status", "status": "disconnected: outbox overflow"}
                )
                await asyncio.wait_for(conn.send(status), timeout=0.5)
            except Exception:
                pass
        finally:
            self._clients.discard(client)

    async def _handle_control(self, conn) -> None:
        async for raw in conn:
            reply = self._dispatch(raw)
            await conn.send(json.dumps(reply))

    def _dispatch(self, raw) -> dict:
        try:
            msg = json.loads(raw)
        except (ValueError, TypeError):
            return {"ok": False, "error": "malformed JSON"}
        if not isinstance(msg, dict):
            return {"ok": False, "error": "message must be a JSON object"}
        cmd = msg.get("cmd")
        try:
            if cmd == "start":
                self.session.start()
                return {"ok": True}
            if cmd == "stop":
                return {"ok": True, "stats": self.session.stop()}
            if cmd == "set_mask":
                mask = msg.get("mask")
                if (
                    not isinstance(mask, list)
                    or len(mask) != 4
                    or not all(isinstance(m, bool) for m in mask)
                ):
                    return {"ok": False, "error": "mask must be a list of 4 booleans"}
                self.session.set_channel_mask(mask)
                return {"ok": True}
            if cmd == "set_rate":
                rate = msg.get("rate_hz")
                if not isinstance(rate, (int, float)) or rate <= 0:
                    return {"ok": False, "error": "rate_hz must be a positive number"}
                if self.rate_setter is None:
                    return {"ok": False, "error": "rate control not available"}
                self.rate_setter(float(rate))
                return {"ok": True}
            if cmd == "arm_recording":
                path = msg.get("path")
                if not isinstance(path, str) or not path:
                    return {"ok": False, "error": "path must be a non-empty string"}
                self.session.arm_recording(storage.open_recording(path))
                return {"ok": True, "path": path}
            if cmd == "disarm_recording":
                return {"ok": True, "rows": self.session.disarm_recording()}
            if cmd == "get_stats":
                return {"ok": True, "stats": self.session.stats()}
        except (SessionError, OSError, ValueError) as exc:
            return {"ok": False, "error": str(exc)}
        return {"ok": False, "error": "unknown command"}

    # -- static assets -----------------------------------------------------

    def _process_request(self, conn, request):
        path = request.path.split("?", 1)[0]
        if path in ("/stream", "/control"):
            return None  # proceed with the WebSocket handshake
        return self._static_response(path)

    def _static_response(self, path: str) -> Response:
        if self.ui_dir is None:
            return _http_response(
                HTTPStatus.NOT_FOUND, "no operator UI installed (run with --ui-dir)\n"
            )
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if self.ui_dir not in target.parents and target != self.ui_dir:
            return _http_response(HTTPStatus.FORBIDDEN, "forbidden\n")
        if not target.is_file():
            return _http_response(HTTPStatus.NOT_FOUND, "not found\n")
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        return Response(
            HTTPStatus.OK,
            "OK",
            Headers(
                [("Content-Type", ctype), ("Content-Length", str(len(body)))]
            ),
            body,
        )


def _http_response(status: HTTPStatus, text: str) -> Response:
    body = text.encode()
    return Response(
        status,
        status.phrase,
        Headers(
            [("Content-Type", "text/plain"), ("Content-Length", str(len(body)))]
        ),
        body,
    )
