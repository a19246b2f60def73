"""Byte-stream transports.

Replaces the RS-232 electrical link with interchangeable backends: an
in-process loopback pair, TCP client/listener, and (on a real machine) an
OS serial device. All backends deliver bytes in order; fragmentation and
coalescing of writes is unspecified, exactly like a real serial line.
"""

from __future__ import annotations

import os
import socket
from typing import Tuple


class TransportError(OSError):
    pass


class ByteStream:
    """One endpoint of an ordered byte channel.

    ``read`` blocks until data is available and returns b"" at end of
    stream; ``write`` raises after close.
    """

    def write(self, data: bytes) -> None:
        raise NotImplementedError

    def read(self, max_bytes: int = 4096) -> bytes:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError


class SocketStream(ByteStream):
    def __init__(self, sock: socket.socket, name: str = "socket"):
        self._sock = sock
        self._closed = False
        self.name = name

    def write(self, data: bytes) -> None:
        if self._closed:
            raise TransportError(f"{self.name}: write after close")
        try:
            self._sock.sendall(data)
        except OSError as exc:
            raise TransportError(f"{self.name}: write failed: {exc}") from exc

    def read(self, max_bytes: int = 4096) -> bytes:
        try:
            return self._sock.recv(max_bytes)
        except OSError:
            # Peer or local close while blocked in recv reads as EOF.
            return b""

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def open_loopback() -> Tuple[ByteStream, ByteStream]:
    """Two connected in-process endpoints; A's writes are B's reads."""
    a, b = socket.socketpair()
    return SocketStream(a, "loopback-a"), SocketStream(b, "loopback-b")


def connect_tcp(host: str, port: int, timeout: float | None = 10.0) -> ByteStream:
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except ConnectionRefusedError:
        raise
    except socket.timeout as exc:
        raise TimeoutError(f"tcp connect to {host}:{port} timed out") from exc
    sock.settimeout(None)
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return SocketStream(sock, f"tcp:{host}:{port}")


class TcpListener:
    """Bound listening socket; ``accept`` yields one ByteStream per client."""

    def __init__(self, host: str, port: int):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._sock.bind((host, port))
        except OSError as exc:
            self._sock.close()
            raise TransportError(f"cannot bind {host}:{port}: {exc}") from exc
        self._sock.listen(1)

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def accept(self) -> ByteStream:
        conn, addr = self._sock.accept()
        conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return SocketStream(conn, f"tcp-peer:{addr[0]}:{addr[1]}")

    def close(self) -> None:
        self._sock.close()


DEFAULT_BAUD = 9600

_BAUD_CONSTANTS = {}
try:  # pragma: no cover - platform dependent
    import termios

    _BAUD_CONSTANTS = {
        1200: termios.B1200,
        2400: termios.B2400,
        4800: termios.B4800,
        9600: termios.B9600,
        19200: termios.B19200,
        38400: termios.B38400,
        57600: termios.B57600,
        115200: termios.B115200,
    }
except ImportError:
    termios = None


class SerialStream(ByteStream):  # pragma: no cover - needs real hardware
    def __init__(self, fd: int, name: str):
        self._fd = fd
        self._closed = False
        self.name = name

    def write(self, data: bytes) -> None:
        if self._closed:
            raise TransportError(f"{self.name}: write after close")
        os.write(self._fd, data)

    def read(self, max_bytes: int = 4096) -> bytes:
        if self._closed:
            return b""
        return os.read(self._fd, max_bytes)

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            os.close(self._fd)


def open_serial_device(path: str, baud: int = DEFAULT_BAUD) -> ByteStream:
    """Open an OS serial device at ``baud``, 8 data bits, no parity, 1 stop."""
    if termios is None:
        raise TransportError("serial devices are not supported on this platform")
    if baud not in _BAUD_CONSTANTS:
        raise TransportError(f"unsupported baud rate: {baud}")
    if not os.path.exists(path):
        raise FileNotFoundError(f"serial device not found: {path}")
    try:
        fd = os.open(path, os.O_RDWR | os.O_NOCTTY)
    except PermissionError:
        raise
    except OSError as exc:
        raise TransportError(f"cannot open serial device {path}: {exc}") from exc
    attrs = termios.tcgetattr(fd)
    speed = _BAUD_CONSTANTS[baud]
    # Raw 8N1: no parity, one stop bit, 8 data bits, no flow control.
    attrs[0] = 0  # iflag
    attrs[1] = 0  # oflag
    attrs[2] = termios.CS8 | termios.CREAD | termios.CLOCAL  # cflag
    attrs[3] = 0  # lflag
    attrs[4] = speed  # ispeed
    attrs[5] = speed  # ospeed
    attrs[6][termios.VMIN] = 1
    attrs[6][termios.VTIME] = 0
    termios.tcsetattr(fd, termios.TCSANOW, attrs)
    return SerialStream(fd, f"serial:{path}")


def parse_transport(spec: str) -> dict:
    """Parse the CLI transport grammar into a descriptor dict.

    Grammar: ``loopback`` | ``tcp-listen:HOST:PORT`` | ``tcp:HOST:PORT`` |
    ``serial:PATH[:BAUD]``.
    """
    if spec == "loopback":
        return {"kind": "loopback"}
    kind, _, rest = spec.partition(":")
    if kind in ("tcp", "tcp-listen"):
        host, sep, port = rest.rpartition(":")
        if not sep or not host:
            raise ValueError(f"bad transport spec {spec!r}: expected {kind}:HOST:PORT")
        try:
            portnum = int(port)
        except ValueError:
            raise ValueError(f"bad port in transport spec {spec!r}") from None
        return {"kind": kind, "host": host, "port": portnum}
    if kind == "serial":
        if not rest:
            raise ValueError("serial transport needs a device path: serial:PATH[:BAUD]")
        path, sep, baud = rest.rpartition(":")
        if sep and baud.isdigit():
            return {"kind": "serial", "path": path, "baud": int(baud)}
        return {"kind": "serial", "path": rest, "baud": DEFAULT_BAUD}
    raise ValueError(f"unknown transport spec: {spec!r}")


def open_transport(spec: str) -> ByteStream:
    """Open a single connected stream for a CLI transport spec.

    ``loopback`` is not valid here (it has two ends; callers that embed a
    local device use :func:`open_loopback` directly). ``tcp-listen`` blocks
    until one client connects.
    """
    desc = parse_transport(spec)
    if desc["kind"] == "tcp":
        return connect_tcp(desc["host"], desc["port"])
    if desc["kind"] == "tcp-listen":
        listener = TcpListener(desc["host"], desc["port"])
        try:
            return listener.accept()
        finally:
            listener.close()
    if desc["kind"] == "serial":
        return open_serial_device(desc["path"], desc["baud"])
    raise ValueError(f"transport {spec!r} cannot be opened as a single endpoint")
