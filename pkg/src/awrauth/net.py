"""Framed wire protocol and two-process endpoints for real network rounds.

Transport security is deliberately absent: the TCP stream is the untrusted
channel, and the only guarantee on offer is the authenticity the round itself
provides.  One connection carries exactly one round.

Frame layout (big-endian throughout):

    magic   4 bytes  ASCII "AWR1"
    type    1 byte   0x01 TRANSCRIPT_CHUNK, 0x02 TAG, 0x03 RESPONSE,
                     0x04 RESULT, 0x05 HELLO, 0x06 ABORT
    length  4 bytes  payload length, at most 2^20
    payload

HELLO payload: 1 byte mode (0 plain, 1 hidden) | 1 byte scheme (0 awr,
1 straightforward) | 2 bytes tag_bits | 4 bytes max_blocks.
RESULT payload: 1 byte verdict (1 accepted, 0 rejected).
"""

from __future__ import annotations

import socket
import struct
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .asu2 import FamilyParams, MessageBlocks
from .errors import ConfigMismatch, FrameMalformed, PoolExhausted
from .keys import KeyPool
from .protocol import (
    ACCEPTED,
    REJECTED,
    REASON_TIMEOUT,
    AliceSession,
    BobSession,
    Response,
    RoundOutcome,
)
from . import asu2

MAGIC = b"AWR1"
MAX_PAYLOAD = 1 << 20
CHUNK_SIZE = 1 << 14

TRANSCRIPT_CHUNK = 0x01
TAG = 0x02
RESPONSE = 0x03
RESULT = 0x04
HELLO = 0x05
ABORT = 0x06

_TYPES = {TRANSCRIPT_CHUNK, TAG, RESPONSE, RESULT, HELLO, ABORT}
_MODES = {"plain": 0, "hidden": 1}
_SCHEMES = {"awr": 0, "straightforward": 1}


@dataclass(frozen=True)
class Frame:
    msg_type: int
    payload: bytes = b""

    def encode(self) -> bytes:
        if self.msg_type not in _TYPES:
            raise FrameMalformed(f"unknown frame type {self.msg_type:#x}")
        if len(self.payload) > MAX_PAYLOAD:
            raise FrameMalformed("payload exceeds 1 MiB")
        return MAGIC + struct.pack(">BI", self.msg_type, len(self.payload)) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "Frame":
        if len(data) < 9:
            raise FrameMalformed("frame shorter than its header")
        if data[:4] != MAGIC:
            raise FrameMalformed("bad magic")
        msg_type, length = struct.unpack(">BI", data[4:9])
        if msg_type not in _TYPES:
            raise FrameMalformed(f"unknown frame type {msg_type:#x}")
        if length > MAX_PAYLOAD:
            raise FrameMalformed("declared payload exceeds 1 MiB")
        if len(data) != 9 + length:
            raise FrameMalformed("frame length mismatch")
        return cls(msg_type, data[9:])


@dataclass(frozen=True)
class SessionConfig:
    role: str  # "initiator" | "responder"
    mode: str = "plain"
    scheme: str = "awr"
    family: FamilyParams = None
    key_file: Optional[str] = None
    key_seed: Optional[int] = None
    key_count: int = 16
    timeout: float = 10.0

    def hello_payload(self) -> bytes:
        return struct.pack(
            ">BBHI",
            _MODES[self.mode],
            _SCHEMES[self.scheme],
            self.family.tag_bits,
            self.family.max_blocks,
        )

    def load_pool(self) -> KeyPool:
        if self.key_file is not None:
            return KeyPool.from_file(self.key_file, self.family)
        if self.key_seed is not None:
            return KeyPool.from_seed(self.key_seed, self.key_count, self.family)
        raise PoolExhausted("no key source configured")


def _recv_exact(sock, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        part = sock.recv(n - len(buf))
        if not part:
            raise ConnectionError("peer closed the connection")
        buf += part
    return buf


def read_frame(sock) -> Frame:
    header = _recv_exact(sock, 9)
    if header[:4] != MAGIC:
        raise FrameMalformed("bad magic")
    msg_type, length = struct.unpack(">BI", header[4:9])
    if msg_type not in _TYPES:
        raise FrameMalformed(f"unknown frame type {msg_type:#x}")
    if length > MAX_PAYLOAD:
        raise FrameMalformed("declared payload exceeds 1 MiB")
    return Frame(msg_type, _recv_exact(sock, length))


def send_frame(sock, frame: Frame) -> None:
    sock.sendall(frame.encode())


def _handshake(sock, config: SessionConfig, initiate: bool) -> None:
    """Exchange HELLO frames; ConfigMismatch aborts before any key is drawn."""
    mine = config.hello_payload()
    if initiate:
        send_frame(sock, Frame(HELLO, mine))
        reply = read_frame(sock)
        if reply.msg_type == ABORT:
            raise ConfigMismatch(reply.payload.decode("utf-8", "replace"))
        if reply.msg_type != HELLO:
            raise FrameMalformed(f"expected HELLO, got type {reply.msg_type:#x}")
        if reply.payload != mine:
            raise ConfigMismatch("peer HELLO disagrees")
    else:
        try:
            frame = read_frame(sock)
        except FrameMalformed:
            send_frame(sock, Frame(ABORT, b"malformed frame"))
            raise
        if frame.msg_type != HELLO:
            send_frame(sock, Frame(ABORT, b"expected HELLO"))
            raise FrameMalformed(f"expected HELLO, got type {frame.msg_type:#x}")
        if frame.payload != mine:
            send_frame(sock, Frame(ABORT, b"config mismatch"))
            raise ConfigMismatch("peer HELLO disagrees")
        send_frame(sock, Frame(HELLO, mine))


def _tag_to_wire(t: int, params: FamilyParams) -> bytes:
    return t.to_bytes(params.tag_bytes, "big")


def _tag_from_wire(payload: bytes, params: FamilyParams) -> int:
    if len(payload) != params.tag_bytes:
        raise FrameMalformed("tag payload has the wrong width")
    return int.from_bytes(payload, "big")


def run_initiator(config: SessionConfig, address, transcript: bytes = b"") -> RoundOutcome:
    """Connect, stream the transcript, authenticate, and report both verdicts."""
    with socket.create_connection(address, timeout=config.timeout) as sock:
        sock.settimeout(config.timeout)
        _handshake(sock, config, initiate=True)
        pool = config.load_pool()
        family = config.family
        for i in range(0, len(transcript), CHUNK_SIZE):
            send_frame(sock, Frame(TRANSCRIPT_CHUNK, transcript[i : i + CHUNK_SIZE]))
        m_a = MessageBlocks.from_bytes(transcript, family)
        if config.scheme == "awr":
            alice = AliceSession(family, pool.draw(), m_a)
            send_frame(sock, Frame(TAG, _tag_to_wire(alice.send_tag(), family)))
            try:
                frame = read_frame(sock)
            except (TimeoutError, socket.timeout):
                return RoundOutcome(
                    REJECTED, REJECTED, REASON_TIMEOUT, 1, config.scheme, config.mode
                )
            if frame.msg_type != RESPONSE:
                raise FrameMalformed(f"expected RESPONSE, got type {frame.msg_type:#x}")
            final = alice.receive_response(Response.parse(frame.payload, family))
            keys_used = 1
            my_verdict, reason = final.verdict, final.reason
        else:
            k1, k2 = pool.draw(), pool.draw()
            send_frame(sock, Frame(TAG, _tag_to_wire(asu2.tag(k1, m_a, family), family)))
            try:
                frame = read_frame(sock)
            except (TimeoutError, socket.timeout):
                return RoundOutcome(
                    REJECTED, REJECTED, REASON_TIMEOUT, 2, config.scheme, config.mode
                )
            if frame.msg_type != TAG:
                raise FrameMalformed(f"expected TAG, got type {frame.msg_type:#x}")
            ok = _tag_from_wire(frame.payload, family) == asu2.tag(k2, m_a, family)
            keys_used = 2
            my_verdict = ACCEPTED if ok else REJECTED
            reason = None if ok else "tag-mismatch"
        send_frame(sock, Frame(RESULT, bytes([1 if my_verdict == ACCEPTED else 0])))
        try:
            result = read_frame(sock)
        except (TimeoutError, socket.timeout):
            return RoundOutcome(
                my_verdict, REJECTED, reason or REASON_TIMEOUT, keys_used,
                config.scheme, config.mode,
            )
        if result.msg_type != RESULT:
            raise FrameMalformed(f"expected RESULT, got type {result.msg_type:#x}")
        peer = ACCEPTED if result.payload == b"\x01" else REJECTED
        return RoundOutcome(my_verdict, peer, reason, keys_used, config.scheme, config.mode)


def open_listener(listen_address) -> socket.socket:
    """Bind a listening socket; callers read the chosen port off it."""
    srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    srv.bind(listen_address)
    srv.listen(1)
    return srv


def run_responder(
    config: SessionConfig, listen_address=None, listener: Optional[socket.socket] = None
) -> RoundOutcome:
    """Accept one connection, run one round, and report both verdicts."""
    own = listener is None
    srv = listener if listener is not None else open_listener(listen_address)
    try:
        srv.settimeout(config.timeout)
        conn, _ = srv.accept()
        with conn:
            conn.settimeout(config.timeout)
            return _serve_connection(conn, config)
    finally:
        if own:
            srv.close()


def _serve_connection(conn, config: SessionConfig) -> RoundOutcome:
    _handshake(conn, config, initiate=False)
    pool = config.load_pool()
    family = config.family
    chunks = []
    try:
        frame = read_frame(conn)
        while frame.msg_type == TRANSCRIPT_CHUNK:
            chunks.append(frame.payload)
            frame = read_frame(conn)
    except (TimeoutError, socket.timeout):
        return RoundOutcome(
            REJECTED, REJECTED, REASON_TIMEOUT, 0, config.scheme, config.mode
        )
    except FrameMalformed:
        send_frame(conn, Frame(ABORT, b"malformed frame"))
        raise
    m_b = MessageBlocks.from_bytes(b"".join(chunks), family)
    if frame.msg_type != TAG:
        send_frame(conn, Frame(ABORT, b"expected TAG"))
        raise FrameMalformed(f"expected TAG, got type {frame.msg_type:#x}")
    if config.scheme == "awr":
        bob = BobSession(family, pool.draw(), m_b)
        response = bob.receive_tag(_tag_from_wire(frame.payload, family), config.mode)
        send_frame(conn, Frame(RESPONSE, response.serialize(family)))
        keys_used = 1
        my_verdict = bob.verdict
        bob.finish()
    else:
        k1, k2 = pool.draw(), pool.draw()
        ok = _tag_from_wire(frame.payload, family) == asu2.tag(k1, m_b, family)
        send_frame(conn, Frame(TAG, _tag_to_wire(asu2.tag(k2, m_b, family), family)))
        keys_used = 2
        my_verdict = ACCEPTED if ok else REJECTED
    try:
        result = read_frame(conn)
    except (TimeoutError, socket.timeout):
        return RoundOutcome(
            REJECTED, my_verdict, REASON_TIMEOUT, keys_used, config.scheme, config.mode
        )
    if result.msg_type != RESULT:
        raise FrameMalformed(f"expected RESULT, got type {result.msg_type:#x}")
    peer = ACCEPTED if result.payload == b"\x01" else REJECTED
    send_frame(conn, Frame(RESULT, bytes([1 if my_verdict == ACCEPTED else 0])))
    if my_verdict == REJECTED:
        reason = "tag-mismatch"
    elif peer == REJECTED:
        reason = "peer-reject"
    else:
        reason = None
    return RoundOutcome(peer, my_verdict, reason, keys_used, config.scheme, config.mode)


class TamperProxy:
    """In-network adversary: forwards frames after applying a byte-level rule.

    ``rule(raw, direction)`` gets one encoded frame and returns replacement
    bytes or None to drop it; direction is "up" (initiator to responder) or
    "down".  Captured (direction, raw) pairs are appended to ``captured``.
    """

    def __init__(self, forward_address, rule: Optional[Callable] = None, listen_address=("127.0.0.1", 0)):
        self.forward_address = forward_address
        self.rule = rule or (lambda raw, direction: raw)
        self.listener = open_listener(listen_address)
        self.port = self.listener.getsockname()[1]
        self.captured: list = []
        self._threads: list = []

    def serve_one(self, timeout: float = 10.0) -> None:
        """Accept one client and pump frames both ways until either side closes."""
        self.listener.settimeout(timeout)
        client, _ = self.listener.accept()
        upstream = socket.create_connection(self.forward_address, timeout=timeout)
        client.settimeout(timeout)
        upstream.settimeout(timeout)

        def pump(src, dst, direction):
            try:
                while True:
                    frame = read_frame(src)
                    raw = frame.encode()
                    self.captured.append((direction, raw))
                    replacement = self.rule(raw, direction)
                    if replacement is None:
                        continue
                    dst.sendall(replacement)
            except (ConnectionError, FrameMalformed, TimeoutError, socket.timeout, OSError):
                pass
            finally:
                for s in (src, dst):
                    try:
                        s.shutdown(socket.SHUT_RDWR)
                    except OSError:
                        pass

        threads = [
            threading.Thread(target=pump, args=(client, upstream, "up"), daemon=True),
            threading.Thread(target=pump, args=(upstream, client, "down"), daemon=True),
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        client.close()
        upstream.close()

    def start(self, timeout: float = 10.0) -> None:
        t = threading.Thread(target=self.serve_one, args=(timeout,), daemon=True)
        t.start()
        self._threads.append(t)

    def close(self) -> None:
        self.listener.close()


def flip_tag_bit_rule(raw: bytes, direction: str):
    """Flip the lowest bit of the TAG payload; forward everything else."""
    frame = Frame.decode(raw)
    if frame.msg_type == TAG and frame.payload:
        flipped = frame.payload[:-1] + bytes([frame.payload[-1] ^ 1])
        return Frame(TAG, flipped).encode()
    return raw


def drop_response_rule(raw: bytes, direction: str):
    frame = Frame.decode(raw)
    if frame.msg_type == RESPONSE:
        return None
    return raw


def corrupt_response_rule(raw: bytes, direction: str):
    """Replace a key-reveal response with an arbitrary wrong key of equal width."""
    frame = Frame.decode(raw)
    if frame.msg_type == RESPONSE and frame.payload:
        forged = bytes(b ^ 0xFF for b in frame.payload)
        return Frame(RESPONSE, forged).encode()
    return raw
