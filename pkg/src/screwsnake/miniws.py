"""Minimal RFC 6455 WebSocket layer (text frames) over asyncio streams.

The package mirror carries no websocket library, so the teleop server
implements the handshake and framing itself; only the subset the gateway
needs is supported: text messages, close, and ping/pong. Both the server
accept path and a client connect path (used by tests and tooling) live
here.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import os
import struct

GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WebSocketClosed(Exception):
    pass


def accept_key(key: str) -> str:
    digest = hashlib.sha1((key + GUID).encode()).digest()
    return base64.b64encode(digest).decode()


async def _read_http_head(reader: asyncio.StreamReader) -> list[str]:
    raw = await reader.readuntil(b"\r\n\r\n")
    return raw.decode("latin-1").split("\r\n")


async def server_handshake(reader, writer) -> dict:
    """Perform the server side of the upgrade; returns the header map."""
    lines = await _read_http_head(reader)
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, _, v = line.partition(":")
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    if not key or "websocket" not in headers.get("upgrade", "").lower():
        writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        await writer.drain()
        raise WebSocketClosed("not a websocket upgrade")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n\r\n"
    )
    writer.write(response.encode("latin-1"))
    await writer.drain()
    return headers


async def client_handshake(reader, writer, host: str, path: str = "/"):
    key = base64.b64encode(os.urandom(16)).decode()
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n\r\n"
    )
    writer.write(request.encode("latin-1"))
    await writer.drain()
    lines = await _read_http_head(reader)
    if "101" not in lines[0]:
        raise WebSocketClosed(f"handshake rejected: {lines[0]}")
    for line in lines[1:]:
        if line.lower().startswith("sec-websocket-accept:"):
            got = line.partition(":")[2].strip()
            if got != accept_key(key):
                raise WebSocketClosed("bad Sec-WebSocket-Accept")
            return
    raise WebSocketClosed("missing Sec-WebSocket-Accept")


def encode_frame(payload: bytes, opcode: int = OP_TEXT, mask: bool = False) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0x00
    if n < 126:
        head += bytes([mask_bit | n])
    elif n < 1 << 16:
        head += bytes([mask_bit | 126]) + struct.pack(">H", n)
    else:
        head += bytes([mask_bit | 127]) + struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        masked = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        return head + key + masked
    return head + payload


async def read_frame(reader: asyncio.StreamReader):
    """Returns (opcode, payload bytes); raises WebSocketClosed on EOF/close."""
    try:
        b1, b2 = await reader.readexactly(2)
    except (asyncio.IncompleteReadError, ConnectionResetError):
        raise WebSocketClosed("connection dropped") from None
    opcode = b1 & 0x0F
    masked = bool(b2 & 0x80)
    length = b2 & 0x7F
    if length == 126:
        (length,) = struct.unpack(">H", await reader.readexactly(2))
    elif length == 127:
        (length,) = struct.unpack(">Q", await reader.readexactly(8))
    key = await reader.readexactly(4) if masked else b""
    payload = await reader.readexactly(length) if length else b""
    if masked:
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    if opcode == OP_CLOSE:
        raise WebSocketClosed("close frame")
    return opcode, payload


class WebSocketConnection:
    """Thin text-message transport over an established (upgraded) stream."""

    def __init__(self, reader, writer, is_client: bool):
        self.reader = reader
        self.writer = writer
        self.is_client = is_client

    async def send_text(self, text: str):
        self.writer.write(encode_frame(text.encode(), OP_TEXT, mask=self.is_client))
        await self.writer.drain()

    async def recv_text(self) -> str:
        while True:
            opcode, payload = await read_frame(self.reader)
            if opcode == OP_PING:
                self.writer.write(
                    encode_frame(payload, OP_PONG, mask=self.is_client)
                )
                await self.writer.drain()
                continue
            if opcode in (OP_TEXT, 0x0):
                return payload.decode()

    async def close(self):
        try:
            self.writer.write(encode_frame(b"", OP_CLOSE, mask=self.is_client))
            await self.writer.drain()
        except (ConnectionError, RuntimeError):
            pass
        self.writer.close()


async def connect(host: str, port: int, path: str = "/") -> WebSocketConnection:
    reader, writer = await asyncio.open_connection(host, port)
    await client_handshake(reader, writer, f"{host}:{port}", path)
    return WebSocketConnection(reader, writer, is_client=True)
