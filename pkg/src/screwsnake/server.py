"""Teleop network endpoint: JSON messages over TCP lines or WebSocket.

Both transports carry identical JSON payloads (the wire protocol in
teleop.py); newline-delimited JSON on the TCP port suits scripted
clients, the WebSocket port serves the browser console. One pilot session
is active at a time; extra connections receive an occupied error. The
session's virtual clock is paced against the wall clock at the bus loop
rate.
"""

from __future__ import annotations

import asyncio
import json
import math

from . import miniws
from .bus import BusModel
from .chain import ChainGeometry
from .errors import FrameRejectedError, SessionOccupiedError
from .teleop import ClampPolicy, SessionRegistry, TeleopSession
from .terrain import TerrainProfile, resolve_profile


def error_message(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


class _Transport:
    """Uniform send/recv over either framing."""

    def __init__(self, send, recv, close):
        self.send = send
        self.recv = recv
        self.close = close


class TeleopServer:
    def __init__(
        self,
        geom: ChainGeometry | None = None,
        terrain: TerrainProfile | str = "ideal_screw_medium",
        policy: ClampPolicy | None = None,
        bus_model: BusModel | None = None,
        host: str = "127.0.0.1",
        tcp_port: int = 8765,
        ws_port: int = 8766,
        realtime: bool = True,
        seed: int = 0,
    ):
        self.geom = geom or ChainGeometry()
        self.terrain = resolve_profile(terrain)
        self.policy = policy or ClampPolicy(joint_limit=self.geom.joint_limit)
        self.bus_model = bus_model or BusModel()
        self.host = host
        self.tcp_port = tcp_port
        self.ws_port = ws_port
        self.realtime = realtime
        self.seed = seed
        self.registry = SessionRegistry()
        self._servers = []

    def _make_session(self) -> TeleopSession:
        return TeleopSession(
            self.geom,
            self.terrain,
            policy=self.policy,
            bus_model=self.bus_model,
            seed=self.seed,
        )

    async def _pilot_loop(self, transport: _Transport):
        try:
            session = self.registry.claim(self._make_session)
        except SessionOccupiedError as exc:
            await transport.send(json.dumps(error_message("occupied", str(exc))))
            await transport.close()
            return
        await transport.send(json.dumps(session.config_message()))
        period_s = self.bus_model.period_ms / 1000.0
        stop = asyncio.Event()

        async def reader():
            while not stop.is_set():
                try:
                    text = await transport.recv()
                except (asyncio.IncompleteReadError, miniws.WebSocketClosed,
                        ConnectionError):
                    break
                if not text:
                    break
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    await transport.send(
                        json.dumps(error_message("bad_json", "unparseable message"))
                    )
                    continue
                if msg.get("type") != "frame":
                    await transport.send(
                        json.dumps(
                            error_message("bad_type", f"unexpected {msg.get('type')!r}")
                        )
                    )
                    continue
                try:
                    session.submit_wire(msg)
                except FrameRejectedError as exc:
                    await transport.send(
                        json.dumps(error_message("frame_rejected", str(exc)))
                    )
            stop.set()

        async def ticker():
            loop = asyncio.get_running_loop()
            next_t = loop.time()
            while not stop.is_set():
                update = session.tick()
                if update is not None:
                    try:
                        await transport.send(json.dumps(update.to_wire()))
                    except (ConnectionError, RuntimeError):
                        break
                if self.realtime:
                    next_t += period_s
                    delay = next_t - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)
            stop.set()

        try:
            await asyncio.gather(reader(), ticker())
        finally:
            self.registry.release(session)
            await transport.close()

    # -- transports ----------------------------------------------------------

    async def _handle_tcp(self, reader, writer):
        async def send(text):
            writer.write(text.encode() + b"\n")
            await writer.drain()

        async def recv():
            line = await reader.readline()
            return line.decode().strip()

        async def close():
            try:
                writer.close()
                await writer.wait_closed()
            except ConnectionError:
                pass

        await self._pilot_loop(_Transport(send, recv, close))

    async def _handle_ws(self, reader, writer):
        try:
            await miniws.server_handshake(reader, writer)
        except miniws.WebSocketClosed:
            writer.close()
            return
        conn = miniws.WebSocketConnection(reader, writer, is_client=False)
        await self._pilot_loop(
            _Transport(conn.send_text, conn.recv_text, conn.close)
        )

    async def start(self):
        self._servers = [
            await asyncio.start_server(self._handle_tcp, self.host, self.tcp_port),
            await asyncio.start_server(self._handle_ws, self.host, self.ws_port),
        ]
        # resolve ephemeral ports (port 0 requests)
        self.tcp_port = self._servers[0].sockets[0].getsockname()[1]
        self.ws_port = self._servers[1].sockets[0].getsockname()[1]
        return self

    async def stop(self):
        for srv in self._servers:
            srv.close()
            await srv.wait_closed()
        self._servers = []

    async def serve_forever(self):
        await self.start()
        try:
            await asyncio.gather(
                *(srv.serve_forever() for srv in self._servers)
            )
        finally:
            await self.stop()


def frame_message(seq: int, t_ms: float, deflections, screw: float = 0.0,
                  pitches=None, mode: str | None = None) -> dict:
    """Convenience builder for client frame messages."""
    n = len(deflections)
    pitches = pitches or [0.0] * n
    msg = {
        "type": "frame",
        "seq": seq,
        "t_ms": t_ms,
        "joints": [
            {"pitch_rad": float(pitches[i]), "yaw_rad": float(deflections[i])}
            for i in range(n)
        ],
        "screw": float(screw),
    }
    if mode is not None:
        msg["mode"] = mode
    return msg


def run_server(port: int = 8765, ws_port: int | None = None,
               terrain: str = "ideal_screw_medium",
               device_limit_deg: float = 80.0, seed: int = 0):
    """Blocking entry point used by the CLI serve subcommand."""
    geom = ChainGeometry()
    server = TeleopServer(
        geom=geom,
        terrain=terrain,
        policy=ClampPolicy(
            device_limit=math.radians(device_limit_deg),
            joint_limit=geom.joint_limit,
        ),
        tcp_port=port,
        ws_port=ws_port if ws_port is not None else port + 1,
        seed=seed,
    )
    asyncio.run(server.serve_forever())
