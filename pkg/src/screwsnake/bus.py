"""Simulated daisy-chained segment control network.

Each segment carries its own controller node that regulates the two
U-joint axes locally (PID against a first-order, velocity-limited plant)
and passes screw velocity setpoints through. A remote desktop closes the
outer loop: setpoints travel down the chain, sensor frames travel back,
and the round trip grows with hop count:

    rtt(n) = base_rtt + per_hop * n        (milliseconds)

The per-hop model uses n, not n - 1: only that reading reproduces the
measured 14-segment bound at a 75 Hz loop (with n - 1 the 15th segment
would still fit the period; the ambiguity is deliberate and documented,
not silently corrected). All time is virtual milliseconds; nothing here
touches the wall clock, so tests are deterministic.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidGeometryError

TORQUE_LIMIT_NM = 2.1  # continuous U-joint actuator bound
JOINT_VEL_LIMIT = 1.0  # rad/s plant slew at full torque


@dataclass(frozen=True)
class BusModel:
    """Latency/scheduling parameters of the daisy chain."""

    base_rtt_ms: float = 8.85
    per_hop_ms: float = 0.31
    loop_rate_hz: float = 75.0
    jitter_sd_ms: float = 0.11

    def __post_init__(self):
        if self.base_rtt_ms <= 0.0:
            raise InvalidGeometryError("base_rtt_ms must be > 0")
        if self.per_hop_ms < 0.0:
            raise InvalidGeometryError("per_hop_ms must be >= 0")
        if self.loop_rate_hz <= 0.0:
            raise InvalidGeometryError("loop_rate_hz must be > 0")

    @property
    def period_ms(self) -> float:
        return 1000.0 / self.loop_rate_hz


def rtt(model: BusModel, n_segments: int) -> float:
    """Round-trip delay (ms) to segment n and back."""
    if n_segments < 1:
        raise InvalidGeometryError("n_segments must be >= 1")
    return model.base_rtt_ms + model.per_hop_ms * n_segments


def max_segments(model: BusModel) -> float:
    """Largest chain length whose round trip fits inside one loop period.

    Returns 0 if even one segment misses the period and math.inf when the
    per-hop cost is zero (unbounded).
    """
    if rtt(model, 1) >= model.period_ms:
        return 0
    if model.per_hop_ms == 0.0:
        return math.inf
    n = int((model.period_ms - model.base_rtt_ms) / model.per_hop_ms)
    while rtt(model, n + 1) < model.period_ms:
        n += 1
    while n > 0 and rtt(model, n) >= model.period_ms:
        n -= 1
    return n


def scheduling_table(model: BusModel, max_n: int) -> list[dict]:
    return [
        {
            "n": n,
            "rtt_ms": round(rtt(model, n), 6),
            "period_ms": round(model.period_ms, 6),
            "feasible": bool(rtt(model, n) < model.period_ms),
        }
        for n in range(1, max_n + 1)
    ]


class MessageKind(Enum):
    SETPOINT = "setpoint"
    SENSOR = "sensor"


_SETPOINT_FIELDS = {"pitch", "yaw", "screw_omega"}
_SENSOR_FIELDS = {"pitch", "yaw", "screw_omega", "orientation_est",
                  "motor_current", "temperature_c"}


@dataclass
class BusMessage:
    kind: MessageKind
    segment_id: int
    payload: dict
    send_time: float
    deliver_time: float
    deadline_missed: bool = False

    def __post_init__(self):
        if self.deliver_time < self.send_time:
            raise InvalidGeometryError("deliver_time before send_time")
        required = (
            _SETPOINT_FIELDS if self.kind is MessageKind.SETPOINT else _SENSOR_FIELDS
        )
        missing = required - self.payload.keys()
        if missing:
            raise InvalidGeometryError(
                f"{self.kind.value} payload missing fields {sorted(missing)}"
            )


@dataclass
class PidGains:
    kp: float = 12.0
    ki: float = 0.0
    kd: float = 0.0


class PidRegulator:
    """PID with output clamp and back-calculation anti-windup.

    Output is a torque command bounded by the actuator's continuous
    rating; the integrator is frozen whenever pushing it further would
    deepen saturation.
    """

    def __init__(self, gains: PidGains, output_limit: float = TORQUE_LIMIT_NM):
        self.gains = gains
        self.output_limit = output_limit
        self.integral = 0.0
        self.prev_error = 0.0

    def reset(self):
        self.integral = 0.0
        self.prev_error = 0.0

    def step(self, error: float, dt: float) -> float:
        g = self.gains
        derivative = (error - self.prev_error) / dt if dt > 0.0 else 0.0
        self.prev_error = error
        unclamped = g.kp * error + g.ki * (self.integral + error * dt) + g.kd * derivative
        if abs(unclamped) <= self.output_limit:
            self.integral += error * dt
            return unclamped
        clamped = math.copysign(self.output_limit, unclamped)
        # anti-windup: only integrate if it pulls the output off the rail
        if error * clamped < 0.0:
            self.integral += error * dt
        return clamped


class SegmentNode:
    """One segment's local controller: two joint-axis regulators plus a
    screw velocity passthrough, with a first-order velocity-limited
    joint plant (no inertia; the bus module models scheduling, not
    dynamics)."""

    def __init__(self, segment_id: int, gains: PidGains | None = None):
        self.segment_id = segment_id
        gains = gains or PidGains()
        self.reg_pitch = PidRegulator(gains)
        self.reg_yaw = PidRegulator(PidGains(gains.kp, gains.ki, gains.kd))
        self.pitch = 0.0
        self.yaw = 0.0
        self.pitch_setpoint = 0.0
        self.yaw_setpoint = 0.0
        self.screw_omega = 0.0
        self.screw_setpoint = 0.0
        self.last_torques = (0.0, 0.0)

    def apply_setpoint(self, payload: dict):
        self.pitch_setpoint = float(payload.get("pitch", self.pitch_setpoint))
        self.yaw_setpoint = float(payload.get("yaw", self.yaw_setpoint))
        self.screw_setpoint = float(payload.get("screw_omega", self.screw_setpoint))

    def step(self, dt_s: float):
        mobility = JOINT_VEL_LIMIT / TORQUE_LIMIT_NM  # rad/s per N*m
        torques = []
        for reg, attr, target in (
            (self.reg_pitch, "pitch", self.pitch_setpoint),
            (self.reg_yaw, "yaw", self.yaw_setpoint),
        ):
            value = getattr(self, attr)
            torque = reg.step(target - value, dt_s)
            torques.append(torque)
            vel = max(-JOINT_VEL_LIMIT, min(JOINT_VEL_LIMIT, torque * mobility))
            setattr(self, attr, value + vel * dt_s)
        self.screw_omega = self.screw_setpoint  # driver-regulated, immediate
        self.last_torques = tuple(torques)

    def sensor_payload(self) -> dict:
        return {
            "pitch": self.pitch,
            "yaw": self.yaw,
            "screw_omega": self.screw_omega,
            "orientation_est": 0.0,
            "motor_current": abs(self.last_torques[0]) + abs(self.last_torques[1]),
            "temperature_c": 25.0,
        }


class SegmentBus:
    """Event-driven virtual network of daisy-chained segment nodes.

    Messages are delivered in (deliver_time, send order) order, which
    keeps every link FIFO. ``tick`` advances virtual time in node-period
    steps, runs each node's regulation loop, and returns the sensor
    frames that arrived back at the desktop during the window.
    """

    def __init__(self, model: BusModel, n_segments: int, seed: int = 0,
                 gains: PidGains | None = None):
        self.model = model
        self.n_segments = n_segments
        self.nodes = [SegmentNode(i + 1, gains) for i in range(n_segments)]
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.now_ms = 0.0
        self._queue: list = []
        self._seq = 0
        self.delivered: list[BusMessage] = []
        self.deadline_misses = 0
        self._next_loop_ms = 0.0
        self._last_deliver: dict = {}  # per-link FIFO floor under jitter

    def one_way_ms(self, segment_id: int) -> float:
        lat = 0.5 * rtt(self.model, segment_id)
        if self.model.jitter_sd_ms > 0.0:
            lat += self.rng.normal(0.0, self.model.jitter_sd_ms / math.sqrt(2.0))
        return max(lat, 0.0)

    def _push(self, msg: BusMessage):
        # daisy-chained links never reorder: clamp to the link's last delivery
        link = (msg.kind, msg.segment_id)
        floor = self._last_deliver.get(link, 0.0)
        if msg.deliver_time < floor:
            msg.deliver_time = floor
        self._last_deliver[link] = msg.deliver_time
        self._seq += 1
        heapq.heappush(self._queue, (msg.deliver_time, self._seq, msg))

    def send_setpoint(self, segment_id: int, pitch: float, yaw: float,
                      screw_omega: float):
        if not 1 <= segment_id <= self.n_segments:
            raise InvalidGeometryError(f"segment {segment_id} not on the bus")
        latency = self.one_way_ms(segment_id)
        msg = BusMessage(
            kind=MessageKind.SETPOINT,
            segment_id=segment_id,
            payload={"pitch": pitch, "yaw": yaw, "screw_omega": screw_omega},
            send_time=self.now_ms,
            deliver_time=self.now_ms + latency,
            deadline_missed=latency > self.model.period_ms,
        )
        self._push(msg)
        return msg

    def broadcast_setpoints(self, pitches, yaws, screws):
        for i in range(self.n_segments):
            self.send_setpoint(i + 1, pitches[i], yaws[i], screws[i])

    def tick(self, dt_ms: float):
        """Advance virtual time; returns sensor frames received upstream."""
        if dt_ms <= 0.0:
            raise InvalidGeometryError("dt_ms must be > 0")
        end = self.now_ms + dt_ms
        period = self.model.period_ms
        received = []
        while self._next_loop_ms <= end + 1e-12:
            loop_t = self._next_loop_ms
            # deliver everything due by this loop boundary
            while self._queue and self._queue[0][0] <= loop_t + 1e-12:
                _, _, msg = heapq.heappop(self._queue)
                self.delivered.append(msg)
                if msg.deadline_missed:
                    self.deadline_misses += 1
                if msg.kind is MessageKind.SETPOINT:
                    self.nodes[msg.segment_id - 1].apply_setpoint(msg.payload)
                else:
                    received.append(msg)
            self.now_ms = loop_t
            for node in self.nodes:
                node.step(period / 1000.0)
                up = BusMessage(
                    kind=MessageKind.SENSOR,
                    segment_id=node.segment_id,
                    payload=node.sensor_payload(),
                    send_time=loop_t,
                    deliver_time=loop_t + self.one_way_ms(node.segment_id),
                )
                self._push(up)
            self._next_loop_ms += period
        # deliver any sensor frames that arrive before the window closes
        while self._queue and self._queue[0][0] <= end + 1e-12:
            _, _, msg = heapq.heappop(self._queue)
            self.delivered.append(msg)
            if msg.kind is MessageKind.SETPOINT:
                if msg.deadline_missed:
                    self.deadline_misses += 1
                self.nodes[msg.segment_id - 1].apply_setpoint(msg.payload)
            else:
                received.append(msg)
        self.now_ms = end
        return received

    def joint_angles(self):
        """Current yaw joint angles regulated by the nodes (rad)."""
        return [node.yaw for node in self.nodes]

    def write_trace_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["send_time", "deliver_time", "kind", "segment_id", "deadline_missed"]
            )
            for msg in self.delivered:
                writer.writerow(
                    [
                        repr(msg.send_time),
                        repr(msg.deliver_time),
                        msg.kind.value,
                        msg.segment_id,
                        int(msg.deadline_missed),
                    ]
                )


def measure_rtt(model: BusModel, n_segments: int, samples: int, seed: int = 0):
    """Simulated round-trip measurement to the last node, like pinging the
    chain end repeatedly. Returns an array of RTT samples (ms)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    base = rtt(model, n_segments)
    if model.jitter_sd_ms <= 0.0:
        return np.full(samples, base)
    one_way_sd = model.jitter_sd_ms / math.sqrt(2.0)
    down = rng.normal(0.0, one_way_sd, samples)
    up = rng.normal(0.0, one_way_sd, samples)
    return base + down + up
