"""Teleoperation gateway: clamping, session state, and frame dispatch.

Clients stream joint frames (a virtual scaled-model input device); the
gateway clamps each axis into the device's restricted box, which is
strictly inside the robot's joint limits, maps the frame to setpoints for
the active control mode, and forwards them over the segment bus. State
updates flow back at a fixed fraction of the bus loop rate.

Wire angles are deflections (0 = straight) in radians. Mode dispatch:

  * TELEOP: yaw deflections pass through as joint setpoints (pitch is
    carried to the nodes but ignored by the planar simulator)
  * TUNNELING: joints[0].yaw steers; full device deflection commands the
    tightest feasible radius, zero commands straight driving
  * M_CONFIG: frames carry (theta_m, R_m, speed): joints[0].yaw maps
    linearly to path curvature (full deflection = 1/MIN_CONTROL_RADIUS),
    joints[1].yaw sets the body angle (theta_m = pi - |yaw|, falling back
    to the session's operating angle when centered), and the screw
    fraction is the base speed

The session is virtual-time (milliseconds) and single-pilot; the
simulation keeps its head-frame reference in every control mode.
Frames are coalesced last-write-wins between bus ticks; silence beyond
the hold timeout freezes the last setpoints and flags the hold state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import mconfig, tunneling
from .bus import BusModel, SegmentBus
from .chain import ChainGeometry
from .errors import FrameRejectedError, InvalidGeometryError, SessionOccupiedError
from .sim import Mode, Simulator
from .terrain import TerrainProfile, realized_velocity

DEFAULT_DEVICE_LIMIT = math.radians(80.0)
HOLD_TIMEOUT_MS = 500.0
MIN_CONTROL_RADIUS = 0.25  # tightest M-config radius at full steer


@dataclass(frozen=True)
class ClampPolicy:
    """Axis-aligned joint-space box of the input device (per axis, rad)."""

    device_limit: float = DEFAULT_DEVICE_LIMIT
    joint_limit: float = math.pi / 2

    def __post_init__(self):
        if not 0.0 < self.device_limit < self.joint_limit:
            raise InvalidGeometryError(
                "device_limit must satisfy 0 < device_limit < joint_limit"
            )


@dataclass(frozen=True)
class TeleopFrame:
    """One input-device sample: per-joint (pitch, yaw) deflections."""

    seq: int
    t_ms: float
    joints: tuple[tuple[float, float], ...]  # (pitch, yaw) per joint
    screw: float = 0.0
    mode: str | None = None

    @classmethod
    def from_wire(cls, msg: dict) -> "TeleopFrame":
        try:
            joints = tuple(
                (float(j["pitch_rad"]), float(j["yaw_rad"])) for j in msg["joints"]
            )
            frame = cls(
                seq=int(msg["seq"]),
                t_ms=float(msg["t_ms"]),
                joints=joints,
                screw=float(msg.get("screw", 0.0)),
                mode=msg.get("mode"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FrameRejectedError(f"malformed frame: {exc}") from exc
        for p, y in frame.joints:
            if not (math.isfinite(p) and math.isfinite(y)):
                raise FrameRejectedError("non-finite joint angle")
        if not math.isfinite(frame.screw):
            raise FrameRejectedError("non-finite screw fraction")
        return frame


def clamp(frame: TeleopFrame, policy: ClampPolicy):
    """Clamp every axis into the device box; returns (joints, flags).

    ``flags`` marks, per joint, whether either axis was clamped. Clamping
    is idempotent by construction.
    """
    lim = policy.device_limit
    clamped = []
    flags = []
    for p, y in frame.joints:
        cp = min(max(p, -lim), lim)
        cy = min(max(y, -lim), lim)
        clamped.append((cp, cy))
        flags.append(cp != p or cy != y)
    return tuple(clamped), tuple(flags)


@dataclass
class StateUpdate:
    t_ms: float
    pose: tuple[float, float, float]
    joints: tuple[tuple[float, float], ...]  # (pitch, yaw) deflections
    clamped: tuple[bool, ...]
    speeds: tuple[float, ...]
    misses: int
    holding: bool = False
    drop_count: int = 0

    def to_wire(self) -> dict:
        return {
            "type": "state",
            "t_ms": self.t_ms,
            "pose": {"x": self.pose[0], "y": self.pose[1], "psi": self.pose[2]},
            "joints": [
                {"pitch_rad": p, "yaw_rad": y} for p, y in self.joints
            ],
            "clamped": list(self.clamped),
            "speeds": list(self.speeds),
            "misses": self.misses,
        }


class TeleopSession:
    """Virtual-time pilot session bridging frames -> bus -> simulator."""

    def __init__(
        self,
        geom: ChainGeometry,
        terrain: TerrainProfile,
        policy: ClampPolicy | None = None,
        bus_model: BusModel | None = None,
        seed: int = 0,
        updates_per_n_ticks: int = 1,
        theta_m: float = mconfig.DEFAULT_THETA_M,
        hold_timeout_ms: float = HOLD_TIMEOUT_MS,
    ):
        self.geom = geom
        self.policy = policy or ClampPolicy(joint_limit=geom.joint_limit)
        self.bus_model = bus_model or BusModel()
        self.bus = SegmentBus(self.bus_model, geom.n_segments, seed=seed)
        self.sim = Simulator(
            geom,
            terrain,
            Mode.TELEOP,
            dt=self.bus_model.period_ms / 1000.0,
            seed=seed,
        )
        self.theta_m = theta_m
        self.updates_per_n_ticks = max(1, updates_per_n_ticks)
        self.hold_timeout_ms = hold_timeout_ms
        self.control_mode = "TELEOP"
        self.now_ms = 0.0
        self.last_frame_ms = 0.0
        self.last_seq = -1
        self.drop_count = 0
        self.pending: TeleopFrame | None = None
        self.last_flags = (False,) * geom.n_joints
        self._tick_count = 0
        self._pitch_setpoints = [0.0] * geom.n_joints

    # -- frame intake -------------------------------------------------------

    def submit(self, frame: TeleopFrame) -> bool:
        """Queue a frame; stale sequence numbers are dropped (returns False)."""
        if frame.seq <= self.last_seq:
            self.drop_count += 1
            return False
        if len(frame.joints) != self.geom.n_joints:
            raise FrameRejectedError(
                f"expected {self.geom.n_joints} joints, got {len(frame.joints)}"
            )
        if frame.mode and frame.mode.upper() not in (
            "TELEOP", "TUNNELING", "M_CONFIG",
        ):
            raise FrameRejectedError(f"unknown mode request {frame.mode!r}")
        self.last_seq = frame.seq
        self.last_frame_ms = self.now_ms
        self.pending = frame  # last-write-wins until the next bus tick
        return True

    def submit_wire(self, msg: dict) -> bool:
        return self.submit(TeleopFrame.from_wire(msg))

    # -- dispatch -----------------------------------------------------------

    def _apply_pending(self):
        frame = self.pending
        if frame is None:
            return
        self.pending = None
        if frame.mode:
            self.control_mode = frame.mode.upper()
        joints, flags = clamp(frame, self.policy)
        self.last_flags = flags
        screw = min(max(frame.screw, -1.0), 1.0)
        if self.control_mode == "TUNNELING":
            steer = joints[0][1]
            radius = self._steer_to_radius(steer, tight=self.geom.r_min)
            sp = tunneling.tunneling_setpoints(
                self.geom, tunneling.TunnelingCommand(radius, screw)
            )
            yaw_angles = sp.joint_angles
            omegas = sp.screw_omegas
        elif self.control_mode == "M_CONFIG":
            steer = joints[0][1]
            radius = self._steer_to_radius(steer, tight=MIN_CONTROL_RADIUS)
            shape = abs(joints[1][1]) if len(joints) > 1 else 0.0
            theta_m = math.pi - shape if shape > 1e-6 else self.theta_m
            sp = mconfig.mconfig_setpoints(
                self.geom, theta_m, turn_radius=radius, base_speed=screw
            )
            yaw_angles = sp.joint_angles
            omegas = sp.screw_omegas
        else:
            yaw_angles = tuple(math.pi - y for _, y in joints)
            omegas = tuple(h * screw * self.geom.omega_max for h in self.geom.handedness)
        self._pitch_setpoints = [p for p, _ in joints]
        for i in range(self.geom.n_segments):
            k = min(i, self.geom.n_joints - 1)
            self.bus.send_setpoint(
                i + 1,
                pitch=self._pitch_setpoints[k] if i < self.geom.n_joints else 0.0,
                yaw=math.pi - yaw_angles[k] if i < self.geom.n_joints else 0.0,
                screw_omega=omegas[i],
            )

    def _steer_to_radius(self, steer: float, tight: float) -> float:
        if steer == 0.0:
            return tunneling.STRAIGHT
        curvature = (steer / self.policy.device_limit) / tight
        return 1.0 / curvature

    # -- time ---------------------------------------------------------------

    @property
    def holding(self) -> bool:
        return (self.now_ms - self.last_frame_ms) > self.hold_timeout_ms

    def tick(self) -> StateUpdate | None:
        """One bus period: dispatch the newest frame, regulate, integrate.

        Returns a StateUpdate every ``updates_per_n_ticks`` ticks (default
        every tick, so command-to-state latency stays under one chain round
        trip plus a loop period in virtual time).
        """
        if not self.holding:
            self._apply_pending()
        period = self.bus_model.period_ms
        self.bus.tick(period)
        self.now_ms += period
        # bus-regulated yaw deflections drive the simulator's joints
        yaw_defl = self.bus.joint_angles()[: self.geom.n_joints]
        angles = tuple(math.pi - d for d in yaw_defl)
        omegas = tuple(node.screw_omega for node in self.bus.nodes)
        self.sim.set_setpoints(angles, omegas)
        self.sim.step()
        self._tick_count += 1
        if self._tick_count % self.updates_per_n_ticks == 0:
            return self.state_update()
        return None

    def state_update(self) -> StateUpdate:
        speeds = (
            self.sim.log.v_axial[-1]
            if self.sim.log.t
            else (0.0,) * self.geom.n_segments
        )
        joints = tuple(
            (node.pitch, node.yaw) for node in self.bus.nodes[: self.geom.n_joints]
        )
        return StateUpdate(
            t_ms=self.now_ms,
            pose=(self.sim.x, self.sim.y, self.sim.psi),
            joints=joints,
            clamped=self.last_flags,
            speeds=tuple(speeds),
            misses=self.bus.deadline_misses,
            holding=self.holding,
            drop_count=self.drop_count,
        )

    def config_message(self) -> dict:
        """Connect-time capability message (wire extension)."""
        return {
            "type": "config",
            "device_limit_rad": self.policy.device_limit,
            "joint_limit_rad": self.policy.joint_limit,
            "n_joints": self.geom.n_joints,
            "n_segments": self.geom.n_segments,
            "update_rate_hz": self.bus_model.loop_rate_hz / self.updates_per_n_ticks,
            "theta_m_rad": self.theta_m,
        }


class SessionRegistry:
    """One active pilot per simulation; later claims get an occupied error."""

    def __init__(self):
        self._active: TeleopSession | None = None

    def claim(self, factory) -> TeleopSession:
        if self._active is not None:
            raise SessionOccupiedError("a pilot session is already active")
        self._active = factory()
        return self._active

    def release(self, session: TeleopSession):
        if self._active is session:
            self._active = None

    @property
    def active(self):
        return self._active
