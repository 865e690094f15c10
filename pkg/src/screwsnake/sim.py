"""Time-stepped planar locomotion simulator.

Each step converts per-segment screw commands into realized axial/radial
velocities (terrain model), expresses them at the segment centers of the
current chain pose, recovers the body twist as the least-squares rigid
planar motion through those velocities, and advances the world pose by
explicit Euler. Joint setpoints are tracked under a rate limit.

The logged world position is the reference-frame origin of the active
mode: the head segment center for tunneling/teleop, the central U-joint
for the M-configuration (that is the point whose circle-fitted radius the
turning-radius experiments compare against).

M-configuration twist recovery constrains the lateral (y_m) velocity to
zero, the M-model's own kinematic constraint; leaving it free lets the
alternating wheel components inject a spurious lateral drift of order
l*sin(d/2) that the mode physically resists through its opposed rolling
directions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels, mconfig
from .chain import ChainGeometry, JointState
from .errors import (
    InsufficientArcError,
    InvalidGeometryError,
    SimulationFaultError,
)
from .terrain import TerrainProfile, realized_velocity

#: Kasa fits beyond this radius are reported as straight driving.
STRAIGHT_RADIUS_THRESHOLD = 1e3

#: Position spread below which a trajectory counts as turn-in-place.
POINT_CLUSTER_SPREAD = 1e-4

#: M deflection below which the wheels have no leverage (screws spin in
#: place, no planar motion).
MIN_M_DEFLECTION = 1e-9

DEFAULT_DT = 0.01
DEFAULT_RATE_LIMIT = 1.0  # rad/s, joint deflection slew


class Mode(Enum):
    TUNNELING = "tunneling"
    M_CONFIG = "mconfig"
    CONFORMING = "conforming"
    TELEOP = "teleop"


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass
class PoseState:
    x: float
    y: float
    psi: float
    joints: JointState
    mode: Mode


@dataclass
class TrajectoryLog:
    """Uniform-dt record of the simulation (one row per completed step)."""

    dt: float
    t: list = field(default_factory=list)
    x: list = field(default_factory=list)
    y: list = field(default_factory=list)
    psi: list = field(default_factory=list)
    thetas: list = field(default_factory=list)
    omegas: list = field(default_factory=list)
    v_axial: list = field(default_factory=list)
    v_radial: list = field(default_factory=list)
    twists: list = field(default_factory=list)

    def append(self, t, x, y, psi, thetas, omegas, va, vr, twist):
        self.t.append(t)
        self.x.append(x)
        self.y.append(y)
        self.psi.append(psi)
        self.thetas.append(tuple(thetas))
        self.omegas.append(tuple(omegas))
        self.v_axial.append(tuple(va))
        self.v_radial.append(tuple(vr))
        self.twists.append(tuple(twist))

    def __len__(self):
        return len(self.t)

    def positions(self) -> np.ndarray:
        return np.column_stack([self.x, self.y]) if self.t else np.zeros((0, 2))

    def headings(self) -> np.ndarray:
        return np.asarray(self.psi)

    def write_csv(self, path):
        n_joints = len(self.thetas[0]) if self.t else 0
        n_seg = len(self.omegas[0]) if self.t else 0
        header = (
            ["t", "x", "y", "psi"]
            + [f"theta_{k}" for k in range(1, n_joints + 1)]
            + [f"omega_{k}" for k in range(1, n_seg + 1)]
            + [f"va_{k}" for k in range(1, n_seg + 1)]
            + [f"vr_{k}" for k in range(1, n_seg + 1)]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self.t)):
                writer.writerow(
                    [repr(self.t[i]), repr(self.x[i]), repr(self.y[i]), repr(self.psi[i])]
                    + [repr(v) for v in self.thetas[i]]
                    + [repr(v) for v in self.omegas[i]]
                    + [repr(v) for v in self.v_axial[i]]
                    + [repr(v) for v in self.v_radial[i]]
                )


@dataclass(frozen=True)
class TurnRadiusFit:
    radius: float
    rms: float
    swept: float
    center: tuple[float, float]

    @property
    def is_straight(self) -> bool:
        return self.radius > STRAIGHT_RADIUS_THRESHOLD


def fit_turn_radius(log: TrajectoryLog, min_arc: float = math.pi / 2) -> TurnRadiusFit:
    """Least-squares (Kasa) circle fit over the logged positions.

    Requires at least ``min_arc`` of heading change. A trajectory whose
    positions collapse to a point (turn in place) returns the point spread
    as the radius instead of a degenerate fit.
    """
    if len(log) < 3:
        raise InsufficientArcError(0.0, min_arc)
    psi = np.unwrap(log.headings())
    swept = float(psi.max() - psi.min())
    if swept < min_arc:
        raise InsufficientArcError(swept, min_arc)
    pts = log.positions()
    centroid = pts.mean(axis=0)
    spread = float(np.max(np.hypot(*(pts - centroid).T)))
    if spread < POINT_CLUSTER_SPREAD:
        return TurnRadiusFit(
            radius=spread, rms=0.0, swept=swept,
            center=(float(centroid[0]), float(centroid[1])),
        )
    cx, cy, r, rms = kernels.kasa_circle(pts[:, 0], pts[:, 1])
    return TurnRadiusFit(radius=r, rms=rms, swept=swept, center=(cx, cy))


class Simulator:
    """Single-writer planar simulator for one robot on one terrain.

    Free-space modes only (tunneling, M-configuration, teleop); the
    corridor-conforming mode lives in corridor.py, which shares the log
    format. Snapshots returned by :meth:`pose` are immutable copies safe
    to hand to concurrent observers.
    """

    def __init__(
        self,
        geom: ChainGeometry,
        terrain: TerrainProfile,
        mode: Mode,
        dt: float = DEFAULT_DT,
        seed: int = 0,
        rate_limit: float = DEFAULT_RATE_LIMIT,
        incline_deg: float = 0.0,
        noise_sd: float = 0.0,
        start_joints: JointState | None = None,
    ):
        if not 0.0 < dt <= 0.1:
            raise InvalidGeometryError(f"dt {dt} outside (0, 0.1] s")
        if mode is Mode.CONFORMING:
            raise InvalidGeometryError(
                "conforming mode is handled by corridor.ConformingSimulator"
            )
        self.geom = geom
        self.terrain = terrain
        self.mode = mode
        self.dt = dt
        self.rate_limit = rate_limit
        self.speed_scale = math.cos(math.radians(incline_deg))
        self.noise_sd = noise_sd
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.t = 0.0
        self.x = 0.0
        self.y = 0.0
        self.psi = 0.0
        joints = start_joints or JointState.straight(geom)
        joints.validate(geom)
        self._defl = np.array(joints.deflections)
        self._defl_target = self._defl.copy()
        self._omegas = np.zeros(geom.n_segments)
        self.saturation_count = 0
        self.log = TrajectoryLog(dt=dt)

    # -- commands ----------------------------------------------------------

    def set_setpoints(self, joint_angles, screw_omegas):
        """Install joint-angle and screw-rate targets (from a controller)."""
        angles = tuple(joint_angles)
        if len(angles) != self.geom.n_joints:
            raise InvalidGeometryError(
                f"expected {self.geom.n_joints} joint angles, got {len(angles)}"
            )
        JointState(angles=angles).validate(self.geom)
        self._defl_target = np.pi - np.asarray(angles, dtype=float)
        omegas = np.asarray(tuple(screw_omegas), dtype=float)
        if omegas.shape != (self.geom.n_segments,):
            raise InvalidGeometryError(
                f"expected {self.geom.n_segments} screw rates"
            )
        self._omegas = omegas

    def snap_to_setpoints(self):
        """Start posed: joints jump to their targets (no ramp transient)."""
        self._defl = self._defl_target.copy()

    # -- state -------------------------------------------------------------

    def joint_state(self, rates=None) -> JointState:
        return JointState.from_deflections(self._defl, rates=rates)

    def pose(self) -> PoseState:
        return PoseState(
            x=self.x, y=self.y, psi=self.psi,
            joints=self.joint_state(), mode=self.mode,
        )

    def set_joint_angles(self, angles):
        """Impose joint angles directly (bus-regulated teleop path)."""
        JointState(angles=tuple(angles)).validate(self.geom)
        self._defl = np.pi - np.asarray(tuple(angles), dtype=float)
        self._defl_target = self._defl.copy()

    # -- stepping ----------------------------------------------------------

    def _realized(self):
        va = np.zeros(self.geom.n_segments)
        vr = np.zeros(self.geom.n_segments)
        for i in range(self.geom.n_segments):
            sv, clamped = realized_velocity(
                self.terrain, self.geom, float(self._omegas[i]), i + 1
            )
            if clamped:
                self.saturation_count += 1
            va[i] = sv.axial * self.speed_scale
            vr[i] = sv.radial * self.speed_scale
        if self.noise_sd > 0.0:
            va += self.rng.normal(0.0, self.noise_sd, va.shape)
            vr += self.rng.normal(0.0, self.noise_sd, vr.shape)
        bad = ~(np.isfinite(va) & np.isfinite(vr))
        if bad.any():
            raise SimulationFaultError(int(np.argmax(bad)) + 1)
        return va, vr

    def _ramp_joints(self):
        delta = self._defl_target - self._defl
        step = np.clip(delta, -self.rate_limit * self.dt, self.rate_limit * self.dt)
        rates = step / self.dt
        self._defl = self._defl + step
        return rates

    def _body_twist(self, va, vr, defl_rates):
        if self.mode is Mode.M_CONFIG:
            d = float(np.abs(self._defl).max())
            if d < MIN_M_DEFLECTION:
                return (0.0, 0.0, 0.0), np.zeros((self.geom.n_segments, 2))
            theta_m = math.pi - d
            offsets = mconfig.segment_offsets(self.geom, theta_m)
            points = np.column_stack([np.zeros_like(offsets), offsets])
            axial, radial = mconfig.axis_vectors(self.geom, theta_m)
            vels = va[:, None] * axial + vr[:, None] * radial
            return kernels.twist_fit_locked_lateral(points, vels), points
        # head-frame chain pose
        angles = np.pi - self._defl
        centers, _, axis = kernels.chain_state(angles, self.geom.l)
        induced = kernels.induced_velocities(angles, defl_rates, self.geom.l)
        ca = np.cos(axis)
        sa = np.sin(axis)
        vels = np.empty_like(centers)
        vels[:, 0] = va * ca - vr * sa - induced[:, 0]
        vels[:, 1] = va * sa + vr * ca - induced[:, 1]
        return kernels.twist_fit(centers, vels), centers

    def step(self):
        """Advance one tick; returns the body twist applied."""
        rates = self._ramp_joints()
        va, vr = self._realized()
        twist, _ = self._body_twist(va, vr, rates)
        self.x, self.y, self.psi = kernels.advance_pose(
            self.x, self.y, self.psi, twist[0], twist[1], twist[2], self.dt
        )
        self.t += self.dt
        self.log.append(
            self.t, self.x, self.y, wrap_angle(self.psi),
            np.pi - self._defl, self._omegas, va, vr, twist,
        )
        return twist

    def run(self, duration: float):
        steps = int(round(duration / self.dt))
        for _ in range(steps):
            self.step()
        return self.log

    # -- summaries ----------------------------------------------------------

    def summary(self) -> dict:
        out = {
            "mode": self.mode.value,
            "terrain": self.terrain.name,
            "dt": self.dt,
            "duration": round(self.t, 12),
            "steps": len(self.log),
            "saturation_count": self.saturation_count,
            "final_pose": {"x": self.x, "y": self.y, "psi": wrap_angle(self.psi)},
        }
        if self.log.t:
            disp = math.hypot(self.x - 0.0, self.y - 0.0)
            out["mean_speed"] = disp / self.t
            pts = self.log.positions()
            seglen = np.hypot(*np.diff(pts, axis=0).T).sum() if len(pts) > 1 else 0.0
            out["path_speed"] = float(seglen) / self.t
            try:
                fit = fit_turn_radius(self.log)
                out["fitted_radius"] = fit.radius
                out["fit_rms"] = fit.rms
                out["swept_rad"] = fit.swept
            except InsufficientArcError as exc:
                out["fitted_radius"] = None
                out["swept_rad"] = exc.swept
        else:
            out["mean_speed"] = 0.0
            out["path_speed"] = 0.0
            out["fitted_radius"] = None
        return out
