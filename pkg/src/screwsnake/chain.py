"""Planar kinematics of the serially chained screw segments.

Model summary (head-segment frame, x forward, y left):

  * the chain alternates segment centers and U-joints, each a half-link
    length l apart; segment 1's center is the frame origin
  * joint angles theta_k use the straight-is-pi convention; the deflection
    pi - theta_k is positive when the chain bends toward +y
  * cumulative deflection of joints 1..j steers segment j+1's axis to the
    heading -sum(pi - theta_k), so axial/radial axes follow directly from
    the position construction

Joint rates are deflection rates (d/dt of pi - theta); with that
convention the induced-velocity expression is the exact time derivative
of the position construction (verified by finite differences in tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .errors import (
    FrameMismatchError,
    InvalidGeometryError,
    JointLimitError,
    SegmentIndexError,
)

# screw thread pitch angle (deg) used to relate lead speed to shell speed
SCREW_PITCH_DEG = 22.0


def alternating_handedness(n: int, first: int = 1) -> tuple[int, ...]:
    """Thread-chirality pattern (+1/-1 alternating along the chain)."""
    return tuple(first * (-1) ** i for i in range(n))


@dataclass(frozen=True)
class ChainGeometry:
    """Static robot parameters.

    Attributes:
        n_segments: number of screw segments (>= 2)
        l: half-link length, segment center to adjacent U-joint (m)
        r_s: screw shell radius (m)
        v_lead_max: screw lead speed at full screw rate (m/s)
        joint_limit: max joint deflection per axis (rad), in (0, pi/2]
        handedness: per-segment thread sign, must alternate
        omega_max: screw shaft rate at full command (rad/s); derived from
            the thread pitch angle when not given
        cross_section: body diameter including screw blades (m)
    """

    n_segments: int = 4
    l: float = 0.182
    r_s: float = 0.064
    v_lead_max: float = 0.23
    joint_limit: float = math.pi / 2
    handedness: tuple[int, ...] = field(default=None)  # type: ignore[assignment]
    omega_max: float = field(default=None)  # type: ignore[assignment]
    cross_section: float = 0.15

    def __post_init__(self):
        if self.n_segments < 2:
            raise InvalidGeometryError("n_segments must be >= 2")
        for name in ("l", "r_s", "v_lead_max"):
            if getattr(self, name) <= 0.0:
                raise InvalidGeometryError(f"{name} must be > 0")
        if not 0.0 < self.joint_limit <= math.pi / 2:
            raise InvalidGeometryError("joint_limit must be in (0, pi/2]")
        if self.handedness is None:
            object.__setattr__(
                self, "handedness", alternating_handedness(self.n_segments)
            )
        else:
            object.__setattr__(self, "handedness", tuple(self.handedness))
        if len(self.handedness) != self.n_segments:
            raise InvalidGeometryError("handedness length != n_segments")
        for a, b in zip(self.handedness, self.handedness[1:]):
            if a not in (-1, 1) or b != -a:
                raise InvalidGeometryError("handedness must alternate +1/-1")
        if self.omega_max is None:
            derived = self.v_lead_max / (
                self.r_s * math.tan(math.radians(SCREW_PITCH_DEG))
            )
            object.__setattr__(self, "omega_max", derived)
        elif self.omega_max <= 0.0:
            raise InvalidGeometryError("omega_max must be > 0")
        if self.cross_section <= 0.0:
            raise InvalidGeometryError("cross_section must be > 0")

    @property
    def n_joints(self) -> int:
        return self.n_segments - 1

    @property
    def lead_per_radian(self) -> float:
        """Axial lead distance per radian of screw rotation (m/rad)."""
        return self.v_lead_max / self.omega_max

    @property
    def r_min(self) -> float:
        """Smallest feasible turning radius at the joint limit (m).

        From the turning relation R = l * tan(theta/2) = l / tan(defl/2)
        evaluated at the deflection limit.
        """
        return self.l / math.tan(self.joint_limit / 2.0)


class Frame(Enum):
    HEAD = "head"
    M_CENTER = "m_center"


@dataclass(frozen=True)
class BodyTwist:
    """Instantaneous planar velocity (vx, vy, yaw rate) tagged by frame."""

    frame: Frame
    vx: float
    vy: float
    yaw_rate: float

    def require(self, frame: Frame):
        if self.frame is not frame:
            raise FrameMismatchError(
                f"twist is in {self.frame.value}, expected {frame.value}"
            )


@dataclass(frozen=True)
class SegmentVelocity:
    axial: float
    radial: float


def deflection_from_angle(theta):
    """pi - theta; positive bends toward +y."""
    return np.pi - np.asarray(theta, dtype=float)


def angle_from_deflection(defl):
    return np.pi - np.asarray(defl, dtype=float)


@dataclass(frozen=True)
class JointState:
    """Per-joint planar (yaw) angles and deflection rates.

    ``angles`` use the straight-is-pi convention. ``rates`` are deflection
    rates, rad/s. ``pitch`` carries the out-of-plane deflections for teleop
    passthrough; the planar model ignores it.
    """

    angles: tuple[float, ...]
    rates: tuple[float, ...] = None  # type: ignore[assignment]
    pitch: tuple[float, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        n = len(self.angles)
        if self.rates is None:
            object.__setattr__(self, "rates", (0.0,) * n)
        else:
            object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if self.pitch is None:
            object.__setattr__(self, "pitch", (0.0,) * n)
        else:
            object.__setattr__(self, "pitch", tuple(float(p) for p in self.pitch))
        if len(self.rates) != n or len(self.pitch) != n:
            raise InvalidGeometryError("rates/pitch length mismatch with angles")

    @classmethod
    def straight(cls, geom: ChainGeometry) -> "JointState":
        return cls(angles=(math.pi,) * geom.n_joints)

    @classmethod
    def from_deflections(cls, defl, rates=None, pitch=None) -> "JointState":
        return cls(
            angles=tuple(math.pi - d for d in defl), rates=rates, pitch=pitch
        )

    @property
    def deflections(self) -> tuple[float, ...]:
        return tuple(math.pi - a for a in self.angles)

    def cumulative_deflection(self, j: int) -> float:
        """theta'_{1:j}: summed deflection of joints 1..j (j=0 -> 0)."""
        return float(sum(self.deflections[:j]))

    def validate(self, geom: ChainGeometry):
        if len(self.angles) != geom.n_joints:
            raise InvalidGeometryError(
                f"expected {geom.n_joints} joints, got {len(self.angles)}"
            )
        tol = 1e-12
        for k, d in enumerate(self.deflections, start=1):
            if abs(d) > geom.joint_limit + tol:
                raise JointLimitError(
                    f"joint {k} deflection {d:.4f} rad exceeds limit "
                    f"{geom.joint_limit:.4f} rad"
                )


def _check_index(geom: ChainGeometry, i: int, upper: int):
    if not 1 <= i <= upper:
        raise SegmentIndexError(f"index {i} outside 1..{upper}")


def chain_arrays(geom: ChainGeometry, joints: JointState):
    """Full chain state: centers (n,2), joint points (n-1,2), axis angles (n,).

    Exposed for the simulator and renderers; positions are in the
    head-segment frame.
    """
    joints.validate(geom)
    return kernels.chain_state(np.asarray(joints.angles), geom.l)


def segment_position(geom: ChainGeometry, joints: JointState, i: int):
    """Center of segment i (1-based) in the head-segment frame."""
    _check_index(geom, i, geom.n_segments)
    centers, _, _ = chain_arrays(geom, joints)
    return float(centers[i - 1, 0]), float(centers[i - 1, 1])


def joint_position(geom: ChainGeometry, joints: JointState, k: int):
    """Position of U-joint k (1-based, between segments k and k+1)."""
    _check_index(geom, k, geom.n_joints)
    _, jpts, _ = chain_arrays(geom, joints)
    return float(jpts[k - 1, 0]), float(jpts[k - 1, 1])


def induced_velocity(geom: ChainGeometry, joints: JointState, i: int):
    """Velocity of segment i's center induced solely by joint motion."""
    _check_index(geom, i, geom.n_segments)
    joints.validate(geom)
    if not all(math.isfinite(r) for r in joints.rates):
        raise InvalidGeometryError("joint rates must be finite")
    w = kernels.induced_velocities(
        np.asarray(joints.angles), np.asarray(joints.rates), geom.l
    )
    return float(w[i - 1, 0]), float(w[i - 1, 1])


def axial_radial_velocity(
    geom: ChainGeometry, joints: JointState, twist: BodyTwist, i: int
) -> SegmentVelocity:
    """Axial/radial velocity of segment i under a head-frame twist.

    The rigid-body velocity at the segment center plus the joint-induced
    velocity, projected onto the segment's own axial and radial axes.
    """
    twist.require(Frame.HEAD)
    _check_index(geom, i, geom.n_segments)
    centers, _, axis = chain_arrays(geom, joints)
    w = kernels.induced_velocities(
        np.asarray(joints.angles), np.asarray(joints.rates), geom.l
    )
    out = kernels.segment_frame_velocities(
        centers, axis, w, twist.vx, twist.vy, twist.yaw_rate
    )
    return SegmentVelocity(float(out[i - 1, 0]), float(out[i - 1, 1]))
