"""Tunneling-mode controller.

Tunneling locomotion holds all U-joints at one common angle and relies on
equal screw propulsion; the common angle places the intersection of every
segment's axial tangent at the commanded center of rotation (0, R) in the
head frame:

    theta = 2 * atan(R / l)        (straight-is-pi convention)

equivalently R = l / tan(deflection / 2). Positive R turns toward +y.

Screw rates are signed per thread handedness so axial thrusts add while
the wheel-like radial reactions alternate and cancel in aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .chain import ChainGeometry
from .errors import InfeasibleRadiusError, JointLimitError, SaturationError

#: Sentinel commanded radius for straight driving.
STRAIGHT = math.inf

#: Radii this far below r_min are clamped to the joint limit instead of
#: rejected; mirrors the centimeter-level rounding of the reported minimum
#: turning radius.
RADIUS_SLACK = 0.01


class JointMode(Enum):
    POSITION_HOLD = "position_hold"
    COMPLIANT = "compliant"


@dataclass(frozen=True)
class TunnelingCommand:
    """Signed turn radius (m, STRAIGHT for infinite) and screw fraction."""

    turn_radius: float = STRAIGHT
    screw_speed_fraction: float = 0.0


@dataclass(frozen=True)
class TunnelingSetpoints:
    joint_angles: tuple[float, ...]
    screw_omegas: tuple[float, ...]
    radius_clamped: bool
    saturated: bool


def is_straight(radius: float) -> bool:
    return math.isinf(radius)


def heading_angle(geom: ChainGeometry, turn_radius: float, slack: float = RADIUS_SLACK):
    """Common joint angle realizing a commanded turning radius.

    Returns (theta, clamped). ``theta`` uses the straight-is-pi convention
    and carries the turn sign (deflection > 0 turns toward +y). Radii with
    magnitude in [r_min - slack, r_min) are clamped to the joint limit;
    anything smaller raises InfeasibleRadiusError carrying r_min.
    """
    if is_straight(turn_radius):
        return math.pi, False
    r = abs(turn_radius)
    r_min = geom.r_min
    clamped = False
    if r < r_min:
        if r < r_min - slack:
            raise InfeasibleRadiusError(turn_radius, r_min)
        defl = geom.joint_limit
        clamped = True
    else:
        defl = math.pi - 2.0 * math.atan(r / geom.l)
    if turn_radius < 0.0:
        defl = -defl
    return math.pi - defl, clamped


def radius_from_angle(geom: ChainGeometry, theta: float) -> float:
    """Inverse of heading_angle: R = l * tan(theta/2), signed like theta."""
    defl = math.pi - theta
    if defl == 0.0:
        return STRAIGHT
    return geom.l / math.tan(defl / 2.0)


def tunneling_setpoints(geom: ChainGeometry, cmd: TunnelingCommand) -> TunnelingSetpoints:
    """All joints at the heading angle, screws at equal lead-speed fraction.

    Screw signs follow thread handedness so every segment propels forward;
    fractions beyond 1.0 are scaled back and flagged.
    """
    theta, clamped = heading_angle(geom, cmd.turn_radius)
    frac = cmd.screw_speed_fraction
    saturated = False
    if not math.isfinite(frac):
        raise SaturationError("screw_speed_fraction must be finite")
    if abs(frac) > 1.0:
        frac = math.copysign(1.0, frac)
        saturated = True
    omegas = tuple(h * frac * geom.omega_max for h in geom.handedness)
    return TunnelingSetpoints(
        joint_angles=(theta,) * geom.n_joints,
        screw_omegas=omegas,
        radius_clamped=clamped,
        saturated=saturated,
    )


@dataclass(frozen=True)
class ConformingPlan:
    """Corridor-conforming posture: only the head joint is position-held."""

    head_angle: float
    modes: tuple[JointMode, ...]


def conforming_setpoints(geom: ChainGeometry, head_steer: float) -> ConformingPlan:
    """Head joint holds ``head_steer`` (deflection, rad); the rest go compliant."""
    if abs(head_steer) > geom.joint_limit + 1e-12:
        raise JointLimitError(
            f"head steer {head_steer:.4f} rad exceeds limit {geom.joint_limit:.4f}"
        )
    modes = (JointMode.POSITION_HOLD,) + (JointMode.COMPLIANT,) * (geom.n_joints - 1)
    return ConformingPlan(head_angle=math.pi - head_steer, modes=modes)
