"""M-configuration controller: zigzag wheel-mode driving on rigid surfaces.

The body folds into an M (joint deflections alternate +/- theta'_m) so the
screw shells can act as wheels. In the M-center frame (origin at the middle
U-joint, y along the line of segment centers):

    segment centers:  x_i = 0,  y_i = (-2i + 5) * l * cos(theta'_m / 2)
    axial/radial:     (u_a, u_r) = R(beta_i - pi/2) (xd - y_i*pd, yd)
                      with beta_i = (-1)^(i-1) * theta'_m / 2

where theta'_m = pi - theta_m. Slippage couples screw rate to radial
(wheel) velocity, s = 1 - u_r / (omega * r_s), which inverts to

    omega_i = cos(theta'_m/2) * (y_i*pd - xd) / (r_s * (1 - s_i))

and, under equal slippage, to the measurable speed-ratio law

    omega_i / omega_j = (y_i - R_m) / (y_j - R_m),   R_m = xd / pd.

The layout is hard-coded to 4 segments: the (-2i + 5) coefficients are
specific to it, and other lengths raise UnsupportedConfigurationError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import BodyTwist, ChainGeometry, Frame, SegmentVelocity
from .errors import (
    SegmentIndexError,
    SegmentOnCenterError,
    TractionSingularityError,
    UndefinedSlippageError,
    UnsupportedConfigurationError,
)
from .tunneling import STRAIGHT, is_straight

#: Operating angle with the most consistent measured behavior.
DEFAULT_THETA_M = math.radians(140.0)

M_SEGMENTS = 4
_COEFFS = (3, 1, -1, -3)  # (-2i + 5) for i = 1..4


def _check(geom: ChainGeometry, theta_m: float, i: int | None = None):
    if geom.n_segments != M_SEGMENTS:
        raise UnsupportedConfigurationError(
            f"M-configuration requires {M_SEGMENTS} segments, "
            f"geometry has {geom.n_segments}"
        )
    if not (math.pi / 2 < theta_m <= math.pi):
        raise UnsupportedConfigurationError(
            f"theta_m {theta_m:.4f} rad outside (pi/2, pi]"
        )
    if i is not None and not 1 <= i <= M_SEGMENTS:
        raise SegmentIndexError(f"segment {i} outside 1..{M_SEGMENTS}")


def deflection(theta_m: float) -> float:
    return math.pi - theta_m


def mconfig_position(geom: ChainGeometry, theta_m: float, i: int):
    """Center of segment i in the M-center frame: (0, (-2i+5)*l*cos(d/2))."""
    _check(geom, theta_m, i)
    c = math.cos(deflection(theta_m) / 2.0)
    return 0.0, _COEFFS[i - 1] * geom.l * c


def segment_offsets(geom: ChainGeometry, theta_m: float) -> np.ndarray:
    """All four y offsets along the M-center line."""
    _check(geom, theta_m)
    c = math.cos(deflection(theta_m) / 2.0)
    return np.array(_COEFFS, dtype=float) * geom.l * c


def segment_tilt(theta_m: float, i: int) -> float:
    """beta_i: segment axis tilt from the center line, alternating sign."""
    return (-1) ** (i - 1) * deflection(theta_m) / 2.0


def axis_vectors(geom: ChainGeometry, theta_m: float):
    """Axial and radial unit vectors of each segment in the M-center frame.

    Returns (axial (4,2), radial (4,2)); the radial direction is the one a
    positive wheel velocity u_r drives.
    """
    _check(geom, theta_m)
    beta = np.array([segment_tilt(theta_m, i) for i in range(1, 5)])
    axial = np.column_stack([np.sin(beta), np.cos(beta)])
    radial = np.column_stack([-np.cos(beta), np.sin(beta)])
    return axial, radial


def mconfig_axial_radial(
    geom: ChainGeometry, theta_m: float, twist: BodyTwist, i: int
) -> SegmentVelocity:
    """Axial/radial velocity at segment i under an M-center-frame twist."""
    twist.require(Frame.M_CENTER)
    _check(geom, theta_m, i)
    _, y_i = mconfig_position(geom, theta_m, i)
    alpha = segment_tilt(theta_m, i) - math.pi / 2.0
    ux = twist.vx - y_i * twist.yaw_rate
    uy = twist.vy
    ca, sa = math.cos(alpha), math.sin(alpha)
    return SegmentVelocity(ca * ux - sa * uy, sa * ux + ca * uy)


def slippage_ratio(u_r: float, omega: float, r_s: float) -> float:
    """s = 1 - u_r / (omega * r_s); 0 is pure rolling, 1 is full slip."""
    if omega == 0.0:
        raise UndefinedSlippageError("slippage undefined at zero screw speed")
    return 1.0 - u_r / (omega * r_s)


def screw_speed_ik(
    geom: ChainGeometry,
    theta_m: float,
    xdot_m: float,
    phidot_m: float,
    s_i: float,
    i: int,
) -> float:
    """Screw rate for segment i reaching a target (xdot_m, phidot_m)."""
    _check(geom, theta_m, i)
    if s_i >= 1.0:
        raise TractionSingularityError(
            f"slippage {s_i} >= 1: no radial traction to invert"
        )
    _, y_i = mconfig_position(geom, theta_m, i)
    c = math.cos(deflection(theta_m) / 2.0)
    return c * (y_i * phidot_m - xdot_m) / (geom.r_s * (1.0 - s_i))


def speed_ratio(
    geom: ChainGeometry, theta_m: float, turn_radius: float, i: int, j: int
) -> float:
    """omega_i / omega_j for a target turning radius, equal slippage assumed."""
    _check(geom, theta_m, i)
    _check(geom, theta_m, j)
    y = segment_offsets(geom, theta_m)
    if is_straight(turn_radius):
        return 1.0
    denom = y[j - 1] - turn_radius
    if abs(denom) < 1e-12:
        raise SegmentOnCenterError(j, float(y[j - 1]))
    return float((y[i - 1] - turn_radius) / denom)


@dataclass(frozen=True)
class MConfigSetpoints:
    joint_angles: tuple[float, ...]
    screw_omegas: tuple[float, ...]
    saturated: bool


def mconfig_joint_angles(geom: ChainGeometry, theta_m: float) -> tuple[float, ...]:
    """Joint angles forming the M: deflections alternate +d, -d, +d."""
    _check(geom, theta_m)
    d = deflection(theta_m)
    return tuple(math.pi - (-1) ** k * d for k in range(geom.n_joints))


def mconfig_setpoints(
    geom: ChainGeometry,
    theta_m: float,
    turn_radius: float = STRAIGHT,
    base_speed: float = 0.5,
) -> MConfigSetpoints:
    """Joint pattern plus screw rates in the speed-ratio law's proportions.

    ``base_speed`` in [-1, 1] scales the largest screw rate to that fraction
    of omega_max; positive base_speed drives +x_m (and, with a finite
    positive radius, turns toward +y_m). Oversized commands are scaled back
    to the actuator bound and flagged.
    """
    # theta_m = pi is accepted but has no wheel leverage: the simulator
    # yields zero planar motion there (screws spin in place)
    _check(geom, theta_m)
    saturated = False
    if abs(base_speed) > 1.0:
        base_speed = math.copysign(1.0, base_speed)
        saturated = True
    y = segment_offsets(geom, theta_m)
    if is_straight(turn_radius):
        pattern = -np.ones(M_SEGMENTS)
    else:
        pattern = y - turn_radius
        peak = np.max(np.abs(pattern))
        if peak < 1e-12:
            raise SegmentOnCenterError(0, float(turn_radius))
        pattern = pattern / peak
        if turn_radius < 0.0:
            # keep +base_speed driving +x_m; the turn direction is sign(R)
            pattern = -pattern
    omegas = tuple(float(base_speed * geom.omega_max * p) for p in pattern)
    return MConfigSetpoints(
        joint_angles=mconfig_joint_angles(geom, theta_m),
        screw_omegas=omegas,
        saturated=saturated,
    )
