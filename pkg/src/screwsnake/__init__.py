"""screwsnake: planar simulator and control library for a screw-propelled,
hyper-redundant snake robot.

Core pieces: chain kinematics (chain), the two locomotion controllers
(tunneling, mconfig), a parametric screw-terrain model with calibration
(terrain), a time-stepped planar simulator (sim, corridor, scenario),
a simulated daisy-chained segment bus (bus), and a teleoperation gateway
(teleop, server) with a browser console under frontend/.
"""

from .chain import (
    BodyTwist,
    ChainGeometry,
    Frame,
    JointState,
    SegmentVelocity,
    axial_radial_velocity,
    induced_velocity,
    joint_position,
    segment_position,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .mconfig import (
    mconfig_axial_radial,
    mconfig_position,
    mconfig_setpoints,
    screw_speed_ik,
    slippage_ratio,
    speed_ratio,
)
from .sim import Mode, PoseState, Simulator, TrajectoryLog, fit_turn_radius
from .terrain import TerrainProfile, calibrate, load_bundled_profile, realized_velocity
from .tunneling import (
    STRAIGHT,
    JointMode,
    TunnelingCommand,
    conforming_setpoints,
    heading_angle,
    tunneling_setpoints,
)

__version__ = "0.1.0"

__all__ = [
    "BodyTwist",
    "ChainGeometry",
    "Frame",
    "JointState",
    "JointMode",
    "KERNEL_IMPLEMENTATION",
    "Mode",
    "PoseState",
    "STRAIGHT",
    "SegmentVelocity",
    "Simulator",
    "TerrainProfile",
    "TrajectoryLog",
    "TunnelingCommand",
    "axial_radial_velocity",
    "calibrate",
    "conforming_setpoints",
    "fit_turn_radius",
    "heading_angle",
    "induced_velocity",
    "joint_position",
    "load_bundled_profile",
    "mconfig_axial_radial",
    "mconfig_position",
    "mconfig_setpoints",
    "realized_velocity",
    "screw_speed_ik",
    "segment_position",
    "slippage_ratio",
    "speed_ratio",
    "tunneling_setpoints",
]
