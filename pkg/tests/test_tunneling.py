import math

import numpy as np
import pytest

from screwsnake.chain import ChainGeometry, JointState, chain_arrays
from screwsnake.errors import InfeasibleRadiusError, JointLimitError, SaturationError
from screwsnake.tunneling import (
    STRAIGHT,
    ConformingPlan,
    JointMode,
    TunnelingCommand,
    conforming_setpoints,
    heading_angle,
    radius_from_angle,
    tunneling_setpoints,
)

PI = math.pi


def tangent_intersection(geom, theta):
    """Where each segment's axial tangent-perpendicular crosses x=0."""
    centers, _, axis = chain_arrays(
        geom, JointState(angles=(theta,) * geom.n_joints)
    )
    ys = []
    for i in range(1, geom.n_segments):
        n = np.array([-math.sin(axis[i]), math.cos(axis[i])])
        t = -centers[i, 0] / n[0]
        ys.append(centers[i, 1] + t * n[1])
    return ys


class TestHeadingAngle:
    def test_straight(self, geom):
        theta, clamped = heading_angle(geom, STRAIGHT)
        assert theta == PI and not clamped

    def test_at_reported_minimum(self, geom):
        # 0.18 m sits within the centimeter slack below r_min = 0.182 m:
        # clamped to the 90 degree limit rather than rejected
        theta, clamped = heading_angle(geom, 0.18)
        assert clamped
        assert PI - theta == pytest.approx(geom.joint_limit)
        assert radius_from_angle(geom, theta) == pytest.approx(0.182)

    def test_round_trip(self, geom):
        theta, _ = heading_angle(geom, 0.43)
        assert radius_from_angle(geom, theta) == pytest.approx(0.43, abs=1e-12)

    def test_infeasible(self, geom):
        with pytest.raises(InfeasibleRadiusError) as exc:
            heading_angle(geom, 0.10)
        assert exc.value.r_min == pytest.approx(geom.r_min)

    def test_monotone_deflection(self, geom):
        radii = np.linspace(geom.r_min, 50.0, 200)
        defl = [PI - heading_angle(geom, r)[0] for r in radii]
        assert all(a > b for a, b in zip(defl, defl[1:]))

    def test_mirror_symmetry(self, geom):
        for r in (0.2, 0.43, 1.7):
            tp, _ = heading_angle(geom, r)
            tn, _ = heading_angle(geom, -r)
            assert PI - tn == pytest.approx(-(PI - tp))

    def test_tangent_intersection_property(self, geom, rng):
        # tangents to every axial direction meet at (0, R)
        for _ in range(100):
            r = float(rng.uniform(geom.r_min, 5.0)) * (1 if rng.random() < 0.5 else -1)
            theta, _ = heading_angle(geom, r)
            for y in tangent_intersection(geom, theta):
                assert y == pytest.approx(r, abs=1e-9 * geom.l)

    def test_centers_equidistant_from_icr(self, geom):
        theta, _ = heading_angle(geom, 0.43)
        centers, _, _ = chain_arrays(geom, JointState(angles=(theta,) * 3))
        d = np.hypot(centers[:, 0], centers[:, 1] - 0.43)
        assert np.allclose(d, 0.43, atol=1e-12)


class TestTunnelingSetpoints:
    def test_straight_full_speed(self, geom):
        sp = tunneling_setpoints(geom, TunnelingCommand(STRAIGHT, 1.0))
        assert sp.joint_angles == (PI,) * 3
        assert sp.screw_omegas == pytest.approx(
            tuple(h * geom.omega_max for h in (1, -1, 1, -1))
        )

    def test_common_angle_half_speed(self, geom):
        sp = tunneling_setpoints(geom, TunnelingCommand(0.43, 0.5))
        theta, _ = heading_angle(geom, 0.43)
        assert sp.joint_angles == (theta,) * 3
        assert all(
            abs(w) == pytest.approx(0.5 * geom.omega_max) for w in sp.screw_omegas
        )

    def test_zero_speed_still_posed(self, geom):
        sp = tunneling_setpoints(geom, TunnelingCommand(0.43, 0.0))
        assert sp.screw_omegas == (0.0,) * 4
        assert sp.joint_angles[0] != PI

    def test_overspeed_flagged(self, geom):
        sp = tunneling_setpoints(geom, TunnelingCommand(STRAIGHT, 1.5))
        assert sp.saturated
        assert max(abs(w) for w in sp.screw_omegas) == pytest.approx(geom.omega_max)

    def test_nonfinite_speed(self, geom):
        with pytest.raises(SaturationError):
            tunneling_setpoints(geom, TunnelingCommand(STRAIGHT, math.nan))

    def test_propagates_infeasible(self, geom):
        with pytest.raises(InfeasibleRadiusError):
            tunneling_setpoints(geom, TunnelingCommand(0.05, 0.5))


class TestConforming:
    def test_neutral(self, geom):
        plan = conforming_setpoints(geom, 0.0)
        assert plan.head_angle == PI
        assert plan.modes[0] is JointMode.POSITION_HOLD
        assert all(m is JointMode.COMPLIANT for m in plan.modes[1:])

    def test_steer(self, geom):
        plan = conforming_setpoints(geom, math.radians(20.0))
        assert plan.head_angle == pytest.approx(PI - math.radians(20.0))

    def test_limit(self, geom):
        with pytest.raises(JointLimitError):
            conforming_setpoints(geom, geom.joint_limit + 0.01)
