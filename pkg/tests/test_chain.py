import math

import numpy as np
import pytest

from screwsnake.chain import (
    BodyTwist,
    ChainGeometry,
    Frame,
    JointState,
    axial_radial_velocity,
    chain_arrays,
    induced_velocity,
    joint_position,
    segment_position,
)
from screwsnake.errors import (
    FrameMismatchError,
    InvalidGeometryError,
    JointLimitError,
    SegmentIndexError,
)

PI = math.pi


def random_joints(geom, rng, with_rates=False):
    defl = rng.uniform(-geom.joint_limit, geom.joint_limit, geom.n_joints)
    rates = rng.uniform(-2.0, 2.0, geom.n_joints) if with_rates else None
    return JointState.from_deflections(defl, rates=rates)


class TestGeometry:
    def test_defaults(self, geom):
        assert geom.n_segments == 4
        assert geom.handedness == (1, -1, 1, -1)
        assert geom.r_min == pytest.approx(0.182)
        # lead speed at full screw rate reproduces the rated value
        assert geom.omega_max * geom.lead_per_radian == pytest.approx(0.23)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_segments": 1},
            {"l": 0.0},
            {"r_s": -1.0},
            {"v_lead_max": 0.0},
            {"joint_limit": 0.0},
            {"joint_limit": 2.0},
            {"handedness": (1, 1, -1, 1)},
            {"handedness": (1, -1)},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidGeometryError):
            ChainGeometry(**kwargs)


class TestSegmentPosition:
    def test_head_is_origin(self, geom, rng):
        for _ in range(10):
            js = random_joints(geom, rng)
            assert segment_position(geom, js, 1) == (0.0, 0.0)

    def test_straight_chain(self, geom):
        js = JointState.straight(geom)
        assert segment_position(geom, js, 3) == pytest.approx((-0.728, 0.0))

    def test_right_angle_joint(self, geom):
        js = JointState(angles=(PI / 2, PI, PI))
        x, y = segment_position(geom, js, 2)
        assert (x, y) == pytest.approx((-0.182, 0.182))

    def test_index_errors(self, geom):
        js = JointState.straight(geom)
        for bad in (0, 5, -1):
            with pytest.raises(SegmentIndexError):
                segment_position(geom, js, bad)

    def test_joint_limit_rejected(self, geom):
        js = JointState.from_deflections((geom.joint_limit + 0.01, 0.0, 0.0))
        with pytest.raises(JointLimitError):
            segment_position(geom, js, 2)

    def test_length_preservation(self, geom, rng):
        for _ in range(50):
            js = random_joints(geom, rng)
            centers, joints, _ = chain_arrays(geom, js)
            for k in range(geom.n_joints):
                assert np.hypot(*(centers[k] - joints[k])) == pytest.approx(
                    geom.l, abs=1e-12
                )
                assert np.hypot(*(centers[k + 1] - joints[k])) == pytest.approx(
                    geom.l, abs=1e-12
                )

    def test_straight_degeneracy(self, geom):
        centers, joints, axis = chain_arrays(geom, JointState.straight(geom))
        assert np.allclose(centers[:, 1], 0.0)
        assert np.allclose(joints[:, 1], 0.0)
        assert np.allclose(axis, 0.0)

    def test_joint_position_helper(self, geom):
        js = JointState.straight(geom)
        assert joint_position(geom, js, 1) == pytest.approx((-0.182, 0.0))
        with pytest.raises(SegmentIndexError):
            joint_position(geom, js, 4)

    def test_cumulative_deflection_is_prefix_sum(self, geom, rng):
        js = random_joints(geom, rng)
        defl = js.deflections
        assert js.cumulative_deflection(0) == 0.0
        for j in range(1, geom.n_joints + 1):
            assert js.cumulative_deflection(j) == pytest.approx(sum(defl[:j]))


class TestInducedVelocity:
    def test_zero_rates(self, geom, rng):
        js = random_joints(geom, rng)
        for i in range(1, 5):
            assert induced_velocity(geom, js, i) == (0.0, 0.0)

    def test_head_segment_always_zero(self, geom, rng):
        js = random_joints(geom, rng, with_rates=True)
        assert induced_velocity(geom, js, 1) == (0.0, 0.0)

    def test_straight_unit_rate(self, geom):
        js = JointState(angles=(PI, PI, PI), rates=(1.0, 0.0, 0.0))
        assert induced_velocity(geom, js, 2) == pytest.approx((0.0, 0.182))

    def test_finite_difference_consistency(self, geom, rng):
        # deflection perturbation d(t) = d + rate*t, central difference
        dt = 1e-6
        for _ in range(100):
            js = random_joints(geom, rng, with_rates=True)
            defl = np.array(js.deflections)
            rates = np.array(js.rates)
            scale = max(geom.l * np.linalg.norm(rates), 1e-9)
            for i in range(2, geom.n_segments + 1):
                plus = segment_position(
                    geom, JointState.from_deflections(defl + rates * dt), i
                )
                minus = segment_position(
                    geom, JointState.from_deflections(defl - rates * dt), i
                )
                fd = (np.array(plus) - np.array(minus)) / (2 * dt)
                w = np.array(induced_velocity(geom, js, i))
                assert np.linalg.norm(fd - w) < 1e-6 * scale


class TestAxialRadial:
    def test_pure_translation_straight(self, geom):
        js = JointState.straight(geom)
        twist = BodyTwist(Frame.HEAD, 0.1, 0.0, 0.0)
        for i in range(1, 5):
            sv = axial_radial_velocity(geom, js, twist, i)
            assert (sv.axial, sv.radial) == pytest.approx((0.1, 0.0))

    def test_pure_rotation_straight(self, geom):
        js = JointState.straight(geom)
        twist = BodyTwist(Frame.HEAD, 0.0, 0.0, 1.0)
        sv = axial_radial_velocity(geom, js, twist, 3)
        assert (sv.axial, sv.radial) == pytest.approx((0.0, -0.728))

    def test_head_segment_identity(self, geom, rng):
        js = random_joints(geom, rng)
        twist = BodyTwist(Frame.HEAD, 0.3, -0.2, 0.7)
        sv = axial_radial_velocity(geom, js, twist, 1)
        assert (sv.axial, sv.radial) == pytest.approx((0.3, -0.2))

    def test_frame_mismatch(self, geom):
        twist = BodyTwist(Frame.M_CENTER, 0.1, 0.0, 0.0)
        with pytest.raises(FrameMismatchError):
            axial_radial_velocity(geom, JointState.straight(geom), twist, 2)

    def test_rotation_isometry(self, geom, rng):
        # the projection is orthonormal: |(va, vr)| equals the pre-rotation
        # velocity magnitude
        for _ in range(50):
            js = random_joints(geom, rng, with_rates=True)
            vx, vy, wz = rng.uniform(-1, 1, 3)
            twist = BodyTwist(Frame.HEAD, vx, vy, wz)
            centers, _, _ = chain_arrays(geom, js)
            for i in range(1, 5):
                w = np.array(induced_velocity(geom, js, i))
                pre = np.array(
                    [vx - centers[i - 1, 1] * wz, vy + centers[i - 1, 0] * wz]
                ) + w
                sv = axial_radial_velocity(geom, js, twist, i)
                assert math.hypot(sv.axial, sv.radial) == pytest.approx(
                    np.linalg.norm(pre), abs=1e-12
                )

    def test_velocity_respects_segment_axis(self, geom):
        # bent chain translating along segment 2's own axis: all axial
        js = JointState(angles=(PI / 2, PI, PI))
        centers, _, axis = chain_arrays(geom, js)
        a2 = axis[1]
        twist = BodyTwist(Frame.HEAD, math.cos(a2), math.sin(a2), 0.0)
        sv = axial_radial_velocity(geom, js, twist, 2)
        assert (sv.axial, sv.radial) == pytest.approx((1.0, 0.0), abs=1e-12)
