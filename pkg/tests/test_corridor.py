import math

import numpy as np
import pytest

from screwsnake.chain import ChainGeometry
from screwsnake.corridor import (
    ConformingSimulator,
    CorridorSpec,
    zigzag_corridor,
)
from screwsnake.errors import InvalidGeometryError
from screwsnake.terrain import IDEAL_SCREW_MEDIUM, load_bundled_profile


class TestCorridorSpec:
    def test_zigzag_builds(self):
        spec = zigzag_corridor()
        assert spec.width == pytest.approx(0.22)
        assert spec.total_length > 3.0
        assert spec.incline_deg == pytest.approx(15.0)
        s0, s1 = spec.incline_span
        assert 0.0 < s0 < s1 <= spec.total_length

    def test_point_at_endpoints(self):
        spec = zigzag_corridor()
        assert np.allclose(spec.point_at(0.0), spec.centerline[0])
        assert np.allclose(spec.point_at(spec.total_length), spec.centerline[-1])

    def test_distance_to_centerline(self):
        spec = CorridorSpec(centerline=[[0, 0], [1, 0]], width=0.3)
        assert spec.distance_to_centerline([0.5, 0.1]) == pytest.approx(0.1)
        assert spec.distance_to_centerline([2.0, 0.0]) == pytest.approx(1.0)

    def test_too_narrow(self, geom):
        spec = CorridorSpec(centerline=[[0, 0], [5, 0]], width=0.10)
        with pytest.raises(InvalidGeometryError):
            spec.clearance(geom)

    def test_speed_factor_on_incline(self):
        spec = zigzag_corridor()
        s0, s1 = spec.incline_span
        assert spec.speed_factor(0.5 * (s0 + s1)) == pytest.approx(
            math.cos(math.radians(15.0))
        )
        assert spec.speed_factor(0.0) == 1.0


@pytest.fixture(scope="module")
def finished():
    geom = ChainGeometry()
    sim = ConformingSimulator(
        geom=geom,
        terrain=load_bundled_profile("gravel"),
        spec=zigzag_corridor(),
        screw_speed_fraction=1.0,
        dt=0.01,
    )
    sim.run(600.0)
    return geom, sim


class TestConforming:
    def test_reaches_exit(self, finished):
        _, sim = finished
        assert sim.exit_reached

    def test_zero_wall_violations(self, finished):
        _, sim = finished
        assert sim.violations == 0

    def test_joints_track_centerline_bends(self, finished):
        # compliant joints equal the local centerline bend angles, which the
        # log records; none may exceed the joint limit
        geom, sim = finished
        thetas = np.array(sim.log.thetas)
        defl = math.pi - thetas
        assert np.abs(defl).max() <= geom.joint_limit + 1e-9
        assert np.abs(defl).max() > 0.1  # the zigzag actually bends the body

    def test_summary_fields(self, finished):
        _, sim = finished
        s = sim.summary()
        assert s["exit_reached"] is True
        assert s["violations"] == 0
        assert s["mode"] == "conforming"

    def test_straight_corridor_zero_bends(self, geom):
        spec = CorridorSpec(centerline=[[0, 0], [6, 0]], width=0.25)
        sim = ConformingSimulator(
            geom=geom, terrain=IDEAL_SCREW_MEDIUM, spec=spec,
            screw_speed_fraction=1.0, dt=0.01,
        )
        sim.run(5.0)
        thetas = np.array(sim.log.thetas)
        assert np.allclose(thetas, math.pi, atol=1e-9)
        assert sim.violations == 0
