"""Parity between the compiled kernels and the numpy fallback."""

import math

import numpy as np
import pytest

from screwsnake import _core_py
from screwsnake import kernels


def implementations():
    impls = [_core_py]
    try:
        from screwsnake import _core

        impls.append(_core)
    except ImportError:
        pass
    return impls


IMPLS = implementations()
pairs = pytest.mark.skipif(
    len(IMPLS) < 2, reason="compiled extension not built; parity vacuous"
)


def random_cases(rng, count=200):
    for _ in range(count):
        n = int(rng.integers(2, 9))
        thetas = math.pi - rng.uniform(-1.4, 1.4, n - 1)
        rates = rng.uniform(-2, 2, n - 1)
        yield thetas, rates


@pairs
class TestParity:
    def test_chain_state(self, rng):
        a, b = IMPLS
        for thetas, _ in random_cases(rng):
            ca, ja, xa = a.chain_state(thetas, 0.182)
            cb, jb, xb = b.chain_state(thetas, 0.182)
            assert np.allclose(ca, cb, atol=1e-14)
            assert np.allclose(ja, jb, atol=1e-14)
            assert np.allclose(xa, xb, atol=1e-14)

    def test_induced(self, rng):
        a, b = IMPLS
        for thetas, rates in random_cases(rng):
            assert np.allclose(
                a.induced_velocities(thetas, rates, 0.182),
                b.induced_velocities(thetas, rates, 0.182),
                atol=1e-13,
            )

    def test_segment_frame_velocities(self, rng):
        a, b = IMPLS
        for thetas, rates in random_cases(rng, 50):
            centers, _, axis = a.chain_state(thetas, 0.182)
            ind = a.induced_velocities(thetas, rates, 0.182)
            vx, vy, wz = rng.uniform(-1, 1, 3)
            assert np.allclose(
                a.segment_frame_velocities(centers, axis, ind, vx, vy, wz),
                b.segment_frame_velocities(centers, axis, ind, vx, vy, wz),
                atol=1e-13,
            )

    def test_twist_fits(self, rng):
        a, b = IMPLS
        for _ in range(200):
            pts = rng.uniform(-1, 1, (5, 2))
            vels = rng.uniform(-1, 1, (5, 2))
            assert np.allclose(a.twist_fit(pts, vels), b.twist_fit(pts, vels),
                               atol=1e-12)
            assert np.allclose(
                a.twist_fit_locked_lateral(pts, vels),
                b.twist_fit_locked_lateral(pts, vels),
                atol=1e-12,
            )

    def test_kasa(self, rng):
        a, b = IMPLS
        ang = np.linspace(0, 2.0, 100)
        x = 0.3 + 0.43 * np.cos(ang) + rng.normal(0, 1e-3, 100)
        y = 0.43 * np.sin(ang) + rng.normal(0, 1e-3, 100)
        assert np.allclose(a.kasa_circle(x, y), b.kasa_circle(x, y), atol=1e-10)

    def test_advance_pose(self, rng):
        a, b = IMPLS
        for _ in range(100):
            args = rng.uniform(-1, 1, 6)
            assert np.allclose(
                a.advance_pose(*args, 0.01), b.advance_pose(*args, 0.01),
                atol=1e-15,
            )


def test_selected_implementation_exposed():
    assert kernels.IMPLEMENTATION in ("cython", "python")
