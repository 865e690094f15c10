"""Benchmark: compiled kernel extension vs the numpy fallback.

Times the hot per-step primitives (chain FK, induced velocities, frame
projection, twist fits, circle fit) and a full simulator stepping loop
under both implementations, asserting they agree numerically.

Run:  python3 benchmarks/bench_kernels.py [--reps 20000]
"""

import argparse
import math
import time

import numpy as np

from screwsnake import _core_py

try:
    from screwsnake import _core
except ImportError:
    _core = None


def time_call(fn, args, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def bench_primitives(reps):
    rng = np.random.default_rng(0)
    thetas = math.pi - rng.uniform(-1.2, 1.2, 3)
    rates = rng.uniform(-1, 1, 3)
    centers, joints, axis = _core_py.chain_state(thetas, 0.182)
    induced = _core_py.induced_velocities(thetas, rates, 0.182)
    pts = rng.uniform(-1, 1, (4, 2))
    vels = rng.uniform(-1, 1, (4, 2))
    ang = np.linspace(0, 2.0, 200)
    cx = 0.43 * np.cos(ang)
    cy = 0.43 * np.sin(ang)

    cases = [
        ("chain_state", (thetas, 0.182)),
        ("induced_velocities", (thetas, rates, 0.182)),
        ("segment_frame_velocities", (centers, axis, induced, 0.1, 0.0, 0.5)),
        ("twist_fit", (pts, vels)),
        ("twist_fit_locked_lateral", (pts, vels)),
        ("kasa_circle", (cx, cy)),
    ]
    rows = []
    for name, args in cases:
        py = time_call(getattr(_core_py, name), args, reps)
        if _core is not None:
            cy_t = time_call(getattr(_core, name), args, reps)
            a = np.asarray(getattr(_core_py, name)(*args), dtype=object)
            b = np.asarray(getattr(_core, name)(*args), dtype=object)
            for x, y in zip(np.ravel(a), np.ravel(b)):
                assert np.allclose(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float), atol=1e-12)
            rows.append((name, py, cy_t, py / cy_t))
        else:
            rows.append((name, py, None, None))
    return rows


def bench_sim_loop():
    import os

    from screwsnake.chain import ChainGeometry
    from screwsnake.sim import Mode, Simulator
    from screwsnake.terrain import IDEAL_SCREW_MEDIUM
    from screwsnake.tunneling import TunnelingCommand, tunneling_setpoints
    from screwsnake import kernels

    geom = ChainGeometry()
    sp = tunneling_setpoints(geom, TunnelingCommand(0.43, 0.5))

    def run():
        sim = Simulator(geom, IDEAL_SCREW_MEDIUM, Mode.TUNNELING)
        sim.set_setpoints(sp.joint_angles, sp.screw_omegas)
        sim.snap_to_setpoints()
        t0 = time.perf_counter()
        sim.run(50.0)  # 5000 steps
        return (time.perf_counter() - t0) / 5000

    return kernels.IMPLEMENTATION, run()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=20000)
    args = parser.parse_args()

    print(f"{'primitive':28s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, py, cy_t, speedup in bench_primitives(args.reps):
        if cy_t is None:
            print(f"{name:28s} {py * 1e6:8.2f}us {'n/a':>10s} {'n/a':>8s}")
        else:
            print(
                f"{name:28s} {py * 1e6:8.2f}us {cy_t * 1e6:8.2f}us "
                f"{speedup:7.1f}x"
            )
    impl, per_step = bench_sim_loop()
    print(f"\nfull simulator step ({impl} kernels): {per_step * 1e6:.1f} us/step")
    if _core is None:
        print("compiled extension not built; python-only timings shown")


if __name__ == "__main__":
    main()
