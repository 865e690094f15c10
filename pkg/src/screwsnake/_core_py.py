"""Pure-python (numpy) implementations of the hot numeric kernels.

Mirrors the API of the optional compiled extension ``screwsnake._core``;
``screwsnake.kernels`` picks whichever is importable. Keep the two in
lockstep: tests/test_kernels.py asserts elementwise agreement.

Conventions shared by both implementations:
  * joint angles use the straight-is-pi convention; deflection = pi - angle,
    positive deflection bends toward +y
  * segment/joint indices are 0-based at this layer (the public API is
    1-based like the model's subscripts)
  * rates are deflection rates (d/dt of pi - angle)
"""

import numpy as np

IMPLEMENTATION = "python"


def chain_state(thetas, l):
    """Forward kinematics of the planar chain in the head-segment frame.

    Args:
        thetas: (n-1,) joint angles, straight = pi
        l: half-link length, segment center to adjacent U-joint (m)

    Returns:
        centers: (n, 2) segment center positions, centers[0] = origin
        joints: (n-1, 2) U-joint positions
        axis_angles: (n,) heading of each segment's forward axis
    """
    thetas = np.asarray(thetas, dtype=float)
    n = thetas.shape[0] + 1
    cum = np.zeros(n)
    np.cumsum(np.pi - thetas, out=cum[1:])
    centers = np.zeros((n, 2))
    joints = np.zeros((n - 1, 2))
    x = 0.0
    y = 0.0
    for k in range(1, n):
        jx = x - l * np.cos(cum[k - 1])
        jy = y + l * np.sin(cum[k - 1])
        joints[k - 1, 0] = jx
        joints[k - 1, 1] = jy
        x = jx - l * np.cos(cum[k])
        y = jy + l * np.sin(cum[k])
        centers[k, 0] = x
        centers[k, 1] = y
    return centers, joints, -cum


def induced_velocities(thetas, defl_rates, l):
    """Segment-center velocities induced by joint motion (head frame).

    ``defl_rates`` are deflection rates; the result is the exact time
    derivative of ``chain_state`` centers under those rates.
    Returns (n, 2).
    """
    thetas = np.asarray(thetas, dtype=float)
    defl_rates = np.asarray(defl_rates, dtype=float)
    n = thetas.shape[0] + 1
    cum = np.zeros(n)
    np.cumsum(np.pi - thetas, out=cum[1:])
    rcum = np.zeros(n)
    np.cumsum(defl_rates, out=rcum[1:])
    w = np.zeros((n, 2))
    sx = 0.0
    sy = 0.0
    for i in range(1, n):
        sx += 2.0 * l * np.sin(cum[i]) * rcum[i]
        sy += 2.0 * l * np.cos(cum[i]) * rcum[i]
        w[i, 0] = sx - l * np.sin(cum[i]) * rcum[i]
        w[i, 1] = sy - l * np.cos(cum[i]) * rcum[i]
    return w


def segment_frame_velocities(centers, axis_angles, induced, vx, vy, wz):
    """Axial/radial decomposition of total segment-center velocities.

    Total velocity at segment i is the rigid-body field of the frame twist
    (vx, vy, wz) evaluated at the segment center plus the joint-induced
    velocity; it is then projected onto the segment's own axial (forward)
    and radial (left-of-forward) axes. Returns (n, 2) [axial, radial].
    """
    centers = np.asarray(centers, dtype=float)
    axis_angles = np.asarray(axis_angles, dtype=float)
    induced = np.asarray(induced, dtype=float)
    tx = vx - centers[:, 1] * wz + induced[:, 0]
    ty = vy + centers[:, 0] * wz + induced[:, 1]
    ca = np.cos(axis_angles)
    sa = np.sin(axis_angles)
    out = np.empty_like(centers)
    out[:, 0] = ca * tx + sa * ty
    out[:, 1] = -sa * tx + ca * ty
    return out


def twist_fit(points, vels):
    """Least-squares rigid planar twist through per-point velocities.

    Minimizes sum |(vx - y_i w, vy + x_i w) - v_i|^2 over (vx, vy, w).
    Returns (vx, vy, w).
    """
    points = np.asarray(points, dtype=float)
    vels = np.asarray(vels, dtype=float)
    n = points.shape[0]
    x = points[:, 0]
    y = points[:, 1]
    # normal equations of the stacked [1,0,-y; 0,1,x] system
    a = np.array(
        [
            [n, 0.0, -y.sum()],
            [0.0, n, x.sum()],
            [-y.sum(), x.sum(), (x * x + y * y).sum()],
        ]
    )
    b = np.array(
        [
            vels[:, 0].sum(),
            vels[:, 1].sum(),
            (x * vels[:, 1] - y * vels[:, 0]).sum(),
        ]
    )
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(sol[0]), float(sol[1]), float(sol[2])


def twist_fit_locked_lateral(points, vels):
    """Twist fit with the frame's lateral (+y) velocity constrained to zero.

    Used by the M-configuration, whose kinematic model carries the
    no-lateral-motion constraint. Returns (vx, 0.0, w).
    """
    points = np.asarray(points, dtype=float)
    vels = np.asarray(vels, dtype=float)
    n = points.shape[0]
    x = points[:, 0]
    y = points[:, 1]
    a = np.array(
        [
            [n, -y.sum()],
            [-y.sum(), (x * x + y * y).sum()],
        ]
    )
    b = np.array(
        [
            vels[:, 0].sum(),
            (x * vels[:, 1] - y * vels[:, 0]).sum(),
        ]
    )
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(sol[0]), 0.0, float(sol[1])


def kasa_circle(x, y):
    """Algebraic (Kasa) circle fit.

    Returns (cx, cy, radius, rms) where rms is the root-mean-square of the
    radial residuals dist_i - radius.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.column_stack([x, y, np.ones_like(x)])
    b = x * x + y * y
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    cx = 0.5 * sol[0]
    cy = 0.5 * sol[1]
    r2 = sol[2] + cx * cx + cy * cy
    r = np.sqrt(r2) if r2 > 0.0 else 0.0
    d = np.hypot(x - cx, y - cy)
    rms = float(np.sqrt(np.mean((d - r) ** 2)))
    return float(cx), float(cy), float(r), rms


def advance_pose(x, y, psi, vx, vy, wz, dt):
    """Explicit-Euler pose update with a body-frame twist."""
    c = np.cos(psi)
    s = np.sin(psi)
    return (
        x + dt * (vx * c - vy * s),
        y + dt * (vx * s + vy * c),
        psi + dt * wz,
    )
