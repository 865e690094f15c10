# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels: planar chain FK, twist fits, circle fit.

Same API and conventions as screwsnake._core_py (the numpy fallback);
see that module's docstring. The public selector is screwsnake.kernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, M_PI

cnp.import_array()

IMPLEMENTATION = "cython"


def chain_state(thetas, double l):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t m = th.shape[0]
    cdef Py_ssize_t n = m + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] centers = np.zeros((n, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] joints = np.zeros((m, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axis = np.zeros(n)
    cdef double x = 0.0, y = 0.0, jx, jy, acc = 0.0
    cdef double prev
    cdef Py_ssize_t k
    for k in range(m):
        prev = acc
        acc += M_PI - th[k]
        jx = x - l * cos(prev)
        jy = y + l * sin(prev)
        joints[k, 0] = jx
        joints[k, 1] = jy
        x = jx - l * cos(acc)
        y = jy + l * sin(acc)
        centers[k + 1, 0] = x
        centers[k + 1, 1] = y
        axis[k + 1] = -acc
    return centers, joints, axis


def induced_velocities(thetas, defl_rates, double l):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rt = np.ascontiguousarray(defl_rates, dtype=np.float64)
    cdef Py_ssize_t m = th.shape[0]
    cdef Py_ssize_t n = m + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.zeros((n, 2))
    cdef double cum = 0.0, rcum = 0.0, sx = 0.0, sy = 0.0, si, ci
    cdef Py_ssize_t i
    for i in range(1, n):
        cum += M_PI - th[i - 1]
        rcum += rt[i - 1]
        si = sin(cum)
        ci = cos(cum)
        sx += 2.0 * l * si * rcum
        sy += 2.0 * l * ci * rcum
        w[i, 0] = sx - l * si * rcum
        w[i, 1] = sy - l * ci * rcum
    return w


def segment_frame_velocities(centers, axis_angles, induced, double vx, double vy, double wz):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.ascontiguousarray(axis_angles, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] wi = np.ascontiguousarray(induced, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, 2))
    cdef double tx, ty, ca, sa
    cdef Py_ssize_t i
    for i in range(n):
        tx = vx - c[i, 1] * wz + wi[i, 0]
        ty = vy + c[i, 0] * wz + wi[i, 1]
        ca = cos(a[i])
        sa = sin(a[i])
        out[i, 0] = ca * tx + sa * ty
        out[i, 1] = -sa * tx + ca * ty
    return out


def twist_fit(points, vels):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vels, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef double sy = 0.0, sx = 0.0, srr = 0.0, bvx = 0.0, bvy = 0.0, bw = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        sx += p[i, 0]
        sy += p[i, 1]
        srr += p[i, 0] * p[i, 0] + p[i, 1] * p[i, 1]
        bvx += v[i, 0]
        bvy += v[i, 1]
        bw += p[i, 0] * v[i, 1] - p[i, 1] * v[i, 0]
    a = np.array([[<double>n, 0.0, -sy], [0.0, <double>n, sx], [-sy, sx, srr]])
    b = np.array([bvx, bvy, bw])
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(a, b, rcond=None)[0]
    return float(sol[0]), float(sol[1]), float(sol[2])


def twist_fit_locked_lateral(points, vels):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vels, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef double sy = 0.0, srr = 0.0, bvx = 0.0, bw = 0.0
    cdef double a00, a01, a11, det
    cdef Py_ssize_t i
    for i in range(n):
        sy += p[i, 1]
        srr += p[i, 0] * p[i, 0] + p[i, 1] * p[i, 1]
        bvx += v[i, 0]
        bw += p[i, 0] * v[i, 1] - p[i, 1] * v[i, 0]
    a00 = <double>n
    a01 = -sy
    a11 = srr
    det = a00 * a11 - a01 * a01
    if det == 0.0:
        sol = np.linalg.lstsq(
            np.array([[a00, a01], [a01, a11]]), np.array([bvx, bw]), rcond=None
        )[0]
        return float(sol[0]), 0.0, float(sol[1])
    return (
        (a11 * bvx - a01 * bw) / det,
        0.0,
        (a00 * bw - a01 * bvx) / det,
    )


def kasa_circle(x, y):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.ascontiguousarray(y, dtype=np.float64)
    a = np.column_stack([xs, ys, np.ones(xs.shape[0])])
    b = xs * xs + ys * ys
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    cdef double cx = 0.5 * sol[0]
    cdef double cy = 0.5 * sol[1]
    cdef double r2 = sol[2] + cx * cx + cy * cy
    cdef double r = sqrt(r2) if r2 > 0.0 else 0.0
    d = np.hypot(xs - cx, ys - cy)
    rms = float(np.sqrt(np.mean((d - r) ** 2)))
    return cx, cy, r, rms


def advance_pose(double x, double y, double psi, double vx, double vy, double wz, double dt):
    cdef double c = cos(psi)
    cdef double s = sin(psi)
    return (x + dt * (vx * c - vy * s), y + dt * (vx * s + vy * c), psi + dt * wz)
