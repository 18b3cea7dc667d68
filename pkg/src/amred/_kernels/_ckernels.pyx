# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled traversal kernel; mirrors ``pykernels.traverse`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, fabs, sqrt

cnp.import_array()

NAME = "cython"

HIT = 0
NO_INTERSECTION = 1
TANGENT_STALL = 2
DRIFT_EXCEEDED = 3
ZERO_GRADIENT = 4
BOUNDARY_STALL = 5


cdef inline double _clamp(double x) nogil:
    if x < -1.0:
        return -1.0
    if x > 1.0:
        return 1.0
    return x


cdef inline Py_ssize_t _snap_flat(const double* p, double spacing, long m,
                                  const long* strides, Py_ssize_t dim) nogil:
    cdef Py_ssize_t a
    cdef double r
    cdef long i
    cdef Py_ssize_t flat = 0
    for a in range(dim):
        r = ceil((p[a] + 1.0) / spacing - 0.5)
        i = <long> r
        if i < 0:
            i = 0
        elif i > m - 1:
            i = m - 1
        flat += i * strides[a]
    return flat


def traverse(
    double[:, ::1] unit_gradients,
    double[::1] values,
    const unsigned char[::1] zero_flags,
    double spacing,
    long points_per_axis,
    long[::1] strides,
    double[:, ::1] manifold_points,
    double[::1] p0,
    double eps_hit,
    double delta,
    long max_iters,
    double drift_tolerance,
    bint record=False,
):
    cdef Py_ssize_t dim = unit_gradients.shape[1]
    cdef Py_ssize_t n_manifold = manifold_points.shape[0]
    cdef Py_ssize_t a, j, k, i, midx, best
    cdef double f0, fv, drift, adrift, d2, best_d2, dot_ue, nv, moved, diff, t

    p_arr = np.empty(dim, dtype=np.float64)
    cdef double[::1] p = p_arr
    scratch_u = np.empty(dim, dtype=np.float64)
    cdef double[::1] u = scratch_u
    scratch_v = np.empty(dim, dtype=np.float64)
    cdef double[::1] v = scratch_v

    cdef double[:, ::1] path_mv = None
    cdef double[:, ::1] e0s_mv = None
    cdef double[:, ::1] vhats_mv = None
    path_arr = e0s_arr = vhats_arr = None
    if record:
        path_arr = np.empty((max_iters + 1, dim), dtype=np.float64)
        e0s_arr = np.empty((max_iters + 1, dim), dtype=np.float64)
        vhats_arr = np.empty((max_iters + 1, dim), dtype=np.float64)
        path_mv = path_arr
        e0s_mv = e0s_arr
        vhats_mv = vhats_arr

    for a in range(dim):
        p[a] = _clamp(p0[a])
    i = _snap_flat(&p[0], spacing, points_per_axis, &strides[0], dim)
    f0 = values[i]
    drift = 0.0
    midx = -1
    cdef int status = NO_INTERSECTION
    cdef long iterations = max_iters
    cdef long n_vhat = 0

    for k in range(max_iters + 1):
        i = _snap_flat(&p[0], spacing, points_per_axis, &strides[0], dim)
        fv = values[i]
        if record:
            for a in range(dim):
                path_mv[k, a] = p[a]
                e0s_mv[k, a] = unit_gradients[i, a]
        adrift = fabs(fv - f0)
        if adrift > drift:
            drift = adrift
        if drift > drift_tolerance:
            status = DRIFT_EXCEEDED
            iterations = k
            break
        best = 0
        best_d2 = 0.0
        for j in range(n_manifold):
            d2 = 0.0
            for a in range(dim):
                diff = manifold_points[j, a] - p[a]
                d2 += diff * diff
            if j == 0 or d2 < best_d2:
                best_d2 = d2
                best = j
        midx = best
        if sqrt(best_d2) < eps_hit:
            status = HIT
            iterations = k
            break
        if zero_flags[i]:
            status = ZERO_GRADIENT
            iterations = k
            break
        if k == max_iters:
            break  # NO_INTERSECTION: step budget exhausted
        dot_ue = 0.0
        for a in range(dim):
            u[a] = manifold_points[midx, a] - p[a]
            dot_ue += u[a] * unit_gradients[i, a]
        nv = 0.0
        d2 = 0.0
        for a in range(dim):
            v[a] = u[a] - dot_ue * unit_gradients[i, a]
            nv += v[a] * v[a]
            d2 += u[a] * u[a]
        nv = sqrt(nv)
        t = sqrt(d2)
        if t < 1.0:
            t = 1.0
        if nv < 1e-12 * t:
            status = TANGENT_STALL
            iterations = k
            break
        moved = 0.0
        for a in range(dim):
            diff = _clamp(p[a] + delta * (v[a] / nv)) - p[a]
            moved += diff * diff
        moved = sqrt(moved)
        if moved < delta * 1e-6:
            status = BOUNDARY_STALL
            iterations = k
            break
        if record:
            for a in range(dim):
                vhats_mv[n_vhat, a] = v[a] / nv
        n_vhat += 1
        for a in range(dim):
            p[a] = _clamp(p[a] + delta * (v[a] / nv))

    if record:
        path_out = path_arr[: iterations + 1].copy()
        e0s_out = e0s_arr[: iterations + 1].copy()
        vhats_out = vhats_arr[:n_vhat].copy() if n_vhat else np.empty((0, dim))
    else:
        path_out = e0s_out = vhats_out = None
    return (
        p_arr.copy(),
        int(midx),
        int(iterations),
        float(drift),
        float(f0),
        int(status),
        path_out,
        e0s_out,
        vhats_out,
    )
