"""Pure-numpy traversal kernel; reference for the compiled twin.

The compiled extension (``_ckernels``) follows this implementation
operation for operation so that both backends produce matching paths.
Status codes are shared through the module-level constants.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

HIT = 0
NO_INTERSECTION = 1
TANGENT_STALL = 2
DRIFT_EXCEEDED = 3
ZERO_GRADIENT = 4
BOUNDARY_STALL = 5


def snap_flat_index(p, spacing, m, strides):
    """Row-major flat index of the nearest lattice point (p already clamped)."""
    i = np.ceil((p + 1.0) / spacing - 0.5).astype(np.int64)
    np.clip(i, 0, m - 1, out=i)
    return int(i @ strides)


def traverse(
    unit_gradients,
    values,
    zero_flags,
    spacing,
    points_per_axis,
    strides,
    manifold_points,
    p0,
    eps_hit,
    delta,
    max_iters,
    drift_tolerance,
    record=False,
):
    """Walk from ``p0`` along level-set directions until the polyline is hit.

    Returns ``(p, nearest_index, iterations, drift, f0, status, path, e0s,
    vhats)``; the last three are None unless ``record`` is set. ``path``
    holds every visited point (iterations + 1 rows), ``e0s`` the unit
    gradient used at each of them, and ``vhats`` the unit step direction for
    each completed step (iterations rows).
    """
    p = np.clip(np.asarray(p0, dtype=float), -1.0, 1.0)
    m = points_per_axis
    f0 = values[snap_flat_index(p, spacing, m, strides)]
    drift = 0.0
    path = [] if record else None
    e0s = [] if record else None
    vhats = [] if record else None
    midx = -1
    status = NO_INTERSECTION
    iterations = max_iters
    for k in range(max_iters + 1):
        i = snap_flat_index(p, spacing, m, strides)
        fv = values[i]
        if record:
            path.append(p.copy())
            e0s.append(unit_gradients[i].copy())
        adrift = abs(fv - f0)
        if adrift > drift:
            drift = adrift
        if drift > drift_tolerance:
            status, iterations = DRIFT_EXCEEDED, k
            break
        diff = manifold_points - p
        d2 = np.sum(diff * diff, axis=1)
        midx = int(np.argmin(d2))
        if np.sqrt(d2[midx]) < eps_hit:
            status, iterations = HIT, k
            break
        if zero_flags[i]:
            status, iterations = ZERO_GRADIENT, k
            break
        if k == max_iters:
            break  # NO_INTERSECTION: step budget exhausted
        e0 = unit_gradients[i]
        u = manifold_points[midx] - p
        # Plain mul+sum dots (not BLAS) keep bit parity with the compiled
        # kernel, which is built with FP contraction disabled.
        v = u - float(np.sum(u * e0)) * e0
        nv = float(np.sqrt(np.sum(v * v)))
        if nv < 1e-12 * max(1.0, float(np.sqrt(np.sum(u * u)))):
            status, iterations = TANGENT_STALL, k
            break
        vhat = v / nv
        cand = np.clip(p + delta * vhat, -1.0, 1.0)
        moved = float(np.sqrt(np.sum((cand - p) ** 2)))
        if moved < delta * 1e-6:
            status, iterations = BOUNDARY_STALL, k
            break
        if record:
            vhats.append(vhat)
        p = cand
    if record:
        path = np.array(path)
        e0s = np.array(e0s)
        vhats = np.array(vhats) if vhats else np.empty((0, p.shape[0]))
    return p, midx, iterations, float(drift), float(f0), status, path, e0s, vhats
