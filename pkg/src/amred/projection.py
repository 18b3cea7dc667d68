"""Level-set traversal: map a query point onto the active manifold.

From a query ``p`` the walk repeatedly steps a distance ``delta`` along the
component of the direction-to-the-manifold orthogonal to the local unit
gradient, staying (approximately) on the level set of ``f(p)``, until it
comes within ``eps_hit`` of a manifold vertex. The landing parameter is
then refined by intersecting the adjacent polyline segment with the
hyperplane through the walker orthogonal to the gradient.

The inner loop runs on the selected kernel backend (compiled when
available); see :mod:`amred._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import ProjectionError, TangentSegmentError, TraversalFailed
from .geometry import GradientField, clamp_to_domain
from .manifold import ActiveManifold
from .surrogate import PolynomialSurrogate, evaluate

_STATUS_NAMES = {
    _kernels.HIT: "hit",
    _kernels.NO_INTERSECTION: "no_intersection",
    _kernels.TANGENT_STALL: "tangent_stall",
    _kernels.DRIFT_EXCEEDED: "drift_exceeded",
    _kernels.ZERO_GRADIENT: "zero_gradient",
    _kernels.BOUNDARY_STALL: "boundary_stall",
}


@dataclass(frozen=True)
class TraversalConfig:
    """Tolerances and budgets for one traversal."""

    eps_hit: float
    delta: float
    max_iters: int
    drift_tolerance: float

    def __post_init__(self):
        for name in ("eps_hit", "delta", "drift_tolerance"):
            if getattr(self, name) <= 0.0:
                raise ProjectionError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ProjectionError("max_iters must be at least 1")

    @classmethod
    def defaults(cls, field: GradientField, manifold: ActiveManifold) -> "TraversalConfig":
        """Default tolerances derived from the field and manifold.

        eps_hit = grid pitch, delta = pitch / 4, max_iters scaled with grid
        resolution and dimension, drift tolerance 10% of the manifold's
        value range.
        """
        z_range = float(manifold.values[-1] - manifold.values[0])
        return cls(
            eps_hit=field.spacing,
            delta=field.spacing / 4.0,
            max_iters=10 * field.points_per_axis * field.dimension,
            drift_tolerance=0.1 * z_range if z_range > 0.0 else 1.0,
        )


@dataclass
class ProjectionResult:
    """Outcome of projecting one query onto the manifold."""

    query: np.ndarray
    landing_param: Optional[float]  # s* in [0, 1]; None on failure
    landing_point: Optional[np.ndarray]
    estimate: Optional[float]
    iterations: int
    drift: float
    status: str  # "hit" or a failure status
    clamped: bool = False  # landing parameter hit a segment end

    @property
    def succeeded(self) -> bool:
        return self.status == "hit"


@dataclass
class TraversalTrace:
    """Per-step record of a traversal (diagnostics and property checks)."""

    points: np.ndarray  # (iterations + 1, n) visited walker positions
    unit_gradients: np.ndarray  # (iterations + 1, n) e0 at each position
    step_directions: np.ndarray  # (iterations, n) unit step directions


def nearest_manifold_point(manifold: ActiveManifold, p: np.ndarray):
    """Index and coordinates of the closest manifold vertex (direct scan)."""
    p = np.asarray(p, dtype=float)
    diff = manifold.points - p
    idx = int(np.argmin(np.sum(diff * diff, axis=1)))
    return idx, manifold.points[idx].copy()


def orthogonal_project(u: np.ndarray, unit_gradient: np.ndarray) -> np.ndarray:
    """Component of ``u`` orthogonal to a unit vector."""
    e0 = np.asarray(unit_gradient, dtype=float)
    norm = float(np.sqrt(e0 @ e0))
    if norm == 0.0:
        raise ProjectionError("undefined gradient direction (zero vector)")
    if abs(norm - 1.0) > 1e-10:
        raise ProjectionError(f"gradient direction is not unit length: |e0| = {norm}")
    u = np.asarray(u, dtype=float)
    return u - (u @ e0) * e0


def segment_parameter(
    m_i: np.ndarray, m_next: np.ndarray, p: np.ndarray, unit_gradient: np.ndarray
):
    """Parameter ``t`` where the segment crosses p's gradient hyperplane.

    Solves ``<(m_next - m_i) t + m_i - p, e0> = 0`` and clamps ``t`` to
    [0, 1]. Returns ``(t, clamped)``.
    """
    m_i = np.asarray(m_i, dtype=float)
    m_next = np.asarray(m_next, dtype=float)
    e0 = np.asarray(unit_gradient, dtype=float)
    denom = float((m_next - m_i) @ e0)
    if abs(denom) < 1e-12:
        raise TangentSegmentError("segment tangent to level set")
    t = float((np.asarray(p, dtype=float) - m_i) @ e0) / denom
    clamped = not (0.0 <= t <= 1.0)
    return min(max(t, 0.0), 1.0), clamped


def traverse_to_manifold(
    field: GradientField,
    manifold: ActiveManifold,
    p: np.ndarray,
    config: Optional[TraversalConfig] = None,
    gradient_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    record: bool = False,
    raise_on_failure: bool = True,
):
    """Project ``p`` onto the manifold along its level set.

    Gradients and drift values come from the nearest grid sample unless
    ``gradient_fn`` supplies exact gradient vectors. On success returns a
    :class:`ProjectionResult` (estimate unset); with ``record=True`` returns
    ``(result, trace)``. Failures raise :class:`TraversalFailed` carrying
    the partial result, or return it when ``raise_on_failure`` is false.
    """
    if config is None:
        config = TraversalConfig.defaults(field, manifold)
    if config.delta > field.spacing:
        raise ProjectionError(
            f"traversal step {config.delta} exceeds grid spacing {field.spacing}"
        )
    p = np.asarray(p, dtype=float)
    if p.shape != (field.dimension,):
        raise ProjectionError(
            f"query must have shape ({field.dimension},), got {p.shape}"
        )
    if gradient_fn is None:
        out = _kernels.traverse(
            field.unit_gradients,
            field.values,
            field.zero_flags.view(np.uint8),
            field.spacing,
            field.points_per_axis,
            field.strides,
            manifold.points,
            p,
            config.eps_hit,
            config.delta,
            config.max_iters,
            config.drift_tolerance,
            record,
        )
    else:
        out = _traverse_exact(field, manifold, p, config, gradient_fn, record)
    p_end, midx, iterations, drift, _f0, status_code, path, e0s, vhats = out
    status = _STATUS_NAMES[status_code]
    trace = (
        TraversalTrace(points=path, unit_gradients=e0s, step_directions=vhats)
        if record
        else None
    )
    if status != "hit":
        result = ProjectionResult(
            query=p,
            landing_param=None,
            landing_point=None,
            estimate=None,
            iterations=iterations,
            drift=drift,
            status=status,
        )
        if raise_on_failure:
            raise TraversalFailed(result)
        return (result, trace) if record else result

    if gradient_fn is None:
        e0 = field.unit_gradients[field.snap_index(p_end)]
    else:
        e0 = _unit(gradient_fn(p_end))
    s_star, landing, clamped = _landing(manifold, p_end, midx, e0)
    result = ProjectionResult(
        query=p,
        landing_param=s_star,
        landing_point=landing,
        estimate=None,
        iterations=iterations,
        drift=drift,
        status="hit",
        clamped=clamped,
    )
    return (result, trace) if record else result


def estimate_at(model: PolynomialSurrogate, result: ProjectionResult) -> float:
    """Evaluate the surrogate at the landing parameter; stores the value."""
    if not result.succeeded or result.landing_param is None:
        raise ProjectionError("cannot estimate: traversal did not hit the manifold")
    value = float(evaluate(model, result.landing_param))
    result.estimate = value
    return value


def _landing(manifold: ActiveManifold, p_end: np.ndarray, midx: int, e0: np.ndarray):
    """Refine the hit into (s*, landing point, clamped flag).

    The segment runs from the nearest vertex toward its closer neighbor
    (the next-closest manifold point); if that segment is tangent to the
    level set the other neighbor is tried, and as a last resort the landing
    degenerates to the vertex itself.
    """
    pts, params = manifold.points, manifold.params
    neighbors = [j for j in (midx - 1, midx + 1) if 0 <= j < len(manifold)]
    neighbors.sort(key=lambda j: float(np.sum((pts[j] - p_end) ** 2)))
    for j in neighbors:
        try:
            t, clamped = segment_parameter(pts[midx], pts[j], p_end, e0)
        except TangentSegmentError:
            continue
        s_star = float(params[midx] + t * (params[j] - params[midx]))
        landing = pts[midx] + t * (pts[j] - pts[midx])
        return s_star, landing, clamped
    return float(params[midx]), pts[midx].copy(), True


def _unit(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    norm = float(np.sqrt(g @ g))
    if norm == 0.0:
        raise ProjectionError("undefined gradient direction (zero vector)")
    return g / norm


def _traverse_exact(field, manifold, p0, config, gradient_fn, record):
    """Python traversal variant using exact gradients from ``gradient_fn``.

    Drift is still accounted with nearest-sample field values, matching the
    grid-backed kernel.
    """
    p = clamp_to_domain(p0)
    f0 = field.values[field.snap_index(p)]
    drift = 0.0
    path = [] if record else None
    e0s = [] if record else None
    vhats = [] if record else None
    midx = -1
    status = _kernels.NO_INTERSECTION
    iterations = config.max_iters
    for k in range(config.max_iters + 1):
        fv = field.values[field.snap_index(p)]
        e0 = _unit(gradient_fn(p))
        if record:
            path.append(p.copy())
            e0s.append(e0.copy())
        drift = max(drift, abs(fv - f0))
        if drift > config.drift_tolerance:
            status, iterations = _kernels.DRIFT_EXCEEDED, k
            break
        diff = manifold.points - p
        d2 = np.sum(diff * diff, axis=1)
        midx = int(np.argmin(d2))
        if np.sqrt(d2[midx]) < config.eps_hit:
            status, iterations = _kernels.HIT, k
            break
        if k == config.max_iters:
            break
        u = manifold.points[midx] - p
        v = u - (u @ e0) * e0
        nv = float(np.sqrt(v @ v))
        if nv < 1e-12 * max(1.0, float(np.sqrt(u @ u))):
            status, iterations = _kernels.TANGENT_STALL, k
            break
        vhat = v / nv
        cand = np.clip(p + config.delta * vhat, -1.0, 1.0)
        if float(np.sqrt(np.sum((cand - p) ** 2))) < config.delta * 1e-6:
            status, iterations = _kernels.BOUNDARY_STALL, k
            break
        if record:
            vhats.append(vhat)
        p = cand
    if record:
        path = np.array(path)
        e0s = np.array(e0s)
        vhats = np.array(vhats) if vhats else np.empty((0, field.dimension))
    return p, midx, iterations, float(drift), float(f0), status, path, e0s, vhats


# ---------------------------------------------------------------------------
# Projection report CSV: x1..xn,s_star,estimate,true_value,abs_error,
# iterations,drift,status
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_projection_report(path, results, truths) -> None:
    """Per-query projection report for a batch of traversals."""
    results = list(results)
    truths = list(truths)
    if len(results) != len(truths):
        raise ProjectionError("results and truths must have equal length")
    if not results:
        raise ProjectionError("empty report")
    dim = results[0].query.shape[0]
    cols = [f"x{i + 1}" for i in range(dim)]
    cols += ["s_star", "estimate", "true_value", "abs_error", "iterations", "drift", "status"]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for res, truth in zip(results, truths):
            cells = [_fmt(v) for v in res.query]
            if res.succeeded and res.estimate is not None:
                cells += [
                    _fmt(res.landing_param),
                    _fmt(res.estimate),
                    _fmt(truth),
                    _fmt(abs(res.estimate - truth)),
                ]
            else:
                cells += ["nan", "nan", _fmt(truth), "nan"]
            cells += [str(res.iterations), _fmt(res.drift), res.status]
            fh.write(",".join(cells) + "\n")
