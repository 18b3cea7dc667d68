"""Active-manifold construction by discrete steepest ascent/descent.

The manifold is a polyline traced over a gradient field: from a seed point
the unit gradient of the nearest grid sample is followed uphill and
downhill with a fixed step until a critical sample, the domain boundary,
or a step cap is reached. Each vertex records a scaled step parameter
``S[k] = k / (count - 1)`` and the function value ``Z[k]`` of its nearest
grid sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    DegenerateManifoldError,
    FormatError,
    InvariantViolation,
    StalledAtStartError,
)
from .geometry import GradientField, clamp_to_domain

#: Default cap on steps per trace direction.
DEFAULT_MAX_STEPS = 10_000

# A clamped step shorter than (1 - _FULL_STEP_RTOL) * step means the path
# ran into the boundary; the trace stops rather than sliding along a face.
_FULL_STEP_RTOL = 1e-9


@dataclass(eq=False)
class ActiveManifold:
    """Ordered polyline from a descent terminus to an ascent terminus."""

    points: np.ndarray  # (N, n), ascent direction
    params: np.ndarray  # (N,) strictly increasing, 0 to 1
    values: np.ndarray  # (N,) non-decreasing
    seed_point: np.ndarray  # (n,)

    def __post_init__(self):
        self.validate()

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def validate(self) -> None:
        n = len(self)
        if n < 2:
            raise DegenerateManifoldError("manifold needs at least 2 points")
        if self.params.shape != (n,) or self.values.shape != (n,):
            raise InvariantViolation("points, params, values must have equal length")
        if self.params[0] != 0.0 or self.params[-1] != 1.0:
            raise InvariantViolation("params must span [0, 1]")
        if np.any(np.diff(self.params) <= 0.0):
            raise InvariantViolation("params must be strictly increasing")
        if np.any(np.diff(self.values) < 0.0):
            raise InvariantViolation("values must be non-decreasing along ascent")
        if np.any(np.abs(self.points) > 1.0 + 1e-12):
            raise InvariantViolation("manifold points must stay inside [-1, 1]^n")
        if np.any(np.all(np.diff(self.points, axis=0) == 0.0, axis=1)):
            raise InvariantViolation("consecutive manifold points must differ")


def trace_path(
    field: GradientField,
    x0: np.ndarray,
    direction: str = "ascent",
    step: Optional[float] = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Steepest ascent/descent polyline starting at ``x0``.

    Iterates ``p <- clamp(p + sign * step * g_hat)`` with ``g_hat`` the unit
    gradient of the nearest grid sample. Stops when the nearest sample is
    zero-gradient-flagged, when the clamped step is materially shorter than
    ``step`` (boundary contact; the shortened point is discarded), when a
    point recurs within the last three steps, or after ``max_steps``.

    Returns the visited points including ``x0``, shape ``(k, n)``.
    """
    if direction not in ("ascent", "descent"):
        raise ValueError(f"direction must be 'ascent' or 'descent', got {direction!r}")
    sign = 1.0 if direction == "ascent" else -1.0
    if step is None:
        step = field.spacing
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    p = clamp_to_domain(np.asarray(x0, dtype=float))
    pts = [p]
    while True:
        i = field.snap_index(p)
        if field.zero_flags[i]:
            if len(pts) == 1:
                raise StalledAtStartError(
                    f"seed point {p} snaps to a zero-gradient sample"
                )
            break
        cand = np.clip(p + sign * step * field.unit_gradients[i], -1.0, 1.0)
        moved = float(np.sqrt(np.sum((cand - p) ** 2)))
        if moved < step * (1.0 - _FULL_STEP_RTOL):
            break  # boundary contact or a flat face: the trace ends here
        if any(np.array_equal(cand, q) for q in pts[-3:]):
            break  # oscillation across a ridge
        pts.append(cand)
        p = cand
        if len(pts) - 1 >= max_steps:
            break
    return np.array(pts)


def build_active_manifold(
    field: GradientField,
    x0: Optional[np.ndarray] = None,
    step: Optional[float] = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> ActiveManifold:
    """Trace down and up from ``x0`` (default: the domain center).

    The reversed descent path is concatenated with the ascent path (the
    seed appears once), so the result runs from a local-minimum end to a
    local-maximum end.
    """
    if x0 is None:
        x0 = np.zeros(field.dimension)
    x0 = np.asarray(x0, dtype=float)
    descent = trace_path(field, x0, "descent", step=step, max_steps=max_steps)
    ascent = trace_path(field, x0, "ascent", step=step, max_steps=max_steps)
    points = np.vstack([descent[::-1], ascent[1:]])
    if points.shape[0] < 2:
        raise DegenerateManifoldError(
            f"traces from {x0} produced fewer than 2 distinct points"
        )
    count = points.shape[0]
    params = np.arange(count, dtype=float) / (count - 1)
    values = field.values[field.snap_indices(points)]
    return ActiveManifold(
        points=np.ascontiguousarray(points),
        params=params,
        values=np.asarray(values, dtype=float),
        seed_point=x0,
    )


def manifold_to_pairs(manifold: ActiveManifold) -> np.ndarray:
    """The regression training set: ``(s, z)`` rows, shape ``(N, 2)``."""
    return np.column_stack([manifold.params, manifold.values])


# ---------------------------------------------------------------------------
# CSV interchange: header "dim=<n>", rows "s,z,x1,...,xn" with ascending s.
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_manifold_csv(manifold: ActiveManifold, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"dim={manifold.dimension}\n")
        for s, z, pt in zip(manifold.params, manifold.values, manifold.points):
            fh.write(",".join([_fmt(s), _fmt(z)] + [_fmt(v) for v in pt]) + "\n")


def read_manifold_csv(path) -> ActiveManifold:
    path = Path(path)
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise FormatError(f"{path}: bad header {header!r}")
        try:
            dim = int(header[4:])
        except ValueError as exc:
            raise FormatError(f"{path}: bad header {header!r}") from exc
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != dim + 2:
                raise FormatError(
                    f"{path}:{lineno}: expected {dim + 2} columns, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric cell") from exc
    if len(rows) < 2:
        raise FormatError(f"{path}: need at least 2 manifold rows")
    arr = np.asarray(rows, dtype=float)
    points = np.ascontiguousarray(arr[:, 2:])
    return ActiveManifold(
        points=points,
        params=arr[:, 0],
        values=arr[:, 1],
        seed_point=points[0],
    )
