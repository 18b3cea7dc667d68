"""Regular-lattice gradient fields on the hypercube [-1, 1]^n.

A field samples a scalar function and its gradient on a uniform grid with
pitch ``spacing``; gradients are stored raw and unit-normalized (zero
gradients are flagged instead of divided). Lattice coordinates along each
axis are ``-1 + i * spacing`` for ``i = 0 .. points_per_axis - 1`` and the
flat sample order is row-major (last axis fastest).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .errors import FormatError, GridError
from .functions import TestFunction, evaluate_with_gradient, get_function

#: Refuse to materialize grids with more points than this by default.
GRID_POINT_CAP = 2_000_000

#: Absolute slack when deciding how many lattice steps fit into the domain
#: width 2 (absorbs representation error of spacings like 0.05).
_DIV_TOL = 1e-9

FunctionLike = Union[str, TestFunction, Callable[[np.ndarray], float]]


def points_per_axis(spacing: float) -> int:
    """Number of lattice points per axis for a given pitch.

    The pitch must be positive, at most 2, and divide the domain width 2
    evenly (within 1e-9); otherwise the corners of the hypercube would not
    be lattice points.
    """
    if not np.isfinite(spacing) or spacing <= 0.0:
        raise GridError(f"spacing must be positive, got {spacing!r}")
    if spacing > 2.0:
        raise GridError(f"spacing must be at most 2, got {spacing!r}")
    steps = int(np.floor(2.0 / spacing + _DIV_TOL))
    if abs(steps * spacing - 2.0) > _DIV_TOL:
        raise GridError(
            f"spacing {spacing!r} does not evenly divide the domain width 2"
        )
    return steps + 1


def build_grid(
    dimension: int, spacing: float, max_points: int = GRID_POINT_CAP
) -> np.ndarray:
    """All lattice points of the grid, shape ``(count, dimension)``.

    Points are emitted in row-major order of the integer lattice index
    (last axis varies fastest), so the first point is ``(-1, ..., -1)`` and
    the last is ``(1, ..., 1)``.
    """
    if dimension < 1:
        raise GridError(f"dimension must be >= 1, got {dimension}")
    m = points_per_axis(spacing)
    count = m**dimension
    if count > max_points:
        raise GridError(
            f"grid too large: {m}^{dimension} = {count} points exceeds cap {max_points}"
        )
    idx = np.indices((m,) * dimension).reshape(dimension, -1).T
    return -1.0 + idx.astype(float) * spacing


def clamp_to_domain(p: np.ndarray) -> np.ndarray:
    """Clamp a point (or batch of points) into [-1, 1]^n."""
    return np.clip(np.asarray(p, dtype=float), -1.0, 1.0)


@dataclass
class GradientSample:
    """One grid sample: location, value, raw and unit-normalized gradient."""

    index: int
    location: np.ndarray
    value: float
    raw_gradient: np.ndarray
    gradient: np.ndarray  # unit-normalized; zero vector when is_zero
    normalized: bool
    is_zero: bool


@dataclass(eq=False)
class GradientField:
    """Dense gradient samples on the lattice; immutable after construction."""

    dimension: int
    spacing: float
    points_per_axis: int
    locations: np.ndarray  # (N, n)
    values: np.ndarray  # (N,)
    raw_gradients: np.ndarray  # (N, n)
    unit_gradients: np.ndarray  # (N, n), zero rows where zero_flags
    zero_flags: np.ndarray  # (N,) bool
    strides: np.ndarray = field(init=False)  # row-major index strides

    def __post_init__(self):
        m, n = self.points_per_axis, self.dimension
        self.strides = m ** (n - 1 - np.arange(n, dtype=np.int64))
        if self.locations.shape != (m**n, n):
            raise GridError("sample count does not match (points_per_axis)^dimension")

    @property
    def n_points(self) -> int:
        return self.locations.shape[0]

    def snap_indices(self, points: np.ndarray) -> np.ndarray:
        """Flat indices of the nearest lattice points, vectorized.

        Points are clamped into the domain first. Per-axis rounding uses
        ``ceil(r - 0.5)`` so exact midpoints resolve to the smaller lattice
        index.
        """
        p = clamp_to_domain(np.atleast_2d(points))
        i = np.ceil((p + 1.0) / self.spacing - 0.5).astype(np.int64)
        np.clip(i, 0, self.points_per_axis - 1, out=i)
        return i @ self.strides

    def snap_index(self, point: np.ndarray) -> int:
        return int(self.snap_indices(point)[0])

    def sample(self, index: int) -> GradientSample:
        return GradientSample(
            index=index,
            location=self.locations[index],
            value=float(self.values[index]),
            raw_gradient=self.raw_gradients[index],
            gradient=self.unit_gradients[index],
            normalized=True,
            is_zero=bool(self.zero_flags[index]),
        )


def eval_gradient(function: FunctionLike, point: np.ndarray):
    """Value and gradient of a builtin or user evaluator at one point.

    Builtin ids and :class:`TestFunction` objects use their analytic
    gradient when present; plain callables get central finite differences.
    Returns ``(value, gradient)``.
    """
    p = np.asarray(point, dtype=float)
    fn = _resolve(function, dimension=p.shape[-1])
    value, grad = evaluate_with_gradient(fn, p)
    return float(value), grad


def build_gradient_field(
    function: FunctionLike,
    dimension: Optional[int] = None,
    spacing: float = 0.05,
    max_points: int = GRID_POINT_CAP,
) -> GradientField:
    """Sample ``function`` and its gradient on the full lattice.

    A pure map over the grid: deterministic and bit-reproducible for
    builtins. Zero-gradient samples are flagged rather than normalized.
    """
    fn = _resolve(function, dimension)
    dim = fn.dimension if dimension is None else int(dimension)
    if dim != fn.dimension:
        raise GridError(
            f"{fn.name} is {fn.dimension}-dimensional, requested dimension {dim}"
        )
    locations = build_grid(dim, spacing, max_points=max_points)
    values, raw = evaluate_with_gradient(fn, locations)
    return field_from_samples(dim, spacing, locations, values, raw)


def field_from_samples(
    dimension: int,
    spacing: float,
    locations: np.ndarray,
    values: np.ndarray,
    raw_gradients: np.ndarray,
) -> GradientField:
    """Assemble a field from raw sample arrays (normalizes gradients)."""
    norms = np.sqrt(np.sum(raw_gradients**2, axis=1))
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    unit = raw_gradients / safe[:, None]
    unit[zero] = 0.0
    return GradientField(
        dimension=dimension,
        spacing=spacing,
        points_per_axis=points_per_axis(spacing),
        locations=np.ascontiguousarray(locations, dtype=float),
        values=np.asarray(values, dtype=float),
        raw_gradients=np.ascontiguousarray(raw_gradients, dtype=float),
        unit_gradients=np.ascontiguousarray(unit, dtype=float),
        zero_flags=zero,
    )


def nearest_grid_point(field: GradientField, p: np.ndarray) -> GradientSample:
    """Nearest lattice sample to ``p`` (clamped), via per-axis rounding."""
    return field.sample(field.snap_index(p))


def _resolve(function: FunctionLike, dimension: Optional[int] = None) -> TestFunction:
    if isinstance(function, TestFunction):
        return function
    if isinstance(function, str):
        return get_function(function)
    if callable(function):
        if dimension is None:
            raise GridError("dimension is required for a bare callable")

        def value(x):
            x = np.asarray(x, dtype=float)
            if x.ndim == 1:
                return np.float64(function(x))
            return np.array([float(function(row)) for row in x])

        return TestFunction("<callable>", int(dimension), value, None)
    raise GridError(f"cannot interpret {function!r} as a function")


# ---------------------------------------------------------------------------
# CSV interchange
#
# Header line:  dim=<n>,spacing=<eps>
# Data rows:    x1,...,xn,g1,...,gn,f   (raw gradient, 17 significant digits)
# Rows appear in row-major lattice order.
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_field_csv(field: GradientField, path) -> None:
    """Export a field in the documented CSV format (raw gradients)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"dim={field.dimension},spacing={_fmt(field.spacing)}\n")
        for i in range(field.n_points):
            row = (
                [_fmt(v) for v in field.locations[i]]
                + [_fmt(v) for v in field.raw_gradients[i]]
                + [_fmt(field.values[i])]
            )
            fh.write(",".join(row) + "\n")


def read_field_csv(path) -> GradientField:
    """Ingest a field CSV, validating lattice structure and row order."""
    path = Path(path)
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        parts = header.split(",")
        if len(parts) != 2 or not parts[0].startswith("dim=") or not parts[1].startswith("spacing="):
            raise FormatError(f"{path}: bad header {header!r}")
        try:
            dim = int(parts[0][4:])
            spacing = float(parts[1][8:])
        except ValueError as exc:
            raise FormatError(f"{path}: bad header {header!r}") from exc
        try:
            m = points_per_axis(spacing)
        except GridError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        expected = m**dim
        data = []
        width = 2 * dim + 1
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != width:
                raise FormatError(
                    f"{path}:{lineno}: expected {width} columns, got {len(cells)}"
                )
            try:
                data.append([float(c) for c in cells])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric cell") from exc
    if len(data) != expected:
        raise FormatError(
            f"{path}: expected {expected} rows for dim={dim}, spacing={spacing}, got {len(data)}"
        )
    arr = np.asarray(data, dtype=float)
    locations = arr[:, :dim]
    raw = arr[:, dim : 2 * dim]
    values = arr[:, 2 * dim]
    lattice = build_grid(dim, spacing, max_points=max(expected, GRID_POINT_CAP))
    if not np.all(np.abs(locations - lattice) <= 1e-12):
        bad = int(np.argmax(np.any(np.abs(locations - lattice) > 1e-12, axis=1)))
        raise FormatError(
            f"{path}: row {bad + 2} is not on the lattice (or rows are out of order)"
        )
    return field_from_samples(dim, spacing, lattice, values, raw)
