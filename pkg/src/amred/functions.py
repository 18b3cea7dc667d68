"""Test-function registry: analytic builtins plus black-box wrappers.

Builtins (all defined on the hypercube [-1, 1]^n):

* ``f1(x, y) = exp(y - x^2)``
* ``f2(x, y) = x^3 + y^3 + 0.2 x + 0.6 y``
* ``f3(x) = sum_i c_i x_i^3 + d_i x_i`` in five dimensions; the fixed
  coefficient vectors ``CUBIC5_C`` and ``CUBIC5_D`` below are part of the
  published benchmark definition and must not change.

Value callables are vectorized over a leading batch axis: they accept
``(n,)`` or ``(N, n)`` arrays. Gradient callables follow the same rule; a
registered function without a gradient falls back to central finite
differences with step ``FD_STEP``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AmredError, EvaluationFailure

# Central-difference step for black-box gradients; second-order accurate and
# close to the optimal h ~ eps^(1/3) for doubles.
FD_STEP = 1e-5

CUBIC5_C = np.array([0.9, 0.6, 0.4, 0.7, 0.3])
CUBIC5_D = np.array([0.2, 0.5, 0.8, 0.3, 0.6])


@dataclass(frozen=True)
class TestFunction:
    """A scalar function of n variables with an optional analytic gradient."""

    name: str
    dimension: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def has_analytic_gradient(self) -> bool:
        return self.gradient is not None


def _f1_value(x):
    x = np.asarray(x, dtype=float)
    return np.exp(x[..., 1] - x[..., 0] ** 2)


def _f1_gradient(x):
    x = np.asarray(x, dtype=float)
    v = np.exp(x[..., 1] - x[..., 0] ** 2)
    return np.stack([-2.0 * x[..., 0] * v, v], axis=-1)


def _f2_value(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] ** 3 + x[..., 1] ** 3 + 0.2 * x[..., 0] + 0.6 * x[..., 1]


def _f2_gradient(x):
    x = np.asarray(x, dtype=float)
    return np.stack(
        [3.0 * x[..., 0] ** 2 + 0.2, 3.0 * x[..., 1] ** 2 + 0.6], axis=-1
    )


def _f3_value(x):
    x = np.asarray(x, dtype=float)
    return np.sum(CUBIC5_C * x**3 + CUBIC5_D * x, axis=-1)


def _f3_gradient(x):
    x = np.asarray(x, dtype=float)
    return 3.0 * CUBIC5_C * x**2 + CUBIC5_D * np.ones_like(x)


_REGISTRY: dict[str, TestFunction] = {}


def register_function(
    name: str,
    dimension: int,
    value: Callable[[np.ndarray], np.ndarray],
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    replace: bool = False,
) -> TestFunction:
    """Register a vectorized test function under ``name``.

    ``gradient=None`` selects the finite-difference fallback. Returns the
    registered :class:`TestFunction`.
    """
    if name in _REGISTRY and not replace:
        raise AmredError(f"function {name!r} is already registered")
    fn = TestFunction(name, int(dimension), value, gradient)
    _REGISTRY[name] = fn
    return fn


def register_scalar_function(
    name: str, dimension: int, f: Callable, replace: bool = False
) -> TestFunction:
    """Register a plain scalar callable ``f(point) -> float`` (black box)."""

    def vectorized(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.array([float(f(row)) for row in x])

    def value(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return vectorized(x)[0]
        return vectorized(x)

    return register_function(name, dimension, value, None, replace=replace)


def get_function(name: str) -> TestFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise AmredError(f"unknown function {name!r} (known: {known})") from None


def builtin_names() -> list[str]:
    return sorted(_REGISTRY)


register_function("f1", 2, _f1_value, _f1_gradient)
register_function("f2", 2, _f2_value, _f2_gradient)
register_function("f3", 5, _f3_value, _f3_gradient)


def finite_difference_gradient(
    value: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = FD_STEP
) -> np.ndarray:
    """Central-difference gradient of a vectorized value function.

    Works on a single point ``(n,)`` or a batch ``(N, n)``; the returned
    array has the same shape as ``x``.
    """
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    grad = np.empty_like(pts)
    for axis in range(pts.shape[1]):
        shift = np.zeros(pts.shape[1])
        shift[axis] = h
        grad[:, axis] = (value(pts + shift) - value(pts - shift)) / (2.0 * h)
    return grad.reshape(x.shape)


def evaluate_with_gradient(fn: TestFunction, x: np.ndarray):
    """Return ``(values, gradients)`` for one point or a batch.

    Analytic gradients are used when available, central differences
    otherwise. Non-finite output raises :class:`EvaluationFailure` naming
    the first offending point.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(fn.value(x), dtype=float)
    if fn.gradient is not None:
        grads = np.asarray(fn.gradient(x), dtype=float)
    else:
        grads = finite_difference_gradient(fn.value, x)
    bad = ~np.isfinite(np.atleast_1d(values))
    if not np.all(np.isfinite(grads)):
        bad |= ~np.isfinite(np.atleast_2d(grads)).all(axis=-1)
    if np.any(bad):
        where = np.atleast_2d(x)[np.argmax(bad)]
        raise EvaluationFailure(
            f"{fn.name} produced a non-finite value", point=where
        )
    return values, grads
