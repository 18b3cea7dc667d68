"""One-dimensional polynomial surrogates fit by least squares.

The fit solves the Vandermonde system through a QR (orthogonal-triangular)
factorization rather than normal equations; monomial conditioning caps the
degree at :data:`MAX_DEGREE`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FitError, FormatError

MAX_DEGREE = 12


@dataclass(frozen=True)
class PolynomialSurrogate:
    """Coefficients are ordered constant term first."""

    degree: int
    coefficients: np.ndarray  # (degree + 1,)
    fit_domain: tuple[float, float]
    residual_rms: float

    def __post_init__(self):
        if self.coefficients.shape != (self.degree + 1,):
            raise FitError("coefficient count must equal degree + 1")

    def extrapolates(self, s: float) -> bool:
        """True when ``s`` lies outside the training abscissa range."""
        lo, hi = self.fit_domain
        return bool(np.any(np.asarray(s) < lo) or np.any(np.asarray(s) > hi))


def fit_polynomial(pairs, degree: int) -> PolynomialSurrogate:
    """Least-squares polynomial through ``(s, z)`` pairs.

    Parameters
    ----------
    pairs : array-like, shape (N, 2)
        Training abscissae and ordinates.
    degree : int
        Polynomial degree, at most :data:`MAX_DEGREE`; needs at least
        ``degree + 1`` pairs.
    """
    if degree < 0:
        raise FitError(f"degree must be non-negative, got {degree}")
    if degree > MAX_DEGREE:
        raise FitError(f"degree too large: {degree} > {MAX_DEGREE}")
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FitError("pairs must be an (N, 2) array of (s, z)")
    s, z = arr[:, 0], arr[:, 1]
    if s.shape[0] < degree + 1:
        raise FitError(f"need at least {degree + 1} pairs for degree {degree}")
    if degree >= 1 and np.ptp(s) == 0.0:
        raise FitError("degenerate abscissae: all s values are equal")
    vander = np.vander(s, degree + 1, increasing=True)
    q, r = np.linalg.qr(vander)
    coeffs = np.linalg.solve(r, q.T @ z)
    residual_rms = float(np.sqrt(np.mean((vander @ coeffs - z) ** 2)))
    return PolynomialSurrogate(
        degree=degree,
        coefficients=coeffs,
        fit_domain=(float(s.min()), float(s.max())),
        residual_rms=residual_rms,
    )


def evaluate(model: PolynomialSurrogate, s):
    """Horner evaluation at ``s`` (scalar or array).

    Extrapolation outside ``fit_domain`` is permitted; callers that care
    should check :meth:`PolynomialSurrogate.extrapolates`.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    for c in model.coefficients[::-1]:
        out = out * s + c
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# JSON-lines interchange: one record carrying the full model.
# ---------------------------------------------------------------------------


def write_surrogate_jsonl(model: PolynomialSurrogate, path) -> None:
    record = {
        "degree": model.degree,
        "coefficients": [float(c) for c in model.coefficients],
        "fit_domain": [model.fit_domain[0], model.fit_domain[1]],
        "residual_rms": model.residual_rms,
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(json.dumps(record) + "\n")


def read_surrogate_jsonl(path) -> PolynomialSurrogate:
    path = Path(path)
    with open(path, "r", encoding="ascii") as fh:
        line = fh.readline().strip()
    try:
        record = json.loads(line)
        return PolynomialSurrogate(
            degree=int(record["degree"]),
            coefficients=np.asarray(record["coefficients"], dtype=float),
            fit_domain=(float(record["fit_domain"][0]), float(record["fit_domain"][1])),
            residual_rms=float(record["residual_rms"]),
        )
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
        raise FormatError(f"{path}: not a surrogate record") from exc
