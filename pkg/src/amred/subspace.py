"""Active-subspace baseline: averaged gradient outer products.

``C = (1/N) sum_i g_i g_i^T`` is assembled from raw (unnormalized)
gradients and diagonalized with a cyclic Jacobi sweep; the dominant
eigenvector defines the 1-D projection along which a polynomial surrogate
is fit. The Jacobi solver is deliberate: for the small matrices involved
(n of order 10) it is bitwise deterministic across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import AmredError, InvariantViolation
from .geometry import GradientField
from .surrogate import PolynomialSurrogate, evaluate, fit_polynomial

_JACOBI_MAX_SWEEPS = 50
_JACOBI_REL_TOL = 1e-12


def compute_c_matrix(gradients: np.ndarray) -> np.ndarray:
    """Average outer product of gradient samples, exactly symmetric.

    The upper triangle is computed and mirrored so round-off cannot break
    symmetry.
    """
    g = np.asarray(gradients, dtype=float)
    if g.ndim != 2:
        raise AmredError("gradients must be an (N, n) array")
    if g.shape[0] < 1:
        raise AmredError("need at least one gradient sample")
    c = g.T @ g / g.shape[0]
    upper = np.triu(c)
    return upper + np.triu(c, 1).T


def symmetric_eigen(a: np.ndarray, max_sweeps: int = _JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm falls below
    ``1e-12 * ||A||_F`` or ``max_sweeps`` is reached. Returns
    ``(eigenvalues, eigenvectors)`` with eigenvalues sorted descending,
    eigenvectors as orthonormal columns, and each column's first component
    of magnitude above 1e-12 made positive.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise AmredError(f"matrix must be square, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise AmredError("matrix is not symmetric")
    work = 0.5 * (a + a.T)
    vecs = np.eye(n)
    norm_a = float(np.sqrt(np.sum(work * work)))
    tol = _JACOBI_REL_TOL * norm_a
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.tril(work, -1) ** 2) * 2.0))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                # Stable rotation angle (Rutishauser).
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                work = rot.T @ work @ rot
                work[p, q] = 0.0
                work[q, p] = 0.0
                vecs = vecs @ rot
    eigenvalues = np.diag(work).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vecs = vecs[:, order]
    for j in range(n):
        col = vecs[:, j]
        nonzero = np.nonzero(np.abs(col) > 1e-12)[0]
        if nonzero.size and col[nonzero[0]] < 0.0:
            vecs[:, j] = -col
    return eigenvalues, vecs


@dataclass(eq=False)
class ActiveSubspaceModel:
    """C matrix, eigenpairs, dominant direction, and the 1-D surrogate."""

    c_matrix: np.ndarray
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns
    active_direction: np.ndarray  # first column of eigenvectors
    surrogate: PolynomialSurrogate

    def __post_init__(self):
        n = self.c_matrix.shape[0]
        ident = self.eigenvectors.T @ self.eigenvectors - np.eye(n)
        if np.max(np.abs(ident)) > 1e-9:
            raise InvariantViolation("eigenvector columns are not orthonormal")
        recon = self.eigenvectors @ np.diag(self.eigenvalues) @ self.eigenvectors.T
        if np.max(np.abs(recon - self.c_matrix)) > 1e-8:
            raise InvariantViolation("eigendecomposition does not reconstruct C")
        if np.any(np.diff(self.eigenvalues) > 0.0):
            raise InvariantViolation("eigenvalues must be sorted descending")
        if self.eigenvalues[-1] < -1e-10:
            raise InvariantViolation("C must be positive semidefinite")


def build_as_model(
    locations: np.ndarray,
    gradients: np.ndarray,
    values: np.ndarray,
    degree: int,
) -> ActiveSubspaceModel:
    """Fit the baseline from sample locations, raw gradients, and values."""
    locations = np.asarray(locations, dtype=float)
    values = np.asarray(values, dtype=float)
    c = compute_c_matrix(gradients)
    eigenvalues, eigenvectors = symmetric_eigen(c)
    w1 = eigenvectors[:, 0].copy()
    projections = locations @ w1
    surrogate = fit_polynomial(np.column_stack([projections, values]), degree)
    return ActiveSubspaceModel(
        c_matrix=c,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        active_direction=w1,
        surrogate=surrogate,
    )


def as_model_from_field(field: GradientField, degree: int) -> ActiveSubspaceModel:
    """Baseline over every grid sample of a field (raw gradients)."""
    return build_as_model(field.locations, field.raw_gradients, field.values, degree)


def as_estimate(model: ActiveSubspaceModel, p: np.ndarray) -> float:
    """Surrogate value at the query's projection onto the active direction."""
    t = float(np.asarray(p, dtype=float) @ model.active_direction)
    return float(evaluate(model.surrogate, t))


def write_as_model_jsonl(model: ActiveSubspaceModel, path) -> None:
    """Single-record JSON-lines export of the model."""
    record = {
        "eigenvalues": [float(v) for v in model.eigenvalues],
        "eigenvectors": [[float(v) for v in row] for row in model.eigenvectors],
        "surrogate": {
            "degree": model.surrogate.degree,
            "coefficients": [float(c) for c in model.surrogate.coefficients],
            "fit_domain": list(model.surrogate.fit_domain),
            "residual_rms": model.surrogate.residual_rms,
        },
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(json.dumps(record) + "\n")
