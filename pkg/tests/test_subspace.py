import numpy as np
import pytest

from amred.errors import AmredError
from amred.functions import get_function
from amred.geometry import build_gradient_field
from amred.subspace import (
    as_estimate,
    as_model_from_field,
    build_as_model,
    compute_c_matrix,
    symmetric_eigen,
    write_as_model_jsonl,
)


# ------------------------------------------------------------------ C matrix


def test_c_matrix_single_gradient():
    c = compute_c_matrix(np.array([[3.0, 4.0]]))
    np.testing.assert_array_equal(c, [[9.0, 12.0], [12.0, 16.0]])
    assert np.trace(c) == 25.0


def test_c_matrix_two_unit_gradients():
    c = compute_c_matrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_array_equal(c, [[0.5, 0.0], [0.0, 0.5]])


def test_c_matrix_zero_gradients():
    c = compute_c_matrix(np.zeros((5, 3)))
    np.testing.assert_array_equal(c, np.zeros((3, 3)))


def test_c_matrix_exact_symmetry():
    rng = np.random.Generator(np.random.Philox(2))
    c = compute_c_matrix(rng.normal(size=(500, 6)))
    assert np.array_equal(c, c.T)


def test_c_matrix_rejects_bad_input():
    with pytest.raises(AmredError):
        compute_c_matrix(np.zeros((0, 2)))
    with pytest.raises(AmredError):
        compute_c_matrix(np.zeros(3))


# ----------------------------------------------------------------- eigensolver


def test_eigen_identity():
    lam, w = symmetric_eigen(np.eye(4))
    np.testing.assert_array_equal(lam, np.ones(4))
    np.testing.assert_array_equal(w, np.eye(4))


def test_eigen_rank_one():
    lam, w = symmetric_eigen(np.array([[9.0, 12.0], [12.0, 16.0]]))
    np.testing.assert_allclose(lam, [25.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(w[:, 0], [0.6, 0.8], atol=1e-12)


def test_eigen_diagonal_is_sorted_permutation():
    lam, w = symmetric_eigen(np.diag([5.0, 2.0, 7.0]))
    np.testing.assert_array_equal(lam, [7.0, 5.0, 2.0])
    np.testing.assert_array_equal(w, np.eye(3)[:, [2, 0, 1]])


def test_eigen_rejects_asymmetric():
    with pytest.raises(AmredError, match="not symmetric"):
        symmetric_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_eigen_random_psd_reconstruction():
    # 50 seeded PSD matrices with n <= 8: reconstruction to 1e-8,
    # orthonormality to 1e-9, eigenvalues nonnegative.
    rng = np.random.Generator(np.random.Philox(31))
    for trial in range(50):
        n = int(rng.integers(2, 9))
        b = rng.normal(size=(n, n))
        a = b.T @ b / n
        a = 0.5 * (a + a.T)
        lam, w = symmetric_eigen(a)
        assert np.max(np.abs(w @ np.diag(lam) @ w.T - a)) <= 1e-8
        assert np.max(np.abs(w.T @ w - np.eye(n))) <= 1e-9
        assert np.all(np.diff(lam) <= 0)
        assert lam[-1] >= -1e-10


def test_eigen_sign_convention():
    rng = np.random.Generator(np.random.Philox(8))
    b = rng.normal(size=(5, 5))
    lam, w = symmetric_eigen(b.T @ b)
    for j in range(5):
        col = w[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        assert col[nz[0]] > 0


def test_eigen_scaling_invariance():
    # Doubling f scales gradients by 2 and C by 4; the eigenvectors keep
    # their span (and, with the sign convention, their representation).
    rng = np.random.Generator(np.random.Philox(12))
    g = rng.normal(size=(200, 4))
    lam1, w1 = symmetric_eigen(compute_c_matrix(g))
    lam2, w2 = symmetric_eigen(compute_c_matrix(2.0 * g))
    np.testing.assert_allclose(lam2, 4.0 * lam1, rtol=1e-12)
    np.testing.assert_allclose(w2, w1, atol=1e-9)


# ------------------------------------------------------------------- models


def test_linear_model_recovers_direction_and_slope():
    field = build_gradient_field("lin34", spacing=0.1)
    model = as_model_from_field(field, degree=1)
    np.testing.assert_allclose(model.active_direction, [0.6, 0.8], atol=1e-12)
    np.testing.assert_allclose(model.eigenvalues, [25.0, 0.0], atol=1e-10)
    # f = 5 * <x, w1>: slope 5, intercept 0, essentially no residual
    np.testing.assert_allclose(model.surrogate.coefficients, [0.0, 5.0], atol=1e-9)
    assert model.surrogate.residual_rms <= 1e-8


def test_as_estimate_linear_cases():
    field = build_gradient_field("lin34", spacing=0.1)
    model = as_model_from_field(field, degree=1)
    assert as_estimate(model, np.array([1.0, 0.0])) == pytest.approx(3.0, abs=1e-6)
    assert as_estimate(model, np.zeros(2)) == pytest.approx(
        model.surrogate.coefficients[0], abs=1e-12
    )
    from amred.surrogate import evaluate

    w1 = model.active_direction
    assert as_estimate(model, w1) == pytest.approx(float(evaluate(model.surrogate, 1.0)))


def test_f2_field_model_dominant_direction(f2_field):
    model = as_model_from_field(f2_field, degree=5)
    assert model.eigenvalues[0] > model.eigenvalues[1]
    assert model.active_direction[0] > 0 and model.active_direction[1] > 0
    # the y-coefficient dominates, so w1 leans toward +y
    assert model.active_direction[1] > model.active_direction[0]


def test_symmetric_bowl_has_no_dominant_direction():
    # f(x, y) = x^2 + y^2 on a symmetric grid: the two eigenvalues match,
    # which is exactly the situation a linear subspace cannot resolve.
    def bowl(x):
        x = np.asarray(x, dtype=float)
        return x[..., 0] ** 2 + x[..., 1] ** 2

    def bowl_grad(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x

    from amred.functions import TestFunction

    field = build_gradient_field(TestFunction("bowl", 2, bowl, bowl_grad), spacing=0.1)
    c = compute_c_matrix(field.raw_gradients)
    lam, _ = symmetric_eigen(c)
    assert abs(lam[0] - lam[1]) <= 1e-12 * max(1.0, lam[0])


def test_build_as_model_needs_enough_samples():
    from amred.errors import FitError

    with pytest.raises(FitError):
        build_as_model(np.zeros((2, 2)), np.ones((2, 2)), np.zeros(2), degree=3)


def test_as_model_jsonl_export(tmp_path, f2_field):
    import json

    model = as_model_from_field(f2_field, degree=5)
    path = tmp_path / "as_model.jsonl"
    write_as_model_jsonl(model, path)
    record = json.loads(path.read_text().strip())
    np.testing.assert_allclose(record["eigenvalues"], model.eigenvalues)
    np.testing.assert_allclose(record["eigenvectors"], model.eigenvectors)
    assert record["surrogate"]["degree"] == 5
