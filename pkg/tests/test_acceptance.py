"""Acceptance gate: the checks that define "done" for this package.

Each criterion prints one ``ACCEPTANCE n (...): PASS/FAIL`` line (run
pytest with ``-s`` to see them) and then asserts. The module is also
runnable directly: ``python tests/test_acceptance.py``.
"""

import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _testfns import ensure_registered

ensure_registered()

from amred.errors import TraversalFailed
from amred.functions import FD_STEP, finite_difference_gradient, get_function
from amred.geometry import build_gradient_field
from amred.harness import ExperimentSpec, monte_carlo, run_experiment
from amred.manifold import build_active_manifold, manifold_to_pairs
from amred.projection import (
    TraversalConfig,
    segment_parameter,
    traverse_to_manifold,
)
from amred.subspace import as_model_from_field, symmetric_eigen
from amred.surrogate import fit_polynomial
from amred.errors import TangentSegmentError

# Reference mean absolute errors for the 2-D comparisons; the experiment
# must land within [0.5x, 2x] of these (seeds and traversal defaults are
# implementation choices, hence the band).
F1_AM_REF, F1_AS_REF = 2.601e-2, 1.486e-1
F2_AM_REF, F2_AS_REF = 7.428e-2, 2.051e-1

# Fixed query seed for the banded comparisons.
BAND_SEED = 2024


def _report(num: int, label: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {num} ({label}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


def _in_band(value: float, ref: float) -> bool:
    return 0.5 * ref <= value <= 2.0 * ref


def test_criterion_1_f1_comparison():
    start = time.perf_counter()
    spec = ExperimentSpec(
        function_id="f1",
        spacing=0.05,
        surrogate_degree=4,
        n_queries=100,
        rng_seed=BAND_SEED,
    )
    report = run_experiment(spec)
    elapsed = time.perf_counter() - start
    am = report.summaries["am"].mean_abs_error
    as_ = report.summaries["as"].mean_abs_error
    ok = (
        _in_band(am, F1_AM_REF)
        and _in_band(as_, F1_AS_REF)
        and 3.0 * am <= as_
        and elapsed < 10.0
    )
    _report(
        1,
        "f1 error comparison",
        ok,
        f"am={am:.4e} as={as_:.4e} t={elapsed:.2f}s",
    )


def test_criterion_2_f2_comparison():
    start = time.perf_counter()
    spec = ExperimentSpec(
        function_id="f2",
        spacing=0.05,
        surrogate_degree=5,
        n_queries=100,
        rng_seed=BAND_SEED,
    )
    report = run_experiment(spec)
    elapsed = time.perf_counter() - start
    am = report.summaries["am"].mean_abs_error
    as_ = report.summaries["as"].mean_abs_error
    ok = (
        _in_band(am, F2_AM_REF)
        and _in_band(as_, F2_AS_REF)
        and 2.0 * am <= as_
        and elapsed < 10.0
    )
    _report(
        2,
        "f2 error comparison",
        ok,
        f"am={am:.4e} as={as_:.4e} t={elapsed:.2f}s",
    )


def test_criterion_3_synthetic_5d_benchmark():
    # The original 5-D comparison depends on an external model and dataset
    # that are not available, so the fixed-coefficient synthetic cubic
    # stands in: the manifold must beat the subspace in every fold.
    start = time.perf_counter()
    spec = ExperimentSpec(
        function_id="f3",
        spacing=0.2,
        surrogate_degree=5,
        n_queries=250,
        rng_seed=42,
    )
    reports, fold_means = monte_carlo(spec, folds=8)
    elapsed = time.perf_counter() - start
    per_fold_ok = [
        rep.summaries["am"].mean_abs_error < rep.summaries["as"].mean_abs_error
        for rep in reports
    ]
    ok = all(per_fold_ok) and elapsed < 120.0
    _report(
        3,
        "synthetic 5-D benchmark",
        ok,
        f"am={fold_means['am']:.4e} as={fold_means['as']:.4e} "
        f"folds_ok={sum(per_fold_ok)}/8 t={elapsed:.2f}s",
    )


def test_criterion_4_property_suite():
    failures = []

    # Gradient check: central differences vs analytic, 1e-7 absolute.
    for name in ("f1", "f2", "f3"):
        fn = get_function(name)
        rng = np.random.Generator(np.random.Philox(1234))
        pts = rng.uniform(-1.0, 1.0, (100, fn.dimension))
        err = np.max(np.abs(finite_difference_gradient(fn.value, pts, h=FD_STEP) - fn.gradient(pts)))
        if err > 1e-7:
            failures.append(f"fd:{name}:{err:.2e}")

    # Manifold structure for every builtin at its benchmark settings.
    for name, spacing in (("f1", 0.05), ("f2", 0.05), ("f3", 0.2)):
        field = build_gradient_field(name, spacing=spacing)
        man = build_active_manifold(field)
        if not (
            man.params[0] == 0.0
            and man.params[-1] == 1.0
            and np.all(np.diff(man.params) > 0)
            and np.all(np.diff(man.values) >= 0)
            and np.max(np.abs(man.points)) <= 1.0 + 1e-12
        ):
            failures.append(f"manifold:{name}")

    # Traversal orthogonality on every step of 100 seeded traversals.
    field = build_gradient_field("f2", spacing=0.05)
    man = build_active_manifold(field)
    rng = np.random.Generator(np.random.Philox(7))
    worst = 0.0
    for q in rng.uniform(-1.0, 1.0, (100, 2)):
        try:
            _, trace = traverse_to_manifold(field, man, q, record=True)
        except TraversalFailed:
            continue
        k = trace.step_directions.shape[0]
        if k:
            worst = max(
                worst,
                float(np.max(np.abs(np.sum(trace.step_directions * trace.unit_gradients[:k], axis=1)))),
            )
    if worst > 1e-8:
        failures.append(f"orthogonality:{worst:.2e}")

    # Hyperplane residual of the segment solve, 1e-10.
    rng = np.random.Generator(np.random.Philox(17))
    checked = 0
    while checked < 100:
        m_i = rng.uniform(-1, 1, 3)
        m_next = rng.uniform(-1, 1, 3)
        e0 = rng.normal(size=3)
        e0 /= np.sqrt(e0 @ e0)
        p = m_i + rng.uniform(0, 1) * (m_next - m_i) + 0.05 * rng.normal(size=3)
        try:
            t, clamped = segment_parameter(m_i, m_next, p, e0)
        except TangentSegmentError:
            continue
        if clamped:
            continue
        if abs((m_i + t * (m_next - m_i) - p) @ e0) > 1e-10:
            failures.append("hyperplane")
            break
        checked += 1

    # Jacobi eigensolver on 50 seeded PSD matrices, n <= 8.
    rng = np.random.Generator(np.random.Philox(31))
    for _ in range(50):
        n = int(rng.integers(2, 9))
        b = rng.normal(size=(n, n))
        a = b.T @ b / n
        a = 0.5 * (a + a.T)
        lam, w = symmetric_eigen(a)
        if np.max(np.abs(w @ np.diag(lam) @ w.T - a)) > 1e-8:
            failures.append("eigen:reconstruction")
            break
        if np.max(np.abs(w.T @ w - np.eye(n))) > 1e-9:
            failures.append("eigen:orthonormality")
            break

    # Polynomial exact recovery through degree 6 at 1e-10.
    rng = np.random.Generator(np.random.Philox(61))
    for degree in range(7):
        coeffs = rng.uniform(-2.0, 2.0, degree + 1)
        s = np.linspace(0.0, 1.0, max(2 * degree, 2))
        z = np.polynomial.polynomial.polyval(s, coeffs)
        model = fit_polynomial(np.column_stack([s, z]), degree)
        if np.max(np.abs(model.coefficients - coeffs)) > 1e-10:
            failures.append(f"polyfit:deg{degree}")

    _report(4, "property suite", not failures, ",".join(failures) or "all properties hold")


def test_criterion_5_linear_oracle_equivalence():
    # Protocol: 0.01 grid so the 0.05-step trace lands on lattice points
    # (no value-snapping noise), hit tolerance equal to the vertex spacing,
    # and a query seed whose 100 draws all stay inside the value range the
    # manifold spans (the level-line projection exists only there).
    fn = get_function("lin34")
    spacing, trace_step = 0.01, 0.05
    cfg = TraversalConfig(eps_hit=0.05, delta=spacing / 4.0, max_iters=4020, drift_tolerance=1.25)
    spec = ExperimentSpec(
        function_id="lin34",
        spacing=spacing,
        surrogate_degree=1,
        n_queries=100,
        rng_seed=4,
        trace_step=trace_step,
        traversal=cfg,
    )
    field = build_gradient_field("lin34", spacing=spacing)
    man = build_active_manifold(field, step=trace_step)

    # Guard: the chosen seed must keep every query strictly in range.
    from amred.harness import query_rng

    queries = query_rng(4, 0).uniform(-1.0, 1.0, (100, 2))
    truths = fn.value(queries)
    assert np.max(np.abs(truths)) < 6.25, "query seed leaves the oracle domain"

    as_model = as_model_from_field(field, degree=1)
    w1 = as_model.active_direction
    dir_err = min(
        float(np.max(np.abs(w1 - np.array([0.6, 0.8])))),
        float(np.max(np.abs(w1 + np.array([0.6, 0.8])))),
    )

    landing_err = 0.0
    n_clamped = 0
    for q, truth in zip(queries, truths):
        res = traverse_to_manifold(field, man, q, config=cfg)
        n_clamped += res.clamped
        analytic = (float(truth) / 5.0) * np.array([0.6, 0.8])
        landing_err = max(landing_err, float(np.sqrt(np.sum((res.landing_point - analytic) ** 2))))

    report = run_experiment(spec)
    am = report.summaries["am"].mean_abs_error
    as_ = report.summaries["as"].mean_abs_error
    ok = (
        dir_err <= 1e-8
        and landing_err <= 2.0 * cfg.delta
        and n_clamped == 0
        and report.summaries["am"].failures == 0
        and am <= 1e-3
        and as_ <= 1e-3
    )
    _report(
        5,
        "linear-function oracle equivalence",
        ok,
        f"dir_err={dir_err:.2e} landing={landing_err:.2e} am={am:.2e} as={as_:.2e}",
    )


def test_criterion_6_cli_determinism(tmp_path):
    out1, out2 = tmp_path / "report1.csv", tmp_path / "report2.csv"
    base = [
        sys.executable,
        "-m",
        "amred.cli",
        "compare",
        "--fn",
        "f1",
        "--spacing",
        "0.05",
        "--degree",
        "4",
        "--queries",
        "100",
        "--seed",
        "42",
        "--folds",
        "8",
    ]
    r1 = subprocess.run(base + ["--out", str(out1)], capture_output=True, text=True)
    r2 = subprocess.run(base + ["--out", str(out2)], capture_output=True, text=True)
    ok = (
        r1.returncode == 0
        and r2.returncode == 0
        and out1.read_bytes() == out2.read_bytes()
        and r1.stdout == r2.stdout
    )
    _report(6, "seeded CLI reruns are byte-identical", ok, f"{out1.stat().st_size} bytes")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    rc = 0
    for fn in (
        test_criterion_1_f1_comparison,
        test_criterion_2_f2_comparison,
        test_criterion_3_synthetic_5d_benchmark,
        test_criterion_4_property_suite,
        test_criterion_5_linear_oracle_equivalence,
        lambda: test_criterion_6_cli_determinism(Path(tempfile.mkdtemp())),
    ):
        try:
            fn()
        except AssertionError:
            rc = 1
    sys.exit(rc)
