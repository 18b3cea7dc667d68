"""Deterministic experiment runner: build, project, and score both methods.

One experiment builds the gradient field, the active manifold and its
surrogate, and the active-subspace baseline, then draws seeded uniform
queries on [-1, 1]^n and reports the mean absolute error of each method.
Queries for fold ``k`` come from a Philox counter-based generator seeded
with ``SeedSequence(rng_seed, spawn_key=(k,))``, so every fold (and every
rerun) is reproducible; ``run_experiment`` is exactly fold 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .errors import AmredError, TraversalFailed
from .functions import TestFunction, get_function
from .geometry import (
    GradientField,
    build_gradient_field,
    read_field_csv,
)
from .manifold import ActiveManifold, build_active_manifold, manifold_to_pairs
from .projection import (
    ProjectionResult,
    TraversalConfig,
    estimate_at,
    traverse_to_manifold,
)
from .subspace import ActiveSubspaceModel, as_estimate, as_model_from_field
from .surrogate import PolynomialSurrogate, fit_polynomial

METHOD_AM = "am"
METHOD_AS = "as"

#: Query generator family, recorded in every report header.
RNG_NAME = "philox"


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one comparison experiment."""

    function_id: Optional[str]
    spacing: float
    surrogate_degree: int
    n_queries: int
    rng_seed: int
    dimension: Optional[int] = None
    methods: tuple[str, ...] = (METHOD_AM, METHOD_AS)
    seed_point: Optional[tuple[float, ...]] = None
    trace_step: Optional[float] = None
    trace_max_steps: int = 10_000
    traversal: Optional[TraversalConfig] = None
    exact_gradients: bool = False

    def __post_init__(self):
        if self.n_queries < 1:
            raise AmredError("n_queries must be at least 1")
        if not self.methods:
            raise AmredError("methods must be nonempty")
        bad = set(self.methods) - {METHOD_AM, METHOD_AS}
        if bad:
            raise AmredError(f"unknown methods: {sorted(bad)}")
        if self.spacing <= 0.0:
            raise AmredError("spacing must be positive")


@dataclass
class QueryRecord:
    """One (query, method) outcome."""

    method: str
    index: int
    query: np.ndarray
    s_star: Optional[float]
    estimate: Optional[float]
    truth: float
    abs_error: Optional[float]
    iterations: int
    drift: float
    status: str


@dataclass
class MethodSummary:
    mean_abs_error: float  # over successful queries only
    successes: int
    failures: int


@dataclass
class ErrorReport:
    """Per-fold outcome: summaries per method plus per-query records."""

    fold: int
    summaries: dict[str, MethodSummary]
    records: list[QueryRecord] = dc_field(default_factory=list)


@dataclass
class ExperimentArtifacts:
    """Deterministic objects shared by every fold of an experiment."""

    function: Optional[TestFunction]
    field: GradientField
    manifold: ActiveManifold
    am_surrogate: PolynomialSurrogate
    as_model: ActiveSubspaceModel
    traversal: TraversalConfig


def query_rng(rng_seed: int, fold: int) -> np.random.Generator:
    """Counter-based query stream for one fold."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(rng_seed, spawn_key=(fold,)))
    )


def build_artifacts(
    spec: ExperimentSpec, field: Optional[GradientField] = None
) -> ExperimentArtifacts:
    """Build field, manifold, and both surrogates for a spec.

    ``field`` overrides construction from a builtin (the ingestion path);
    truth values then come from nearest-sample lookups.
    """
    function = None
    if spec.function_id is not None:
        function = get_function(spec.function_id)
    if field is None:
        if function is None:
            raise AmredError("spec needs a function_id or an ingested field")
        field = build_gradient_field(
            function, dimension=spec.dimension, spacing=spec.spacing
        )
    x0 = None if spec.seed_point is None else np.asarray(spec.seed_point, dtype=float)
    manifold = build_active_manifold(
        field, x0=x0, step=spec.trace_step, max_steps=spec.trace_max_steps
    )
    am_surrogate = fit_polynomial(manifold_to_pairs(manifold), spec.surrogate_degree)
    as_model = as_model_from_field(field, spec.surrogate_degree)
    traversal = spec.traversal or TraversalConfig.defaults(field, manifold)
    return ExperimentArtifacts(
        function=function,
        field=field,
        manifold=manifold,
        am_surrogate=am_surrogate,
        as_model=as_model,
        traversal=traversal,
    )


def _truth(artifacts: ExperimentArtifacts, query: np.ndarray) -> float:
    if artifacts.function is not None:
        return float(artifacts.function.value(query))
    # Ingested black-box field: nearest-sample approximation.
    return float(artifacts.field.values[artifacts.field.snap_index(query)])


def _gradient_fn(artifacts: ExperimentArtifacts):
    fn = artifacts.function
    if fn is None or fn.gradient is None:
        raise AmredError("exact gradients need a builtin with an analytic gradient")
    return lambda x: np.asarray(fn.gradient(x), dtype=float)


def run_fold(
    spec: ExperimentSpec, artifacts: ExperimentArtifacts, fold: int
) -> ErrorReport:
    """Score one fold of seeded queries against truth."""
    rng = query_rng(spec.rng_seed, fold)
    queries = rng.uniform(-1.0, 1.0, size=(spec.n_queries, artifacts.field.dimension))
    gradient_fn = _gradient_fn(artifacts) if spec.exact_gradients else None
    records: list[QueryRecord] = []
    errors: dict[str, list[float]] = {m: [] for m in spec.methods}
    failures: dict[str, int] = {m: 0 for m in spec.methods}
    for idx, query in enumerate(queries):
        truth = _truth(artifacts, query)
        if METHOD_AM in spec.methods:
            records.append(
                _am_record(spec, artifacts, idx, query, truth, gradient_fn,
                           errors, failures)
            )
        if METHOD_AS in spec.methods:
            records.append(_as_record(artifacts, idx, query, truth, errors))
    summaries = {}
    for m in spec.methods:
        n_ok = len(errors[m])
        summaries[m] = MethodSummary(
            mean_abs_error=float(np.mean(errors[m])) if n_ok else float("nan"),
            successes=n_ok,
            failures=failures[m],
        )
        if summaries[m].successes + summaries[m].failures != spec.n_queries:
            raise AmredError("query accounting mismatch")
    return ErrorReport(fold=fold, summaries=summaries, records=records)


def _am_record(spec, artifacts, idx, query, truth, gradient_fn, errors, failures):
    try:
        result: ProjectionResult = traverse_to_manifold(
            artifacts.field,
            artifacts.manifold,
            query,
            config=artifacts.traversal,
            gradient_fn=gradient_fn,
        )
        estimate_at(artifacts.am_surrogate, result)
    except TraversalFailed as exc:
        failures[METHOD_AM] += 1
        res = exc.result
        return QueryRecord(
            method=METHOD_AM,
            index=idx,
            query=query,
            s_star=None,
            estimate=None,
            truth=truth,
            abs_error=None,
            iterations=res.iterations,
            drift=res.drift,
            status=res.status,
        )
    abs_error = abs(result.estimate - truth)
    errors[METHOD_AM].append(abs_error)
    return QueryRecord(
        method=METHOD_AM,
        index=idx,
        query=query,
        s_star=result.landing_param,
        estimate=result.estimate,
        truth=truth,
        abs_error=abs_error,
        iterations=result.iterations,
        drift=result.drift,
        status=result.status,
    )


def _as_record(artifacts, idx, query, truth, errors):
    model = artifacts.as_model
    t = float(query @ model.active_direction)
    estimate = as_estimate(model, query)
    abs_error = abs(estimate - truth)
    errors[METHOD_AS].append(abs_error)
    status = "extrapolated" if model.surrogate.extrapolates(t) else "ok"
    return QueryRecord(
        method=METHOD_AS,
        index=idx,
        query=query,
        s_star=t,
        estimate=estimate,
        truth=truth,
        abs_error=abs_error,
        iterations=0,
        drift=0.0,
        status=status,
    )


def run_experiment(
    spec: ExperimentSpec, field: Optional[GradientField] = None
) -> ErrorReport:
    """Single-fold experiment (fold 0 of the Monte Carlo scheme)."""
    artifacts = build_artifacts(spec, field=field)
    return run_fold(spec, artifacts, fold=0)


def monte_carlo(
    spec: ExperimentSpec, folds: int, field: Optional[GradientField] = None
):
    """Independent reruns with fresh query draws per fold.

    Returns ``(reports, fold_means)`` where ``fold_means`` maps each method
    to the mean of its per-fold mean errors.
    """
    if folds < 1:
        raise AmredError("folds must be at least 1")
    artifacts = build_artifacts(spec, field=field)
    reports = [run_fold(spec, artifacts, fold) for fold in range(folds)]
    fold_means = {}
    for m in spec.methods:
        fold_means[m] = float(
            np.mean([rep.summaries[m].mean_abs_error for rep in reports])
        )
    return reports, fold_means


def ingest_gradient_csv(path) -> GradientField:
    """Load a gradient-field CSV, enforcing all field invariants."""
    return read_field_csv(path)


# ---------------------------------------------------------------------------
# Artifact emission
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def emit_plot_data(manifold: ActiveManifold, model: PolynomialSurrogate, path) -> None:
    """CSV of (s, z, fhat) triples, one row per manifold vertex."""
    if not str(path):
        raise AmredError("empty plot-data path")
    from .surrogate import evaluate

    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("s,z,fhat\n")
        for s, z in zip(manifold.params, manifold.values):
            fh.write(f"{_fmt(s)},{_fmt(z)},{_fmt(evaluate(model, float(s)))}\n")


def write_report_csv(
    path,
    spec: ExperimentSpec,
    reports: Sequence[ErrorReport],
    fold_means: dict[str, float],
    dimension: int,
) -> None:
    """Byte-reproducible CSV report for a (multi-fold) experiment."""
    lines = []
    lines.append("# amred comparison report")
    seed_point = (
        "default"
        if spec.seed_point is None
        else ";".join(_fmt(v) for v in spec.seed_point)
    )
    lines.append(
        "# fn={fn} dim={dim} spacing={sp} degree={deg} queries={nq} seed={seed} "
        "folds={folds} methods={methods} rng={rng} seed_point={x0}".format(
            fn=spec.function_id or "ingested",
            dim=dimension,
            sp=_fmt(spec.spacing),
            deg=spec.surrogate_degree,
            nq=spec.n_queries,
            seed=spec.rng_seed,
            folds=len(reports),
            methods=",".join(spec.methods),
            rng=RNG_NAME,
            x0=seed_point,
        )
    )
    for rep in reports:
        for m in spec.methods:
            s = rep.summaries[m]
            lines.append(
                f"# fold={rep.fold} method={m} mean_abs_error={_fmt(s.mean_abs_error)} "
                f"successes={s.successes} failures={s.failures}"
            )
    for m in spec.methods:
        lines.append(f"# overall method={m} mean_of_fold_means={_fmt(fold_means[m])}")
    cols = ["method", "fold", "query_index"]
    cols += [f"x{i + 1}" for i in range(dimension)]
    cols += ["s_star", "estimate", "true_value", "abs_error", "iterations", "drift", "status"]
    lines.append(",".join(cols))
    for rep in reports:
        for rec in rep.records:
            cells = [rec.method, str(rep.fold), str(rec.index)]
            cells += [_fmt(v) for v in rec.query]
            cells += [
                _fmt(rec.s_star) if rec.s_star is not None else "nan",
                _fmt(rec.estimate) if rec.estimate is not None else "nan",
                _fmt(rec.truth),
                _fmt(rec.abs_error) if rec.abs_error is not None else "nan",
                str(rec.iterations),
                _fmt(rec.drift),
                rec.status,
            ]
            lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
