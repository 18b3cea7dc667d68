"""amred: 1-D dimension reduction along steepest-ascent curves.

The library reduces an n-input scalar function to a one-dimensional
polynomial surrogate along an *active manifold* (a gradient-flow curve
traced over a sampled gradient field) and ships the classic linear
*active subspace* reduction as a baseline, plus a seeded benchmark harness
comparing the two.
"""

from ._kernels import BACKEND_NAME as kernel_backend
from .errors import (
    AmredError,
    DegenerateManifoldError,
    EvaluationFailure,
    FitError,
    FormatError,
    GridError,
    InvariantViolation,
    ProjectionError,
    StalledAtStartError,
    TangentSegmentError,
    TraversalFailed,
)
from .functions import (
    CUBIC5_C,
    CUBIC5_D,
    TestFunction,
    builtin_names,
    finite_difference_gradient,
    get_function,
    register_function,
    register_scalar_function,
)
from .geometry import (
    GradientField,
    GradientSample,
    build_grid,
    build_gradient_field,
    clamp_to_domain,
    eval_gradient,
    nearest_grid_point,
    read_field_csv,
    write_field_csv,
)
from .harness import (
    ErrorReport,
    ExperimentSpec,
    MethodSummary,
    QueryRecord,
    emit_plot_data,
    ingest_gradient_csv,
    monte_carlo,
    query_rng,
    run_experiment,
    write_report_csv,
)
from .manifold import (
    ActiveManifold,
    build_active_manifold,
    manifold_to_pairs,
    read_manifold_csv,
    trace_path,
    write_manifold_csv,
)
from .projection import (
    ProjectionResult,
    TraversalConfig,
    TraversalTrace,
    estimate_at,
    nearest_manifold_point,
    orthogonal_project,
    segment_parameter,
    traverse_to_manifold,
    write_projection_report,
)
from .subspace import (
    ActiveSubspaceModel,
    as_estimate,
    as_model_from_field,
    build_as_model,
    compute_c_matrix,
    symmetric_eigen,
    write_as_model_jsonl,
)
from .surrogate import (
    PolynomialSurrogate,
    evaluate,
    fit_polynomial,
    read_surrogate_jsonl,
    write_surrogate_jsonl,
)

__version__ = "0.1.0"
