"""Exception hierarchy shared across the package."""


class AmredError(Exception):
    """Base class for all numerical and usage failures raised by amred."""


class GridError(AmredError):
    """Invalid grid request (bad spacing, point count over the cap, ...)."""


class EvaluationFailure(AmredError):
    """A function evaluation returned a non-finite value."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class StalledAtStartError(AmredError):
    """Path tracing started on a zero-gradient sample."""


class DegenerateManifoldError(AmredError):
    """Fewer than two distinct points were produced for a manifold."""


class InvariantViolation(AmredError):
    """A constructed object failed one of its structural invariants."""


class FitError(AmredError):
    """Polynomial fitting failed (degenerate abscissae, degree too large)."""


class ProjectionError(AmredError):
    """Invalid input to a level-set projection primitive."""


class TangentSegmentError(ProjectionError):
    """The manifold segment is tangent to the query's level set."""


class TraversalFailed(AmredError):
    """Level-set traversal ended without intersecting the manifold.

    Carries the partial :class:`~amred.projection.ProjectionResult` with a
    failure status in ``result``.
    """

    def __init__(self, result):
        super().__init__(f"traversal failed: {result.status}")
        self.result = result


class FormatError(AmredError):
    """A CSV/JSONL artifact violates the documented file format."""
