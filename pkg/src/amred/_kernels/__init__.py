"""Traversal kernel backends.

The compiled Cython kernel is preferred; the pure-numpy implementation is
the fallback when the extension is missing or ``AMRED_PURE_PYTHON`` is set
in the environment. Both expose the same ``traverse`` signature and status
codes; ``benchmarks/bench_kernels.py`` compares their throughput.
"""

import os

from . import pykernels

HIT = pykernels.HIT
NO_INTERSECTION = pykernels.NO_INTERSECTION
TANGENT_STALL = pykernels.TANGENT_STALL
DRIFT_EXCEEDED = pykernels.DRIFT_EXCEEDED
ZERO_GRADIENT = pykernels.ZERO_GRADIENT
BOUNDARY_STALL = pykernels.BOUNDARY_STALL

if os.environ.get("AMRED_PURE_PYTHON"):
    backend = pykernels
else:
    try:
        from . import _ckernels as backend  # type: ignore[attr-defined]
    except ImportError:
        backend = pykernels

BACKEND_NAME = backend.NAME
traverse = backend.traverse


def available_backends():
    """Names of importable kernel backends."""
    names = [pykernels.NAME]
    try:
        from . import _ckernels  # noqa: F401

        names.insert(0, _ckernels.NAME)
    except ImportError:
        pass
    return names
