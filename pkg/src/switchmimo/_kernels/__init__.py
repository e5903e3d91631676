"""Hot-loop kernels with a compiled fast path.

``_speedups`` is a Cython extension built at install time.  When it is
missing (no compiler, or a source tree used without a build step) the
pure-numpy implementations take over.  Both backends expose the same
functions and agree up to floating-point summation order; integer outputs
(sector and assignment indices) are identical.
"""

from . import _numpy as numpy_backend

try:
    from . import _speedups as _impl

    BACKEND = "cython"
except ImportError:  # extension not built; fall back to numpy
    _impl = numpy_backend
    BACKEND = "numpy"

sector_indices = _impl.sector_indices
quasi_signal = _impl.quasi_signal
best_assignment = _impl.best_assignment


def active_backend() -> str:
    """Name of the kernel backend selected at import ('cython' or 'numpy')."""
    return BACKEND
