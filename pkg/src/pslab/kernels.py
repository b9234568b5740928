"""Selects the compiled quadrature kernels, falling back to numpy.

Set ``PSLAB_PURE_PYTHON=1`` to force the fallback; ``PSLAB_THREADS`` caps the
OpenMP thread count of the compiled kernels (default 1).
"""
import os

from . import _kernels_py

try:
    if os.environ.get("PSLAB_PURE_PYTHON"):
        raise ImportError("pure-python kernels requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def num_threads() -> int:
    try:
        return max(1, int(os.environ.get("PSLAB_THREADS", "1")))
    except ValueError:
        return 1


def star_integral_sum(a, b):
    return _impl.star_integral_sum(a, b, num_threads())


def bopp_harmonic_sum(asig, Psi):
    return _impl.bopp_harmonic_sum(asig, Psi, num_threads())
