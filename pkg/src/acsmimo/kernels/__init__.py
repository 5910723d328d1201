"""Hot numerical kernels with a compiled core and a pure-numpy fallback.

The Cython extension ``_core`` is built at install time when a compiler is
available; otherwise the numpy implementations in ``_pure`` are used.  Both
expose the same functions with identical semantics.
"""

from . import _pure

try:
    from . import _core

    _impl = _core
    BACKEND = "cython"
except ImportError:  # extension not built
    _core = None
    _impl = _pure
    BACKEND = "python"

omp_solve = _impl.omp_solve
l21_ball_admm = _impl.l21_ball_admm


def available_backends():
    """Mapping of backend name to kernel module, for benchmarks and tests."""
    out = {"python": _pure}
    if _core is not None:
        out["cython"] = _core
    return out
