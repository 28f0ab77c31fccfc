"""Integration-kernel backend selection.

Hot loops live in numba-jitted kernels by default; setting
HORSESHOE_BACKEND=numpy selects the vectorized pure-numpy fallback
(HORSESHOE_BACKEND=numba forces the jitted path and fails loudly if
numba is missing). HORSESHOE_THREADS caps numba's thread pool.
"""
import os
import warnings

_BACKENDS = ("numba", "numpy")
_active = None


def _configure_numba_threads():
    env = os.environ.get("HORSESHOE_THREADS")
    if not env:
        return
    import numba

    try:
        requested = max(1, int(env))
    except ValueError:
        warnings.warn(f"ignoring non-integer HORSESHOE_THREADS={env!r}")
        return
    numba.set_num_threads(min(requested, numba.config.NUMBA_NUM_THREADS))


def _load(name):
    if name == "numba":
        from . import numba_kernels as mod

        _configure_numba_threads()
        return mod
    if name == "numpy":
        from . import numpy_kernels as mod

        return mod
    raise ValueError(f"unknown backend {name!r}; choose from {_BACKENDS}")


def default_backend_name() -> str:
    env = os.environ.get("HORSESHOE_BACKEND")
    if env:
        if env not in _BACKENDS:
            raise ValueError(
                f"HORSESHOE_BACKEND={env!r} is not one of {_BACKENDS}"
            )
        return env
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        warnings.warn("numba unavailable; using the pure-numpy fallback backend")
        return "numpy"


def get_backend():
    global _active
    if _active is None:
        _active = _load(default_backend_name())
    return _active


def use_backend(name: str):
    """Force a backend (used by tests and the benchmark)."""
    global _active
    _active = _load(name)
    return _active


def backend_name() -> str:
    return get_backend().name
