"""Backend selection for the compiled kernels.

Set ``FLOQAMP_BACKEND=numpy`` to force the pure-numpy/scipy path. Any other
value (or no value) uses numba when it can be imported.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def _default_backend():
    env = os.environ.get("FLOQAMP_BACKEND", "numba").strip().lower()
    if env == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


_backend = _default_backend()


def get_backend():
    return _backend


def set_backend(name):
    """Switch the process-wide kernel backend; returns the previous one."""
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}, expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev


def resolve(backend):
    if backend is None:
        return _backend
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}, expected one of {BACKENDS}")
    return backend


def njit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
