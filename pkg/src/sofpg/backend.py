"""Kernel backend selection.

The hot rollout loops exist twice: a numba-compiled version and a pure
NumPy one. `SOFPG_BACKEND=numpy` (or `numba`) selects explicitly;
otherwise numba is used when it imports cleanly. Within one backend all
kernels are bit-deterministic; across backends results agree to float
rounding but not bit-for-bit (different accumulation orders).
"""

import os

from . import _kernels_numpy

_BACKENDS = ("numba", "numpy")
_active = None


def _resolve_default():
    env = os.environ.get("SOFPG_BACKEND", "").strip().lower()
    if env:
        if env not in _BACKENDS:
            raise ValueError(f"SOFPG_BACKEND must be one of {_BACKENDS}, got {env!r}")
        return env
    try:
        from . import _kernels_numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def active_backend():
    """Name of the backend currently in use."""
    global _active
    if _active is None:
        _active = _resolve_default()
    return _active


def set_backend(name):
    """Force a backend (mainly for tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend must be one of {_BACKENDS}, got {name!r}")
    if name == "numba":
        from . import _kernels_numba  # noqa: F401
    _active = name


def kernels():
    """The module implementing the rollout kernels for the active backend."""
    if active_backend() == "numba":
        from . import _kernels_numba
        return _kernels_numba
    return _kernels_numpy
