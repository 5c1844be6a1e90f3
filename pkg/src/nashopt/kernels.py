"""Backend selection for the per-iteration kernels.

The environment variable ``NASHOPT_BACKEND`` picks the implementation:

* unset or ``auto`` -- numba if it imports, else pure numpy;
* ``numba`` -- require the jitted kernels, fail loudly if numba is absent;
* ``numpy`` -- force the pure-numpy reference path.

Both implementations expose the same functions with the same semantics;
``tests/test_kernels.py`` checks they agree to rounding.
"""
from __future__ import annotations

import logging
import os

import numpy as np

from . import _kernels_np

__all__ = [
    "BACKEND",
    "gd_increment",
    "affine_gradient",
    "adjusted_increment",
    "cgd_lin_increment",
    "secant_update",
    "warmup",
]

logger = logging.getLogger(__name__)

_VALID = ("auto", "numba", "numpy")


def _load(requested: str):
    if requested not in _VALID:
        raise ValueError(f"NASHOPT_BACKEND must be one of {_VALID}, got {requested!r}")
    if requested == "numpy":
        return _kernels_np, "numpy"
    try:
        from . import _kernels_nb
    except ImportError:
        if requested == "numba":
            raise
        logger.info("numba unavailable, falling back to numpy kernels")
        return _kernels_np, "numpy"
    return _kernels_nb, "numba"


_impl, BACKEND = _load(os.environ.get("NASHOPT_BACKEND", "auto").strip().lower())

gd_increment = _impl.gd_increment
affine_gradient = _impl.affine_gradient
adjusted_increment = _impl.adjusted_increment
cgd_lin_increment = _impl.cgd_lin_increment
secant_update = _impl.secant_update


def warmup() -> None:
    """Run every kernel once on tiny inputs so jit compilation happens up front."""
    F = np.array([1.0, -1.0, 0.5])
    C = np.array([[0.5, -0.25]])
    sq = np.eye(3)
    b = np.zeros(3)
    gd_increment(F, 0.1)
    affine_gradient(sq, b, F)
    adjusted_increment(F, C, 0.1, 0.5)
    cgd_lin_increment(F, C, C.T.copy(), 0.1)
    secant_update(np.zeros((1, 3)), F, np.array([1.0]))
