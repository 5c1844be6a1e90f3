"""Pure-numpy reference implementations of the per-iteration kernels.

Every function here has a numba twin in ``_kernels_nb`` with the same
name and signature; ``nashopt.kernels`` picks one set at import time.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "gd_increment",
    "affine_gradient",
    "adjusted_increment",
    "cgd_lin_increment",
    "secant_update",
]


def gd_increment(F, eta):
    """Simultaneous gradient-descent increment -eta * F."""
    return -eta * F


def affine_gradient(H, b, w):
    """Game gradient H @ w + b of a quadratic game."""
    return H @ w + b


def adjusted_increment(F, C, eta, tau):
    """Increment -eta * (I - tau * A) F where A has coupling block C.

    A is antisymmetric with zero diagonal blocks, so only its top-right
    m-by-n block C is needed: (A F)_x = C F_y and (A F)_y = -C^T F_x.
    """
    m = C.shape[0]
    Fx = F[:m]
    Fy = F[m:]
    out = np.empty_like(F)
    out[:m] = -eta * (Fx - tau * (C @ Fy))
    out[m:] = -eta * (Fy + tau * (C.T @ Fx))
    return out


def cgd_lin_increment(F, Dxy, Dyx, eta):
    """Linearized competitive increment -eta * M F.

    M = [[I, -eta * Dxy], [-eta * Dyx, I]] is the first-order expansion of
    the competitive preconditioner in eta.
    """
    m = Dxy.shape[0]
    Fx = F[:m]
    Fy = F[m:]
    out = np.empty_like(F)
    out[:m] = -eta * (Fx - eta * (Dxy @ Fy))
    out[m:] = -eta * (Fy - eta * (Dyx @ Fx))
    return out


def secant_update(mat, s, gdiff):
    """Rank-one secant update of a Jacobian estimate.

    Returns mat + ((gdiff - mat @ s) s^T) / (s^T s); the result satisfies
    the secant equation new @ s = gdiff and is the least-change solution
    in the Frobenius norm.
    """
    resid = gdiff - mat @ s
    return mat + np.outer(resid, s) / (s @ s)
