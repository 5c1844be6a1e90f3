"""Numba-jitted implementations of the per-iteration kernels.

Importing this module requires numba.  The loops are written out by hand
so the kernels accept non-contiguous views without copying.
"""
from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "gd_increment",
    "affine_gradient",
    "adjusted_increment",
    "cgd_lin_increment",
    "secant_update",
]


@njit(cache=True)
def gd_increment(F, eta):
    out = np.empty_like(F)
    for i in range(F.shape[0]):
        out[i] = -eta * F[i]
    return out


@njit(cache=True)
def affine_gradient(H, b, w):
    d = w.shape[0]
    out = np.empty(d, dtype=np.float64)
    for i in range(d):
        acc = b[i]
        for j in range(d):
            acc += H[i, j] * w[j]
        out[i] = acc
    return out


@njit(cache=True)
def adjusted_increment(F, C, eta, tau):
    m, n = C.shape
    out = np.empty_like(F)
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += C[i, j] * F[m + j]
        out[i] = -eta * (F[i] - tau * acc)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += C[i, j] * F[i]
        out[m + j] = -eta * (F[m + j] + tau * acc)
    return out


@njit(cache=True)
def cgd_lin_increment(F, Dxy, Dyx, eta):
    m, n = Dxy.shape
    out = np.empty_like(F)
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += Dxy[i, j] * F[m + j]
        out[i] = -eta * (F[i] - eta * acc)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += Dyx[j, i] * F[i]
        out[m + j] = -eta * (F[m + j] - eta * acc)
    return out


@njit(cache=True)
def secant_update(mat, s, gdiff):
    r, c = mat.shape
    ss = 0.0
    for j in range(c):
        ss += s[j] * s[j]
    out = np.empty_like(mat)
    for i in range(r):
        resid = gdiff[i]
        for j in range(c):
            resid -= mat[i, j] * s[j]
        scale = resid / ss
        for j in range(c):
            out[i, j] = mat[i, j] + scale * s[j]
    return out
