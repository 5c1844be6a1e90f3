"""Finite-difference oracles, linear equilibrium solve, and rate measurement.

These are the slow, trustworthy reference paths: central differences for
first derivatives (O(h^2) truncation, so halving h shrinks the error by
about 4x), a direct linear solve for quadratic equilibria, and a
geometric-mean convergence-rate estimate from a recorded trace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError

__all__ = [
    "default_fd_step",
    "fd_gradient",
    "fd_jacobian",
    "solve_quadratic_equilibrium",
    "RateEstimate",
    "measure_linear_rate",
]


def default_fd_step(w) -> float:
    """Step size max(1e-6, 1e-7 * (1 + |w|_inf)) balancing truncation and cancellation."""
    scale = float(np.max(np.abs(w))) if np.size(w) else 0.0
    return max(1e-6, 1e-7 * (1.0 + scale))


def _probe_value(fn, v: np.ndarray, coord: int, what: str) -> float:
    val = float(fn(v))
    if not np.isfinite(val):
        raise EvaluationError(
            f"non-finite {what} while probing coordinate {coord}", coordinate=coord)
    return val


def fd_gradient(loss, w, h: float | None = None, coords=None) -> np.ndarray:
    """Central-difference gradient of a scalar loss.

    With coords given, differentiates only those coordinates and returns
    an array of matching length; otherwise all of them.
    """
    v = np.asarray(w, dtype=np.float64).reshape(-1).copy()
    if h is None:
        h = default_fd_step(v)
    h = float(h)
    if h <= 0:
        raise ValueError("fd step must be positive")
    idx = np.arange(v.size) if coords is None else np.asarray(coords, dtype=int)
    out = np.empty(idx.size)
    for k, j in enumerate(idx):
        old = v[j]
        v[j] = old + h
        fp = _probe_value(loss, v, int(j), "loss")
        v[j] = old - h
        fm = _probe_value(loss, v, int(j), "loss")
        v[j] = old
        out[k] = (fp - fm) / (2.0 * h)
    return out


def fd_jacobian(vec_fn, w, h: float | None = None, coords=None) -> np.ndarray:
    """Central-difference Jacobian of a vector function, one column per coordinate."""
    v = np.asarray(w, dtype=np.float64).reshape(-1).copy()
    if h is None:
        h = default_fd_step(v)
    h = float(h)
    if h <= 0:
        raise ValueError("fd step must be positive")
    idx = np.arange(v.size) if coords is None else np.asarray(coords, dtype=int)
    cols = []
    for j in idx:
        old = v[j]
        v[j] = old + h
        fp = np.asarray(vec_fn(v), dtype=np.float64).reshape(-1)
        v[j] = old - h
        fm = np.asarray(vec_fn(v), dtype=np.float64).reshape(-1)
        v[j] = old
        col = (fp - fm) / (2.0 * h)
        bad = np.flatnonzero(~np.isfinite(col))
        if bad.size:
            raise EvaluationError(
                f"non-finite derivative while probing coordinate {int(j)}",
                coordinate=int(j))
        cols.append(col)
    return np.column_stack(cols)


def solve_quadratic_equilibrium(game) -> np.ndarray:
    """Equilibrium w* = -H^{-1} b of a quadratic game via direct solve.

    Raises ValueError when H is singular or the solve residual exceeds
    1e-10 * (1 + |b|).
    """
    H = np.asarray(game.H, dtype=np.float64)
    b = np.asarray(game.b, dtype=np.float64)
    try:
        w_star = np.linalg.solve(H, -b)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"game Hessian is singular: {exc}") from exc
    residual = float(np.linalg.norm(H @ w_star + b))
    limit = 1e-10 * (1.0 + float(np.linalg.norm(b)))
    if not np.isfinite(residual) or residual > limit:
        raise ValueError(
            f"equilibrium solve residual {residual:.3e} exceeds {limit:.3e}; "
            "game Hessian is singular or badly conditioned")
    return w_star


@dataclass(frozen=True)
class RateEstimate:
    """Geometric-mean per-step distance ratio, with an underflow flag."""

    rate: float
    underflow: bool
    steps: int


def measure_linear_rate(trace, w_star, burn_in: int = 10) -> RateEstimate:
    """Per-step linear convergence (or divergence) rate of a trace.

    trace may be a run trace or a plain (T, d) array of iterates.  The
    rate is the geometric mean of |w_{k+1} - w*| / |w_k - w*| over the
    steps after burn_in, i.e. (d_last / d_burn)^(1/(T-1-burn_in)).  When
    a distance hits zero the trajectory has landed exactly; that is
    reported as rate 0 with underflow=True rather than as an error.
    """
    iterates = np.asarray(getattr(trace, "iterates", trace), dtype=np.float64)
    if iterates.ndim != 2:
        raise ValueError("expected a (T, d) array of iterates")
    target = np.asarray(w_star, dtype=np.float64).reshape(-1)
    if target.size != iterates.shape[1]:
        raise ValueError("w_star length does not match the iterates")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    T = iterates.shape[0]
    if T < burn_in + 5:
        raise ValueError(f"need at least burn_in + 5 = {burn_in + 5} iterates, got {T}")
    dist = np.linalg.norm(iterates - target, axis=1)
    d0 = dist[burn_in]
    d1 = dist[-1]
    steps = T - 1 - burn_in
    if d0 == 0.0 or d1 == 0.0:
        return RateEstimate(rate=0.0, underflow=True, steps=steps)
    rate = float((d1 / d0) ** (1.0 / steps))
    return RateEstimate(rate=rate, underflow=False, steps=steps)
