"""Iteration schemes for two-player smooth games, with a uniform run loop.

Methods
-------
gd          simultaneous gradient descent  w <- w - eta F(w)
cgd_lin     linearized competitive step with preconditioner
            M = [[I, -eta Dxy_f], [-eta Dyx_g, I]]
sga         antisymmetry-adjusted step  w <- w - eta (I - tau A(w)) F(w)
sga_frozen  sga with A evaluated once at a known equilibrium (analysis mode)
lrsga       sga with A replaced by an antisymmetric surrogate alpha_k built
            from rank-one secant approximations of the mixed second
            derivatives, so each iteration needs one fresh gradient pair
            and no second derivatives

The run loop records every iterate, gradient norm, loss pair, and a
per-step wall-clock time in nanoseconds.  The timed section of step k
covers the increment computation (including any Hessian-block assembly or
secant update the method requires) and the fresh gradient evaluation;
trace bookkeeping and observer callbacks sit outside it.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import EvaluationError
from .games import (JointPoint, QuadraticGame, SmoothGame, as_vector,
                    eval_gradient, eval_hessian, mixed_blocks)

__all__ = [
    "METHODS",
    "SECANT_INITS",
    "CONVERGED",
    "MAX_ITERS",
    "DIVERGED",
    "NUMERICAL_ERROR",
    "OptimizerConfig",
    "SecantState",
    "StepRecord",
    "RunTrace",
    "gd_step",
    "sga_step",
    "cgd_lin_step",
    "lrsga_step",
    "secant_update",
    "init_secant",
    "run",
]

logger = logging.getLogger(__name__)

METHODS = ("gd", "cgd_lin", "sga", "sga_frozen", "lrsga")
SECANT_INITS = ("zero", "exact", "random")

CONVERGED = "converged"
MAX_ITERS = "max_iters"
DIVERGED = "diverged"
NUMERICAL_ERROR = "numerical_error"

# Skip the rank-one update when the step is this small relative to the
# iterate: below it the division by s.s amplifies pure rounding noise.
SECANT_SKIP_RTOL = 1e-14


@dataclass(frozen=True)
class OptimizerConfig:
    """Fixed-parameter run configuration; no adaptation or line search."""

    eta: float
    tau: float = 0.0
    max_iters: int = 1000
    grad_tol: float = 1e-8
    divergence_cap: float = 1e8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "grad_tol", float(self.grad_tol))
        object.__setattr__(self, "divergence_cap", float(self.divergence_cap))
        object.__setattr__(self, "seed", int(self.seed))
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise ValueError(f"tau must be nonnegative and finite, got {self.tau}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not (np.isfinite(self.grad_tol) and self.grad_tol > 0):
            raise ValueError(f"grad_tol must be positive and finite, got {self.grad_tol}")
        if np.isnan(self.divergence_cap) or not self.divergence_cap > 0:
            raise ValueError(f"divergence_cap must be positive, got {self.divergence_cap}")


@dataclass(frozen=True)
class SecantState:
    """Secant approximations mu ~ D grad_x f and nu ~ D grad_y g.

    mu is m x (m+n), nu is n x (m+n); the mixed blocks M = mu[:, m:] and
    N = nu[:, :m] assemble the antisymmetric surrogate
    alpha = [[0, (M - N^T)/2], [(N - M^T)/2, 0]].
    """

    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64, copy=True)
        nu = np.array(self.nu, dtype=np.float64, copy=True)
        if mu.ndim != 2 or nu.ndim != 2:
            raise ValueError("secant blocks must be matrices")
        m, cols = mu.shape
        n = nu.shape[0]
        if cols != m + n or nu.shape[1] != m + n:
            raise ValueError(
                f"secant blocks must be m x (m+n) and n x (m+n); "
                f"got {mu.shape} and {nu.shape}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(nu))):
            raise ValueError("secant blocks must be finite")
        mu.setflags(write=False)
        nu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @property
    def m(self) -> int:
        return self.mu.shape[0]

    @property
    def n(self) -> int:
        return self.nu.shape[0]

    @property
    def M(self) -> np.ndarray:
        """Right m x n block of mu (approximates Dxy of f)."""
        return self.mu[:, self.m:]

    @property
    def N(self) -> np.ndarray:
        """Left n x m block of nu (approximates Dyx of g)."""
        return self.nu[:, :self.m]

    def coupling(self) -> np.ndarray:
        """Top-right block (M - N^T)/2 of the antisymmetric surrogate."""
        return 0.5 * (self.M - self.N.T)


@dataclass(frozen=True)
class StepRecord:
    """One accepted step, as seen by an observer callback."""

    iteration: int
    w_prev: np.ndarray
    w_next: np.ndarray
    grad_prev: np.ndarray
    grad_next: np.ndarray
    state_prev: SecantState | None = None
    state_next: SecantState | None = None
    secant_updated: bool = False


@dataclass(frozen=True)
class RunTrace:
    """Complete record of one run; row k describes iterate w_k.

    step_times_ns[0] is 0 by convention (no step produced w_0); losses
    column 0 is f, column 1 is g.  dist_to_star is present only when the
    run was given a reference point.
    """

    iterates: np.ndarray
    grad_norms: np.ndarray
    losses: np.ndarray
    step_times_ns: np.ndarray
    status: str
    m: int
    n: int
    dist_to_star: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.iterates.shape[0]

    @property
    def iterations(self) -> int:
        """Number of steps taken (rows minus one)."""
        return self.iterates.shape[0] - 1

    def point(self, k: int) -> JointPoint:
        return JointPoint.from_stacked(self.iterates[k], self.m, self.n)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def mean_step_time_ns(self) -> float:
        """Mean wall-clock time per step, excluding the zero row."""
        if self.iterates.shape[0] < 2:
            return float("nan")
        return float(np.mean(self.step_times_ns[1:]))


def _vec(point) -> np.ndarray:
    if isinstance(point, JointPoint):
        return point.w
    return np.asarray(point, dtype=np.float64).reshape(-1)


def gd_step(F_w, eta: float) -> np.ndarray:
    """Increment -eta * F_w; the caller applies w_next = w + increment."""
    F = np.ascontiguousarray(F_w, dtype=np.float64)
    return kernels.gd_increment(F, float(eta))


def sga_step(F_w, A_w, eta: float, tau: float) -> np.ndarray:
    """Increment -eta (I - tau A_w) F_w for a full antisymmetric A_w."""
    F = np.asarray(F_w, dtype=np.float64)
    A = np.asarray(A_w, dtype=np.float64)
    return -float(eta) * (F - float(tau) * (A @ F))


def cgd_lin_step(F_w, Dxy_f, Dyx_g, eta: float) -> np.ndarray:
    """Increment -eta M F_w with M = [[I, -eta Dxy_f], [-eta Dyx_g, I]]."""
    F = np.ascontiguousarray(F_w, dtype=np.float64)
    Dxy = np.ascontiguousarray(Dxy_f, dtype=np.float64)
    Dyx = np.ascontiguousarray(Dyx_g, dtype=np.float64)
    return kernels.cgd_lin_increment(F, Dxy, Dyx, float(eta))


def lrsga_step(F_w, state: SecantState, eta: float, tau: float) -> np.ndarray:
    """Increment -eta (I - tau alpha) F_w with alpha assembled from the secant state."""
    F = np.ascontiguousarray(F_w, dtype=np.float64)
    C = np.ascontiguousarray(state.coupling())
    return kernels.adjusted_increment(F, C, float(eta), float(tau))


def secant_update(state: SecantState, w_prev, w_next,
                  gx_prev, gx_next, gy_prev, gy_next) -> SecantState:
    """Rank-one least-change update of both secant blocks.

    Returns a new state satisfying the secant equations
    mu_next (w_next - w_prev) = gx_next - gx_prev (and likewise nu);
    when the step is negligibly small the update is skipped and the input
    state is returned unchanged.
    """
    wp = _vec(w_prev)
    wn = _vec(w_next)
    s = wn - wp
    snorm = float(np.sqrt(s @ s))
    if snorm <= SECANT_SKIP_RTOL * (1.0 + float(np.sqrt(wn @ wn))):
        logger.debug("secant update skipped: |s| = %.3e below threshold", snorm)
        return state
    gx_prev = np.ascontiguousarray(gx_prev, dtype=np.float64)
    gx_next = np.ascontiguousarray(gx_next, dtype=np.float64)
    gy_prev = np.ascontiguousarray(gy_prev, dtype=np.float64)
    gy_next = np.ascontiguousarray(gy_next, dtype=np.float64)
    mu = kernels.secant_update(state.mu, s, gx_next - gx_prev)
    nu = kernels.secant_update(state.nu, s, gy_next - gy_prev)
    return SecantState(mu=mu, nu=nu)


def init_secant(game: SmoothGame, w0, init="zero", rng: np.random.Generator | None = None,
                scale: float = 0.1) -> SecantState:
    """Initial secant state: zero, exact Jacobians at w0, or random entries.

    init may also be a ready SecantState, which is validated and returned.
    """
    m, n = game.m, game.n
    if isinstance(init, SecantState):
        if init.m != m or init.n != n:
            raise ValueError(f"secant state dims ({init.m},{init.n}) do not match "
                             f"game dims ({m},{n})")
        return init
    if init == "zero":
        return SecantState(np.zeros((m, m + n)), np.zeros((n, m + n)))
    if init == "exact":
        dec = eval_hessian(game, w0)
        return SecantState(dec.H[:m].copy(), dec.H[m:].copy())
    if init == "random":
        if rng is None:
            rng = np.random.Generator(np.random.Philox(0))
        return SecantState(rng.uniform(-scale, scale, (m, m + n)),
                           rng.uniform(-scale, scale, (n, m + n)))
    raise ValueError(f"init must be one of {SECANT_INITS} or a SecantState, got {init!r}")


def _gradient_evaluator(game: SmoothGame) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(game, QuadraticGame):
        H, b = game.H, game.b
        return lambda v: kernels.affine_gradient(H, b, v)
    return lambda v: eval_gradient(game, v)


def run(game: SmoothGame, method: str, cfg: OptimizerConfig, w0,
        init="zero", init_scale: float = 0.1, w_star=None,
        on_step: Callable[[StepRecord], None] | None = None) -> RunTrace:
    """Iterate one method from w0 until grad_tol, max_iters, or divergence.

    init configures the lrsga secant state (ignored by other methods);
    w_star enables the dist_to_star trace column and is required by
    sga_frozen, whose adjustment is anchored there.  on_step, if given,
    is called with a StepRecord after every accepted step.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    v = as_vector(game, w0).copy()
    target = None if w_star is None else as_vector(game, w_star)
    m = game.m
    eta = float(cfg.eta)
    tau = float(cfg.tau)
    max_iters = int(cfg.max_iters)
    rng = np.random.Generator(np.random.Philox(int(cfg.seed)))
    grad = _gradient_evaluator(game)

    meta: dict = {"method": method, "game": game.name, "backend": kernels.BACKEND,
                  "eta": eta, "tau": tau, "secant_skips": 0}

    # Hoist whatever the method can reuse across iterations.
    C_const = None
    blocks_const = None
    state: SecantState | None = None
    if method in ("sga", "cgd_lin") and game.constant_hessian:
        dec = eval_hessian(game, v)
        if method == "sga":
            C_const = np.ascontiguousarray(dec.coupling)
        else:
            blocks_const = (np.ascontiguousarray(dec.Dxy),
                            np.ascontiguousarray(dec.Dyx))
    elif method == "sga_frozen":
        if target is None:
            raise ValueError("sga_frozen needs w_star, the anchor of its adjustment")
        dec = eval_hessian(game, target)
        C_const = np.ascontiguousarray(dec.coupling)
    elif method == "lrsga":
        state = init_secant(game, v, init, rng=rng, scale=init_scale)
        C_state = np.ascontiguousarray(state.coupling())

    iterates = [v.copy()]
    grad_norms: list[float] = []
    losses: list[tuple[float, float]] = []
    times = [0]
    status = None

    try:
        F = grad(v)
        gnorm = float(np.sqrt(F @ F))
        if not np.isfinite(gnorm):
            raise EvaluationError("non-finite game gradient at the start point")
        losses.append(game.loss_pair(v))
    except EvaluationError as exc:
        raise EvaluationError(f"run aborted at iteration 0: {exc}",
                              coordinate=exc.coordinate) from exc
    grad_norms.append(gnorm)

    if gnorm <= cfg.grad_tol:
        status = CONVERGED
    elif float(np.sqrt(v @ v)) > cfg.divergence_cap:
        status = DIVERGED

    k = 0
    while status is None and k < max_iters:
        state_prev = state
        t0 = time.perf_counter_ns()
        try:
            if method == "gd":
                inc = kernels.gd_increment(F, eta)
            elif method == "sga":
                if C_const is not None:
                    C = C_const
                else:
                    Dxy, Dyx = mixed_blocks(game, v)
                    C = 0.5 * (Dxy - Dyx.T)
                inc = kernels.adjusted_increment(F, C, eta, tau)
            elif method == "sga_frozen":
                inc = kernels.adjusted_increment(F, C_const, eta, tau)
            elif method == "cgd_lin":
                if blocks_const is not None:
                    Dxy, Dyx = blocks_const
                else:
                    Dxy, Dyx = mixed_blocks(game, v)
                    Dxy = np.ascontiguousarray(Dxy)
                    Dyx = np.ascontiguousarray(Dyx)
                inc = kernels.cgd_lin_increment(F, Dxy, Dyx, eta)
            else:  # lrsga
                inc = kernels.adjusted_increment(F, C_state, eta, tau)

            v_next = v + inc
            F_next = grad(v_next)

            updated = False
            if method == "lrsga":
                s = v_next - v
                snorm = float(np.sqrt(s @ s))
                if snorm > SECANT_SKIP_RTOL * (1.0 + float(np.sqrt(v_next @ v_next))):
                    mu = kernels.secant_update(state.mu, s, F_next[:m] - F[:m])
                    nu = kernels.secant_update(state.nu, s, F_next[m:] - F[m:])
                    state = SecantState(mu=mu, nu=nu)
                    C_state = np.ascontiguousarray(state.coupling())
                    updated = True
                else:
                    meta["secant_skips"] += 1
        except EvaluationError as exc:
            status = NUMERICAL_ERROR
            meta["error"] = str(exc)
            break
        t1 = time.perf_counter_ns()

        gnorm_next = float(np.sqrt(F_next @ F_next))
        wnorm_next = float(np.sqrt(v_next @ v_next))
        if not (np.isfinite(gnorm_next) and np.isfinite(wnorm_next)):
            status = NUMERICAL_ERROR
            meta["error"] = f"non-finite iterate or gradient at iteration {k + 1}"
            break
        try:
            loss_pair = game.loss_pair(v_next)
        except EvaluationError as exc:
            status = NUMERICAL_ERROR
            meta["error"] = str(exc)
            break

        iterates.append(v_next.copy())
        grad_norms.append(gnorm_next)
        losses.append(loss_pair)
        times.append(t1 - t0)

        if on_step is not None:
            on_step(StepRecord(iteration=k + 1, w_prev=v, w_next=v_next,
                               grad_prev=F, grad_next=F_next,
                               state_prev=state_prev, state_next=state,
                               secant_updated=updated))

        v = v_next
        F = F_next
        gnorm = gnorm_next
        if gnorm <= cfg.grad_tol:
            status = CONVERGED
        elif wnorm_next > cfg.divergence_cap:
            status = DIVERGED
        k += 1

    if status is None:
        status = MAX_ITERS

    arr = np.array(iterates)
    dist = None if target is None else np.linalg.norm(arr - target, axis=1)
    return RunTrace(iterates=arr,
                    grad_norms=np.array(grad_norms),
                    losses=np.array(losses),
                    step_times_ns=np.array(times, dtype=np.int64),
                    status=status, m=game.m, n=game.n,
                    dist_to_star=dist, meta=meta)
