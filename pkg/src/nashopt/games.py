"""Two-player smooth games: strategy points, game gradient and Hessian, equilibrium checks.

A joint strategy w = (x, y) stacks player one's block x (length m) on top
of player two's block y (length n).  Player one minimizes f(x, y) over x,
player two minimizes g(x, y) over y.  The game gradient stacks the
own-block gradients,

    F(w) = (grad_x f(w), grad_y g(w)),

and its Jacobian H(w) = DF(w) is generally nonsymmetric.  It splits as
H = S + A with S = (H + H^T)/2 symmetric and A = (H - H^T)/2
antisymmetric; the diagonal blocks of A vanish because the pure second
derivatives of C^2 losses are symmetric.  A point w* is a stable
equilibrium when F(w*) = 0 and H(w*) is invertible and positive
semi-definite (the quadratic form of H equals that of S, so definiteness
is read off the spectrum of S).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .oracle import default_fd_step, fd_gradient, fd_jacobian

__all__ = [
    "EvaluationError",
    "JointPoint",
    "SmoothGame",
    "QuadraticGame",
    "HessianDecomposition",
    "SneReport",
    "eval_gradient",
    "eval_hessian",
    "mixed_blocks",
    "is_stable_equilibrium",
]


def _frozen_vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=np.float64, copy=True).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JointPoint:
    """Immutable joint strategy (x, y) with stacked view w."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_vector(self.x, "x"))
        object.__setattr__(self, "y", _frozen_vector(self.y, "y"))

    @classmethod
    def from_stacked(cls, w, m: int, n: int) -> "JointPoint":
        arr = np.asarray(w, dtype=np.float64).reshape(-1)
        if arr.size != m + n:
            raise ValueError(f"stacked vector has length {arr.size}, expected {m + n}")
        return cls(arr[:m], arr[m:])

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def w(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])


class SmoothGame:
    """Evaluation interface for a two-player smooth game.

    All callables take the stacked strategy vector of length m + n.
    Analytic first and second derivatives are optional; missing ones are
    filled in by central finite differences of the level below.
    """

    constant_hessian = False

    def __init__(self, m, n, loss_f, loss_g, grad_x_f=None, grad_y_g=None,
                 hessian=None, name="game"):
        m = int(m)
        n = int(n)
        if m < 1 or n < 1:
            raise ValueError("both players need at least one dimension")
        self.m = m
        self.n = n
        self.loss_f = loss_f
        self.loss_g = loss_g
        self.grad_x_f = grad_x_f
        self.grad_y_g = grad_y_g
        self.hessian = hessian
        self.name = str(name)

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def dims(self) -> tuple[int, int]:
        return self.m, self.n

    @property
    def has_analytic_gradient(self) -> bool:
        return self.grad_x_f is not None and self.grad_y_g is not None

    @property
    def has_analytic_hessian(self) -> bool:
        return self.hessian is not None

    def default_start(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, self.size)

    def loss_pair(self, w) -> tuple[float, float]:
        v = as_vector(self, w)
        lf = float(self.loss_f(v))
        lg = float(self.loss_g(v))
        if not (np.isfinite(lf) and np.isfinite(lg)):
            raise EvaluationError(
                f"non-finite loss at point with |w|_max = {np.max(np.abs(v)):.3e}")
        return lf, lg

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, m={self.m}, n={self.n})"


class QuadraticGame(SmoothGame):
    """Quadratic two-player game with constant game Hessian.

    f(x, y) = 0.5 x^T P x + x^T Qf y + bf^T x
    g(x, y) = 0.5 y^T R y + y^T Qg x + bg^T y

    so F(w) = H w + b with H = [[P, Qf], [Qg, R]] and b = (bf, bg).
    P and R are symmetrized on input; they are second derivatives of C^2
    losses, so any asymmetry is treated as noise.
    """

    constant_hessian = True

    def __init__(self, P, Qf, Qg, R, bf=None, bg=None, name="quadratic"):
        P = np.atleast_2d(np.array(P, dtype=np.float64, copy=True))
        R = np.atleast_2d(np.array(R, dtype=np.float64, copy=True))
        Qf = np.atleast_2d(np.array(Qf, dtype=np.float64, copy=True))
        Qg = np.atleast_2d(np.array(Qg, dtype=np.float64, copy=True))
        m = P.shape[0]
        n = R.shape[0]
        if P.shape != (m, m) or R.shape != (n, n):
            raise ValueError("P and R must be square")
        if Qf.shape != (m, n) or Qg.shape != (n, m):
            raise ValueError(f"coupling blocks must have shapes ({m},{n}) and ({n},{m})")
        P = (P + P.T) / 2.0
        R = (R + R.T) / 2.0
        bf = np.zeros(m) if bf is None else np.array(bf, dtype=np.float64, copy=True).reshape(m)
        bg = np.zeros(n) if bg is None else np.array(bg, dtype=np.float64, copy=True).reshape(n)

        H = np.block([[P, Qf], [Qg, R]])
        b = np.concatenate([bf, bg])
        if not np.all(np.isfinite(H)) or not np.all(np.isfinite(b)):
            raise ValueError("quadratic game data must be finite")

        def loss_f(w, _P=P, _Qf=Qf, _bf=bf, _m=m):
            x = w[:_m]
            y = w[_m:]
            return 0.5 * (x @ (_P @ x)) + x @ (_Qf @ y) + _bf @ x

        def loss_g(w, _R=R, _Qg=Qg, _bg=bg, _m=m):
            x = w[:_m]
            y = w[_m:]
            return 0.5 * (y @ (_R @ y)) + y @ (_Qg @ x) + _bg @ y

        def grad_x_f(w, _P=P, _Qf=Qf, _bf=bf, _m=m):
            return _P @ w[:_m] + _Qf @ w[_m:] + _bf

        def grad_y_g(w, _R=R, _Qg=Qg, _bg=bg, _m=m):
            return _R @ w[_m:] + _Qg @ w[:_m] + _bg

        def hessian(w, _H=H):
            return _H

        super().__init__(m, n, loss_f, loss_g, grad_x_f=grad_x_f,
                         grad_y_g=grad_y_g, hessian=hessian, name=name)
        for mat in (P, Qf, Qg, R, H, b):
            mat.setflags(write=False)
        self.P = P
        self.Qf = Qf
        self.Qg = Qg
        self.R = R
        self.H = H
        self.b = b

    def loss_pair(self, w) -> tuple[float, float]:
        v = as_vector(self, w)
        x = v[:self.m]
        y = v[self.m:]
        lf = 0.5 * (x @ (self.P @ x)) + x @ (self.Qf @ y) + self.bf @ x
        lg = 0.5 * (y @ (self.R @ y)) + y @ (self.Qg @ x) + self.bg @ y
        return float(lf), float(lg)

    @property
    def bf(self) -> np.ndarray:
        return self.b[:self.m]

    @property
    def bg(self) -> np.ndarray:
        return self.b[self.m:]


@dataclass(frozen=True)
class HessianDecomposition:
    """Game Hessian H at a point with its symmetric/antisymmetric split H = S + A."""

    H: np.ndarray
    S: np.ndarray
    A: np.ndarray
    m: int
    n: int

    @property
    def Dxy(self) -> np.ndarray:
        """Jacobian of grad_x f with respect to y (top-right block of H)."""
        return self.H[:self.m, self.m:]

    @property
    def Dyx(self) -> np.ndarray:
        """Jacobian of grad_y g with respect to x (bottom-left block of H)."""
        return self.H[self.m:, :self.m]

    @property
    def coupling(self) -> np.ndarray:
        """Top-right block of A; A is determined by it since the diagonal blocks vanish."""
        return self.A[:self.m, self.m:]


@dataclass(frozen=True)
class SneReport:
    """Stable-equilibrium certificate for one point."""

    gradient_norm: float
    hessian_invertible: bool
    hessian_psd: bool
    is_stable: bool
    min_sym_eigenvalue: float
    min_abs_singular_value: float


def as_vector(game: SmoothGame, w) -> np.ndarray:
    """Stacked strategy vector of w, validated against the game's dimensions."""
    if isinstance(w, JointPoint):
        if w.m != game.m or w.n != game.n:
            raise ValueError(
                f"point has dims ({w.m},{w.n}), game expects ({game.m},{game.n})")
        return w.w
    arr = np.asarray(w, dtype=np.float64).reshape(-1)
    if arr.size != game.size:
        raise ValueError(f"point has length {arr.size}, game expects {game.size}")
    return arr


def _check_finite_vector(vec: np.ndarray, what: str) -> np.ndarray:
    bad = np.flatnonzero(~np.isfinite(vec))
    if bad.size:
        raise EvaluationError(f"non-finite {what} at coordinate {bad[0]}",
                              coordinate=int(bad[0]))
    return vec


def _grad_x(game: SmoothGame, v: np.ndarray) -> np.ndarray:
    if game.grad_x_f is not None:
        return np.asarray(game.grad_x_f(v), dtype=np.float64).reshape(game.m)
    h = default_fd_step(v)
    return fd_gradient(game.loss_f, v, h, coords=np.arange(game.m))


def _grad_y(game: SmoothGame, v: np.ndarray) -> np.ndarray:
    if game.grad_y_g is not None:
        return np.asarray(game.grad_y_g(v), dtype=np.float64).reshape(game.n)
    h = default_fd_step(v)
    return fd_gradient(game.loss_g, v, h, coords=np.arange(game.m, game.size))


def eval_gradient(game: SmoothGame, w) -> np.ndarray:
    """Game gradient F(w) = (grad_x f, grad_y g), analytic when available."""
    v = as_vector(game, w)
    F = np.concatenate([_grad_x(game, v), _grad_y(game, v)])
    return _check_finite_vector(F, "game gradient")


def _symmetrize_diagonal_blocks(H: np.ndarray, m: int) -> np.ndarray:
    # Pure second derivatives of C^2 losses are symmetric; enforce that
    # exactly so A = (H - H^T)/2 has identically zero diagonal blocks.
    out = H.copy()
    out[:m, :m] = (H[:m, :m] + H[:m, :m].T) / 2.0
    out[m:, m:] = (H[m:, m:] + H[m:, m:].T) / 2.0
    return out


def eval_hessian(game: SmoothGame, w) -> HessianDecomposition:
    """Game Hessian H(w) = DF(w) with its split H = S + A."""
    v = as_vector(game, w)
    if game.has_analytic_hessian:
        H = np.array(game.hessian(v), dtype=np.float64)
        if H.shape != (game.size, game.size):
            raise ValueError(f"hessian callable returned shape {H.shape}, "
                             f"expected ({game.size},{game.size})")
    else:
        h = default_fd_step(v)
        H = fd_jacobian(lambda u: eval_gradient(game, u), v, h)
    if not np.all(np.isfinite(H)):
        raise EvaluationError("non-finite game Hessian entry")
    H = _symmetrize_diagonal_blocks(H, game.m)
    S = (H + H.T) / 2.0
    A = (H - H.T) / 2.0
    return HessianDecomposition(H=H, S=S, A=A, m=game.m, n=game.n)


def mixed_blocks(game: SmoothGame, w) -> tuple[np.ndarray, np.ndarray]:
    """Mixed second-derivative blocks (Dxy of f, Dyx of g) at w.

    Uses the analytic Hessian when present; otherwise differentiates the
    own-block gradients, costing 2(m + n) gradient evaluations.
    """
    v = as_vector(game, w)
    if game.has_analytic_hessian:
        dec = eval_hessian(game, v)
        return dec.Dxy.copy(), dec.Dyx.copy()
    h = default_fd_step(v)
    Dxy = fd_jacobian(lambda u: _grad_x(game, u), v, h,
                      coords=np.arange(game.m, game.size))
    Dyx = fd_jacobian(lambda u: _grad_y(game, u), v, h,
                      coords=np.arange(game.m))
    if not (np.all(np.isfinite(Dxy)) and np.all(np.isfinite(Dyx))):
        raise EvaluationError("non-finite mixed second-derivative block")
    return Dxy, Dyx


def is_stable_equilibrium(game: SmoothGame, w, tol: float = 1e-9,
                          psd_tol: float = 1e-9, inv_rtol: float = 1e-9) -> SneReport:
    """Certificate that w is a stable equilibrium.

    Checks |F(w)| <= tol, positive semi-definiteness of S(w) up to
    psd_tol, and invertibility of H(w) as sigma_min > inv_rtol * sigma_max.
    """
    grad_norm = float(np.linalg.norm(eval_gradient(game, w)))
    dec = eval_hessian(game, w)
    min_sym = float(np.linalg.eigvalsh(dec.S)[0])
    sing = np.linalg.svd(dec.H, compute_uv=False)
    sigma_max = float(sing[0])
    sigma_min = float(sing[-1])
    psd = min_sym >= -psd_tol
    invertible = sigma_min > inv_rtol * sigma_max
    stable = (grad_norm <= tol) and psd and invertible
    return SneReport(gradient_norm=grad_norm, hessian_invertible=invertible,
                     hessian_psd=psd, is_stable=stable,
                     min_sym_eigenvalue=min_sym, min_abs_singular_value=sigma_min)
