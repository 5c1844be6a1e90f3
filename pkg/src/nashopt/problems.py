"""The problem zoo: small closed-form games, a randomized quadratic SNE
generator, and the desk-scale contrastive game.

Randomness is driven by Philox counter-based bit generators so that every
problem is reproducible from a single integer seed and independent
streams can be split off cheaply.
"""
from __future__ import annotations

import numpy as np

from .contrastive import ContrastiveGame, ContrastiveGameSpec
from .games import QuadraticGame, SmoothGame

__all__ = [
    "PROBLEM_NAMES",
    "make_bilinear_intro",
    "make_indefinite_example",
    "make_zero_sum_bilinear",
    "make_random_sne_quadratic",
    "make_toy_contrastive",
    "ContrastiveGameSpec",
]

PROBLEM_NAMES = ("bilinear-intro", "indefinite-example", "zero-sum-bilinear",
                 "random-quadratic", "toy-contrastive")


def make_bilinear_intro() -> QuadraticGame:
    """f = x^2/2 + x y, g = y^2/2 - x y; unique stable equilibrium at the origin.

    Plain gradient descent spirals around it (or cycles exactly at eta = 1
    from (1, 1)); the antisymmetry-adjusted step with tau = 1, eta = 0.5
    lands on it in one iteration.
    """
    return QuadraticGame(P=[[1.0]], Qf=[[1.0]], Qg=[[-1.0]], R=[[1.0]],
                         name="bilinear-intro")


def make_indefinite_example() -> QuadraticGame:
    """f = x^2 + 3 x y, g = y^2 + 3 x y; F vanishes at the origin but the
    game Hessian [[2, 3], [3, 2]] has eigenvalues {-1, 3}: invertible yet
    indefinite, so the origin is not a stable equilibrium and both GD and
    the linearized competitive step diverge from any (eps, -eps) start."""
    return QuadraticGame(P=[[2.0]], Qf=[[3.0]], Qg=[[3.0]], R=[[2.0]],
                         name="indefinite-example")


def make_zero_sum_bilinear(payoff=None) -> QuadraticGame:
    """f = x^T payoff y, g = -f; the classic adversarial bilinear game.

    The game Hessian is purely antisymmetric (S = 0), so the adjustment
    parameter range is unbounded and plain GD always spirals outward.
    """
    payoff = np.atleast_2d(np.asarray([[1.0]] if payoff is None else payoff,
                                      dtype=np.float64))
    return QuadraticGame(P=np.zeros((payoff.shape[0],) * 2),
                         Qf=payoff, Qg=-payoff.T,
                         R=np.zeros((payoff.shape[1],) * 2),
                         name="zero-sum-bilinear")


def _random_spd(rng: np.random.Generator, dim: int, lambda_floor: float) -> np.ndarray:
    basis, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigs = rng.uniform(lambda_floor, 1.0 + lambda_floor, dim)
    return basis @ np.diag(eigs) @ basis.T


def make_random_sne_quadratic(seed: int, m: int, n: int,
                              lambda_floor: float = 0.5,
                              coupling_scale: float = 0.2,
                              max_attempts: int = 1000) -> tuple[QuadraticGame, np.ndarray]:
    """Random quadratic game with a certified stable equilibrium.

    P and R are random symmetric with eigenvalues in
    [lambda_floor, 1 + lambda_floor]; the coupling blocks have i.i.d.
    normal entries scaled by coupling_scale.  Draws are rejected until the
    symmetric part of H keeps min eigenvalue >= lambda_floor / 2, which
    certifies positive definiteness (hence invertibility).  The
    equilibrium w* is sampled uniformly in [-1, 1]^(m+n) and b = -H w*.

    Returns (game, w*).
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    if not lambda_floor > 0:
        raise ValueError("lambda_floor must be positive")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    for _ in range(max_attempts):
        P = _random_spd(rng, m, lambda_floor)
        R = _random_spd(rng, n, lambda_floor)
        Qf = coupling_scale * rng.standard_normal((m, n))
        Qg = coupling_scale * rng.standard_normal((n, m))
        H = np.block([[P, Qf], [Qg, R]])
        S = (H + H.T) / 2.0
        if float(np.linalg.eigvalsh(S)[0]) < lambda_floor / 2.0:
            continue
        w_star = rng.uniform(-1.0, 1.0, m + n)
        b = -(H @ w_star)
        game = QuadraticGame(P=P, Qf=Qf, Qg=Qg, R=R, bf=b[:m], bg=b[m:],
                             name=f"random-quadratic[seed={seed},m={m},n={n}]")
        return game, w_star
    raise RuntimeError(
        f"no positive semi-definite draw in {max_attempts} attempts "
        f"(m={m}, n={n}, lambda_floor={lambda_floor}, "
        f"coupling_scale={coupling_scale}); lower coupling_scale")


def make_toy_contrastive(spec: ContrastiveGameSpec | None = None) -> SmoothGame:
    """Two-encoder contrastive game; see the contrastive module."""
    return ContrastiveGame(spec if spec is not None else ContrastiveGameSpec())
