"""Spectral quantities and admissible parameter ranges for adjusted-gradient methods.

For a game Hessian H = S + A at a stable equilibrium, the adjustment
strength tau and step size eta of the antisymmetry-adjusted iteration
w <- w - eta (I - tau A) F(w) admit closed-form safe ranges driven by
five scalars: |S|, |A|, |H| (spectral norms), the smallest real part
among eigenvalues of H, and the smallest singular value of H.  With

    h(tau)     = tau * sigma_min^2 / 2
    L(tau)     = sqrt(1 + tau^2 |A|^2) * |H|
    kappa(tau) = tau / (2 (1 + tau^2 |A|^2))

the iteration map is h-strongly monotone and L-Lipschitz near the
equilibrium, giving squared-distance contraction by
1 - eta (2 h - eta L^2) for any eta in (0, 2h/L^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSneAdmissibleError

__all__ = [
    "SpectralSummary",
    "ParameterBounds",
    "NotSneAdmissibleError",
    "spectral_norm",
    "min_real_eigenpart",
    "min_singular_value",
    "antisym_block_norm",
    "parameter_bounds",
    "contraction_factor",
]

# S counts as exactly zero (pure adversarial coupling) below this,
# relative to |H|; the tau ranges are then unbounded.
S_ZERO_RTOL = 1e-12


def spectral_norm(M) -> float:
    """Largest singular value of M, via a symmetric eigensolve of M^T M."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    if M.size == 0:
        return 0.0
    gram_eigs = np.linalg.eigvalsh(M.T @ M)
    return float(math.sqrt(max(float(gram_eigs[-1]), 0.0)))


def min_singular_value(M) -> float:
    """Smallest singular value of M, via a symmetric eigensolve of M^T M."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    gram_eigs = np.linalg.eigvalsh(M.T @ M)
    return float(math.sqrt(max(float(gram_eigs[0]), 0.0)))


def min_real_eigenpart(M) -> float:
    """Smallest real part among the (generally complex) eigenvalues of M."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    return float(np.min(np.linalg.eigvals(M).real))


def antisym_block_norm(C) -> float:
    """Spectral norm of the antisymmetric part A given only its coupling block C.

    A = [[0, C], [-C^T, 0]] satisfies A^T A = diag(C C^T, C^T C), whose
    blocks share nonzero eigenvalues, so |A| = |C|.
    """
    return spectral_norm(C)


@dataclass(frozen=True)
class SpectralSummary:
    """The five scalars driving every parameter bound."""

    norm_S: float
    norm_A: float
    norm_H: float
    lambda_min_real: float
    sigma_min: float

    @classmethod
    def from_decomposition(cls, dec) -> "SpectralSummary":
        return cls(
            norm_S=spectral_norm(dec.S),
            norm_A=spectral_norm(dec.A),
            norm_H=spectral_norm(dec.H),
            lambda_min_real=min_real_eigenpart(dec.H),
            sigma_min=min_singular_value(dec.H),
        )


@dataclass(frozen=True)
class ParameterBounds:
    """Safe adjustment-strength range with step-size bounds at each tau.

    tau_max is the range endpoint guaranteeing strong monotonicity of the
    adjusted map (2 lambda_min / |S|^2); tau_max_ism (2 / |S|) is the
    larger endpoint under which the map merely stays inverse strongly
    monotone.  Both are +inf when S = 0.
    """

    summary: SpectralSummary
    tau_max: float
    tau_max_ism: float

    def _check_tau(self, tau: float) -> float:
        tau = float(tau)
        if not (tau > 0.0 and math.isfinite(tau)):
            raise ValueError(f"tau must be positive and finite, got {tau}")
        return tau

    def h(self, tau: float) -> float:
        """Strong-monotonicity modulus tau * sigma_min^2 / 2."""
        tau = self._check_tau(tau)
        return tau * self.summary.sigma_min ** 2 / 2.0

    def kappa(self, tau: float) -> float:
        """Inverse-strong-monotonicity modulus tau / (2 (1 + tau^2 |A|^2))."""
        tau = self._check_tau(tau)
        return tau / (2.0 * (1.0 + tau ** 2 * self.summary.norm_A ** 2))

    def lipschitz_constant(self, tau: float) -> float:
        """Lipschitz constant sqrt(1 + tau^2 |A|^2) * |H| of the adjusted map."""
        tau = self._check_tau(tau)
        return math.sqrt(1.0 + tau ** 2 * self.summary.norm_A ** 2) * self.summary.norm_H

    def eta_max(self, tau: float) -> float:
        """Step-size range endpoint 2 h / L^2 for squared-distance contraction."""
        tau = self._check_tau(tau)
        denom = (1.0 + tau ** 2 * self.summary.norm_A ** 2) * self.summary.norm_H ** 2
        return tau * self.summary.sigma_min ** 2 / denom


def parameter_bounds(dec, psd_tol: float = 1e-9, inv_rtol: float = 1e-9) -> ParameterBounds:
    """Parameter bounds at a stable equilibrium's Hessian decomposition.

    Raises NotSneAdmissibleError when S has an eigenvalue below -psd_tol
    (quadratic form indefinite) or H is numerically singular.
    """
    min_sym = float(np.linalg.eigvalsh(dec.S)[0])
    if min_sym < -psd_tol:
        raise NotSneAdmissibleError(
            f"game Hessian is not positive semi-definite: "
            f"min symmetric eigenvalue {min_sym:.6g}",
            failed_check="psd")
    summary = SpectralSummary.from_decomposition(dec)
    norm_H = summary.norm_H
    if summary.sigma_min <= inv_rtol * norm_H:
        raise NotSneAdmissibleError(
            f"game Hessian is not invertible: sigma_min {summary.sigma_min:.6g} "
            f"vs sigma_max {norm_H:.6g}",
            failed_check="invertible")
    if summary.norm_S <= S_ZERO_RTOL * norm_H:
        tau_max = math.inf
        tau_max_ism = math.inf
    else:
        tau_max = 2.0 * summary.lambda_min_real / summary.norm_S ** 2
        tau_max_ism = 2.0 / summary.norm_S
    return ParameterBounds(summary=summary, tau_max=tau_max, tau_max_ism=tau_max_ism)


def contraction_factor(eta: float, h: float, L: float) -> float:
    """Squared-distance contraction factor 1 - eta (2 h - eta L^2).

    Valid for eta in the open interval (0, 2h/L^2); outside it the
    factor is not a contraction guarantee, so the call is rejected.
    """
    eta = float(eta)
    h = float(h)
    L = float(L)
    if h <= 0.0 or L <= 0.0:
        raise ValueError("h and L must be positive")
    limit = 2.0 * h / L ** 2
    if not (0.0 < eta < limit):
        raise ValueError(f"eta must lie in (0, {limit:.6g}), got {eta}")
    return 1.0 - eta * (2.0 * h - eta * L ** 2)
