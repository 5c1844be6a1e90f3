"""nashopt: optimizers and analysis tools for two-player smooth Nash games.

The library revolves around three objects: a SmoothGame (losses plus
optional analytic derivatives), the spectral parameter bounds derived
from its Hessian decomposition at an equilibrium, and the run loop that
drives one of five iteration schemes while recording a full trace.
"""
from __future__ import annotations

from .bounds import (NotSneAdmissibleError, ParameterBounds, SpectralSummary,
                     antisym_block_norm, contraction_factor, min_real_eigenpart,
                     min_singular_value, parameter_bounds, spectral_norm)
from .contrastive import ContrastiveGame, ContrastiveGameSpec
from .errors import EvaluationError
from .games import (HessianDecomposition, JointPoint, QuadraticGame, SmoothGame,
                    SneReport, eval_gradient, eval_hessian, is_stable_equilibrium,
                    mixed_blocks)
from .optimizers import (CONVERGED, DIVERGED, MAX_ITERS, METHODS, NUMERICAL_ERROR,
                         OptimizerConfig, RunTrace, SecantState, StepRecord,
                         cgd_lin_step, gd_step, init_secant, lrsga_step, run,
                         secant_update, sga_step)
from .oracle import (RateEstimate, fd_gradient, fd_jacobian, measure_linear_rate,
                     solve_quadratic_equilibrium)
from .problems import (PROBLEM_NAMES, make_bilinear_intro, make_indefinite_example,
                       make_random_sne_quadratic, make_toy_contrastive,
                       make_zero_sum_bilinear)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EvaluationError",
    "NotSneAdmissibleError",
    "JointPoint",
    "SmoothGame",
    "QuadraticGame",
    "HessianDecomposition",
    "SneReport",
    "eval_gradient",
    "eval_hessian",
    "mixed_blocks",
    "is_stable_equilibrium",
    "SpectralSummary",
    "ParameterBounds",
    "spectral_norm",
    "min_real_eigenpart",
    "min_singular_value",
    "antisym_block_norm",
    "parameter_bounds",
    "contraction_factor",
    "fd_gradient",
    "fd_jacobian",
    "solve_quadratic_equilibrium",
    "RateEstimate",
    "measure_linear_rate",
    "METHODS",
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
    "ContrastiveGame",
    "ContrastiveGameSpec",
    "PROBLEM_NAMES",
    "make_bilinear_intro",
    "make_indefinite_example",
    "make_zero_sum_bilinear",
    "make_random_sne_quadratic",
    "make_toy_contrastive",
]
