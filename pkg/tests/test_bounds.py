"""Spectral quantities, parameter bounds, and the contraction factor."""
from __future__ import annotations

import numpy as np
import pytest

from nashopt import (NotSneAdmissibleError, QuadraticGame, SpectralSummary,
                     antisym_block_norm, contraction_factor, eval_hessian,
                     min_real_eigenpart, min_singular_value, parameter_bounds,
                     spectral_norm)
from nashopt.problems import (make_bilinear_intro, make_indefinite_example,
                              make_random_sne_quadratic, make_zero_sum_bilinear)


def _full_antisym(C: np.ndarray) -> np.ndarray:
    m, n = C.shape
    A = np.zeros((m + n, m + n))
    A[:m, m:] = C
    A[m:, :m] = -C.T
    return A


def test_spectral_helpers_on_known_matrix():
    M = np.array([[3.0, 0.0], [0.0, -2.0]])
    assert spectral_norm(M) == pytest.approx(3.0, abs=1e-13)
    assert min_singular_value(M) == pytest.approx(2.0, abs=1e-13)
    assert min_real_eigenpart(M) == pytest.approx(-2.0, abs=1e-13)


def test_bilinear_bounds_match_hand_values():
    pb = parameter_bounds(eval_hessian(make_bilinear_intro(), np.zeros(2)))
    s = pb.summary
    assert s.norm_S == pytest.approx(1.0, abs=1e-13)
    assert s.norm_A == pytest.approx(1.0, abs=1e-13)
    assert s.norm_H == pytest.approx(np.sqrt(2.0), abs=1e-13)
    assert s.lambda_min_real == pytest.approx(1.0, abs=1e-13)
    assert s.sigma_min == pytest.approx(np.sqrt(2.0), abs=1e-13)
    assert pb.tau_max == pytest.approx(2.0, abs=1e-13)
    assert pb.tau_max_ism == pytest.approx(2.0, abs=1e-13)
    assert pb.eta_max(1.0) == pytest.approx(0.5, abs=1e-13)
    assert pb.kappa(1.0) == pytest.approx(0.25, abs=1e-13)
    assert pb.h(1.0) == pytest.approx(1.0, abs=1e-12)
    assert pb.lipschitz_constant(1.0) == pytest.approx(2.0, abs=1e-12)


def test_zero_symmetric_part_gives_unbounded_tau():
    pb = parameter_bounds(eval_hessian(make_zero_sum_bilinear(), np.zeros(2)))
    assert pb.summary.norm_S == 0.0
    assert np.isinf(pb.tau_max)
    assert np.isinf(pb.tau_max_ism)
    # the stepsize bound still works at any finite tau
    assert pb.eta_max(0.5) == pytest.approx(0.4, abs=1e-13)


def test_indefinite_game_is_rejected():
    with pytest.raises(NotSneAdmissibleError) as err:
        parameter_bounds(eval_hessian(make_indefinite_example(), np.zeros(2)))
    assert err.value.failed_check == "psd"
    assert "not positive semi-definite" in str(err.value)


def test_singular_hessian_is_rejected():
    game = QuadraticGame([[1.0]], [[0.0]], [[0.0]], [[0.0]])
    with pytest.raises(NotSneAdmissibleError) as err:
        parameter_bounds(eval_hessian(game, np.zeros(2)))
    assert err.value.failed_check == "invertible"
    assert "not invertible" in str(err.value)


def test_adjustment_norm_identity():
    # |I - tau A|_2^2 == 1 + tau^2 |A|_2^2 for the block antisymmetric A
    rng = np.random.Generator(np.random.Philox(21))
    for _ in range(20):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        C = rng.standard_normal((m, n))
        A = _full_antisym(C)
        tau = float(rng.uniform(0.1, 3.0))
        lhs = spectral_norm(np.eye(m + n) - tau * A) ** 2
        rhs = 1.0 + tau * tau * spectral_norm(A) ** 2
        assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)


def test_antisym_block_norm_equals_full_norm():
    rng = np.random.Generator(np.random.Philox(22))
    for _ in range(20):
        C = rng.standard_normal((int(rng.integers(1, 7)), int(rng.integers(1, 7))))
        assert antisym_block_norm(C) == pytest.approx(
            spectral_norm(_full_antisym(C)), abs=1e-12)


def test_monotonicity_constants_on_random_games():
    # the adjusted field G = (I - tau A) H satisfies both inequalities
    rng = np.random.Generator(np.random.Philox(23))
    for seed in range(5):
        game, _ = make_random_sne_quadratic(seed, 3, 3)
        dec = eval_hessian(game, np.zeros(6))
        pb = parameter_bounds(dec)
        z = rng.standard_normal((6, 200))
        for tau, use_kappa in ((0.9 * pb.tau_max, False),
                               (0.9 * pb.tau_max_ism, True)):
            G = (np.eye(6) - tau * dec.A) @ dec.H
            gz = G @ z
            inner = np.einsum("ij,ij->j", z, gz)
            if use_kappa:
                bound = pb.kappa(tau) * np.einsum("ij,ij->j", gz, gz)
            else:
                bound = pb.h(tau) * np.einsum("ij,ij->j", z, z)
            assert np.all(inner >= bound - 1e-10)


def test_parameter_bound_domain_checks():
    pb = parameter_bounds(eval_hessian(make_bilinear_intro(), np.zeros(2)))
    for bad in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            pb.h(bad)
        with pytest.raises(ValueError):
            pb.eta_max(bad)


def test_contraction_factor_values_and_domain():
    assert contraction_factor(0.4, 1.0, 2.0) == pytest.approx(0.84, abs=1e-15)
    assert contraction_factor(1e-12, 1.0, 2.0) == pytest.approx(1.0, abs=1e-11)
    assert contraction_factor(1e-12, 1.0, 2.0) < 1.0
    with pytest.raises(ValueError):
        contraction_factor(0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        contraction_factor(0.5, 1.0, 2.0)  # at the boundary 2h/L^2


def test_summary_from_decomposition_consistency():
    game, _ = make_random_sne_quadratic(3, 2, 4)
    dec = eval_hessian(game, np.zeros(6))
    s = SpectralSummary.from_decomposition(dec)
    assert s.norm_A == pytest.approx(antisym_block_norm(dec.coupling), abs=1e-12)
    assert s.norm_H == pytest.approx(spectral_norm(dec.H), abs=1e-12)
