"""Game construction, gradients, and the Hessian split."""
from __future__ import annotations

import numpy as np
import pytest

from nashopt import (EvaluationError, JointPoint, QuadraticGame, SmoothGame,
                     eval_gradient, eval_hessian, is_stable_equilibrium,
                     mixed_blocks)
from nashopt.games import as_vector
from nashopt.problems import (make_bilinear_intro, make_indefinite_example,
                              make_random_sne_quadratic, make_zero_sum_bilinear)


def test_joint_point_roundtrip():
    p = JointPoint(x=[1.0, 2.0], y=[3.0])
    np.testing.assert_array_equal(p.w, [1.0, 2.0, 3.0])
    q = JointPoint.from_stacked(p.w, 2, 1)
    np.testing.assert_array_equal(q.x, p.x)
    np.testing.assert_array_equal(q.y, p.y)


def test_joint_point_is_read_only():
    p = JointPoint(x=[1.0], y=[2.0])
    with pytest.raises(ValueError):
        p.x[0] = 5.0


def test_joint_point_rejects_bad_input():
    with pytest.raises(ValueError):
        JointPoint(x=[], y=[1.0])
    with pytest.raises(ValueError):
        JointPoint(x=[np.nan], y=[1.0])


def test_as_vector_checks_length():
    game = make_bilinear_intro()
    with pytest.raises(ValueError):
        as_vector(game, [1.0, 2.0, 3.0])


def test_smooth_game_rejects_degenerate_dims():
    with pytest.raises(ValueError):
        SmoothGame(0, 1, lambda w: 0.0, lambda w: 0.0)


def test_quadratic_game_symmetrizes_diagonal_blocks():
    P = np.array([[1.0, 2.0], [0.0, 1.0]])
    game = QuadraticGame(P, np.zeros((2, 1)), np.zeros((1, 2)), [[1.0]])
    np.testing.assert_array_equal(game.P, (P + P.T) / 2.0)


def test_quadratic_game_copies_inputs():
    P = np.array([[1.0]])
    game = QuadraticGame(P, [[0.5]], [[0.5]], [[1.0]])
    P[0, 0] = 99.0
    assert game.P[0, 0] == 1.0


def test_quadratic_game_losses_and_gradients():
    game = make_bilinear_intro()  # f = x^2/2 + xy, g = y^2/2 - xy
    w = np.array([1.0, 1.0])
    lf, lg = game.loss_pair(w)
    assert lf == pytest.approx(1.5, abs=0)
    assert lg == pytest.approx(-0.5, abs=0)
    np.testing.assert_array_equal(eval_gradient(game, w), [2.0, 0.0])
    np.testing.assert_array_equal(game.H, [[1.0, 1.0], [-1.0, 1.0]])


def test_eval_gradient_fd_fallback_matches_analytic():
    game, _ = make_random_sne_quadratic(5, 2, 2)
    plain = SmoothGame(2, 2, game.loss_f, game.loss_g)
    assert not plain.has_analytic_gradient
    rng = np.random.Generator(np.random.Philox(1))
    for _ in range(5):
        w = rng.uniform(-2, 2, 4)
        np.testing.assert_allclose(eval_gradient(plain, w),
                                   eval_gradient(game, w), atol=2e-8)


def test_hessian_split_identities():
    rng = np.random.Generator(np.random.Philox(2))
    for seed in range(5):
        game, _ = make_random_sne_quadratic(seed, 3, 2)
        dec = eval_hessian(game, rng.uniform(-1, 1, 5))
        scale = np.abs(dec.H).max()
        assert np.abs(dec.S + dec.A - dec.H).max() <= 1e-12 * scale
        assert np.abs(dec.S - dec.S.T).max() == 0.0
        assert np.abs(dec.A + dec.A.T).max() == 0.0
        # the diagonal blocks of A vanish identically
        assert np.abs(dec.A[:3, :3]).max() == 0.0
        assert np.abs(dec.A[3:, 3:]).max() == 0.0
        np.testing.assert_array_equal(dec.coupling, dec.A[:3, 3:])


def test_mixed_blocks_match_hessian_blocks():
    game, _ = make_random_sne_quadratic(9, 2, 3)
    w = np.zeros(5)
    Dxy, Dyx = mixed_blocks(game, w)
    dec = eval_hessian(game, w)
    np.testing.assert_allclose(Dxy, dec.Dxy, atol=1e-12)
    np.testing.assert_allclose(Dyx, dec.Dyx, atol=1e-12)


def _cubic_zero_sum():
    """g = -f for a non-quadratic f with hand-coded derivatives."""
    def loss_f(w):
        x, y = w
        return x * y + 0.1 * x * x * y + 0.5 * x * x

    def loss_g(w):
        return -loss_f(w)

    def grad_x_f(w):
        x, y = w
        return np.array([y + 0.2 * x * y + x])

    def grad_y_g(w):
        x, y = w
        return np.array([-(x + 0.1 * x * x)])

    def hessian(w):
        x, y = w
        return np.array([[1.0 + 0.2 * y, 1.0 + 0.2 * x],
                         [-(1.0 + 0.2 * x), 0.0]])

    return SmoothGame(1, 1, loss_f, loss_g, grad_x_f, grad_y_g, hessian=hessian)


def test_zero_sum_symmetric_part_is_block_diagonal():
    game = _cubic_zero_sum()
    rng = np.random.Generator(np.random.Philox(4))
    for _ in range(10):
        dec = eval_hessian(game, rng.uniform(-2, 2, 2))
        assert abs(dec.S[0, 1]) == 0.0
        assert abs(dec.S[1, 0]) == 0.0


def test_stability_certificates():
    origin = np.zeros(2)
    rep = is_stable_equilibrium(make_bilinear_intro(), origin)
    assert rep.is_stable and rep.hessian_psd and rep.hessian_invertible
    assert rep.min_abs_singular_value == pytest.approx(np.sqrt(2.0), abs=1e-12)

    rep = is_stable_equilibrium(make_indefinite_example(), origin)
    assert not rep.is_stable and not rep.hessian_psd
    assert rep.min_sym_eigenvalue == pytest.approx(-1.0, abs=1e-12)

    rep = is_stable_equilibrium(make_zero_sum_bilinear(), origin)
    assert rep.is_stable
    assert rep.min_sym_eigenvalue == pytest.approx(0.0, abs=1e-12)


def test_non_finite_loss_raises_evaluation_error():
    game = SmoothGame(1, 1, lambda w: float("inf"), lambda w: 0.0)
    with pytest.raises(EvaluationError):
        game.loss_pair(np.zeros(2))


def test_non_finite_gradient_names_coordinate():
    def loss_f(w):
        with np.errstate(invalid="ignore"):
            return float(np.sqrt(w[0]))

    game = SmoothGame(1, 1, loss_f, lambda w: 0.0)
    with pytest.raises(EvaluationError) as err:
        eval_gradient(game, np.array([1e-9, 0.0]))
    assert err.value.coordinate == 0
