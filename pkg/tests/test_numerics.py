import numpy as np
import pytest

from supertag.numerics import (dropout_mask, get_activation, init_gaussian, init_orthogonal,
                               make_rng, nll_loss, outer_sum, sigmoid, sigmoid_grad, softmax,
                               spawn_rngs, tanh, tanh_grad)


def test_softmax_rows_sum_to_one_and_survive_large_logits():
    logits = np.array([[1000.0, 1000.0, -1000.0], [0.1, 0.2, 0.3]])
    probs = softmax(logits)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(probs[0], [0.5, 0.5, 0.0], atol=1e-12)


def test_sigmoid_is_finite_and_bounded():
    x = np.array([-800.0, -5.0, 0.0, 5.0, 800.0])
    y = sigmoid(x)
    assert np.all(np.isfinite(y))
    assert y[2] == pytest.approx(0.5, abs=1e-15)
    assert np.all((y >= 0) & (y <= 1))


def test_softmax_of_equal_logits_is_uniform_and_matches_direct_formula():
    np.testing.assert_allclose(softmax(np.zeros(3)), [1 / 3] * 3, atol=1e-15)
    logits = make_rng(4).normal(size=(6, 5))
    direct = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    np.testing.assert_allclose(softmax(logits), direct, rtol=1e-12)


def test_sigmoid_is_symmetric():
    x = np.linspace(-20.0, 20.0, 81)
    np.testing.assert_allclose(sigmoid(-x), 1.0 - sigmoid(x), rtol=0, atol=1e-15)


@pytest.mark.parametrize("function, derivative, span", [(sigmoid, sigmoid_grad, 4.0),
                                                       (tanh, tanh_grad, 3.0)])
def test_activation_derivatives_match_central_differences(function, derivative, span):
    h = 1e-5
    x = np.linspace(-span, span, 25)
    numeric = (function(x + h) - function(x - h)) / (2 * h)
    np.testing.assert_allclose(derivative(function(x)), numeric, rtol=1e-6)


def test_unknown_activation():
    with pytest.raises(ValueError, match="Unknown activation"):
        get_activation("relu")


@pytest.mark.parametrize("size", [4, 64, 512])
def test_orthogonal_init(size):
    m = init_orthogonal(size, size, make_rng(size))
    assert np.max(np.abs(m.T @ m - np.eye(size))) < 1e-8


def test_orthogonal_rectangular_has_orthonormal_short_side():
    m = init_orthogonal(3, 7, make_rng(0))
    assert np.max(np.abs(m @ m.T - np.eye(3))) < 1e-8
    m = init_orthogonal(7, 3, make_rng(0))
    assert np.max(np.abs(m.T @ m - np.eye(3))) < 1e-8


@pytest.mark.parametrize("rows, cols", [(5, 5), (3, 8), (8, 3)])
def test_orthogonal_singular_values_are_one(rows, cols):
    values = np.linalg.svd(init_orthogonal(rows, cols, make_rng(rows * cols)), compute_uv=False)
    np.testing.assert_allclose(values, 1.0, atol=1e-8)


def test_gaussian_init_with_unit_fan_in_uses_the_scale():
    m = init_gaussian(1000, 1000, 1, make_rng(2))
    assert abs(m.std() - 0.1) < 0.05 * 0.1


def test_gaussian_init_standard_deviation():
    m = init_gaussian(1000, 1000, 100, make_rng(1), scale=0.1)
    assert abs(m.std() - 0.01) < 0.05 * 0.01
    assert init_gaussian(5, None, 1, make_rng(1)).shape == (5,)


def test_init_without_rng_gives_zeros():
    assert not np.any(init_gaussian(3, 4, 4, None))
    assert init_gaussian(3, None, 1, None).shape == (3,)
    assert not np.any(init_orthogonal(4, 4, None))


@pytest.mark.parametrize("rows, cols, fan_in", [(0, 3, 1), (3, 0, 1), (3, 3, 0)])
def test_gaussian_init_rejects_bad_shapes(rows, cols, fan_in):
    with pytest.raises(ValueError):
        init_gaussian(rows, cols, fan_in, make_rng(0))


def test_dropout_mask_keep_rate():
    mask = dropout_mask(100_000, 0.3, make_rng(3))
    assert set(np.unique(mask)) <= {0.0, 1.0}
    assert abs(mask.mean() - 0.7) < 0.01


def test_dropout_mask_zero_rate_and_bad_rate():
    assert np.all(dropout_mask((4, 5), 0.0, make_rng(0)) == 1.0)
    for rate in (-0.1, 1.0):
        with pytest.raises(ValueError):
            dropout_mask(3, rate, make_rng(0))


def test_seeded_generators_are_reproducible_and_independent():
    assert make_rng(5).random() == make_rng(5).random()
    a, b = spawn_rngs(5, 2)
    assert a.random() != b.random()


def test_outer_sum_over_time():
    a = np.arange(6.0).reshape(3, 2)
    b = np.arange(9.0).reshape(3, 3)
    np.testing.assert_allclose(outer_sum(a, b), sum(np.outer(a[t], b[t]) for t in range(3)))
    np.testing.assert_allclose(outer_sum(a[0], b[0]), np.outer(a[0], b[0]))


def test_nll_loss_values():
    uniform = np.full((4, 10), 0.1)
    assert nll_loss(uniform, [0, 3, 9, 2]) == pytest.approx(np.log(10), abs=1e-12)
    confident = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert nll_loss(confident, [0, 1]) == 0.0
    assert np.isfinite(nll_loss(confident, [1, 0]))


def test_nll_loss_matches_direct_sum():
    rng = make_rng(2)
    probs = softmax(rng.normal(size=(5, 4)))
    gold = rng.integers(4, size=5)
    expected = -sum(np.log(probs[t, gold[t]]) for t in range(5)) / 5
    assert nll_loss(probs, gold) == pytest.approx(expected, abs=1e-12)
