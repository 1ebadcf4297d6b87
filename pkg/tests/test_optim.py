"""Optimizer arithmetic, pinned against a hand-unrolled first step."""

import numpy as np
import pytest

from sgdst.optim import Adam, TrainConfig, grad_norm, minibatches


def test_first_step_matches_hand_computation():
    cfg = TrainConfig(lr=0.1, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0)
    params = {"w": np.array([1.0, -2.0])}
    grad = np.array([0.5, -3.0])
    Adam(cfg).step(params, {"w": grad.copy()})
    # t=1: m̂ = g, v̂ = g², so the update is g / (|g| + eps).
    want = np.array([1.0, -2.0]) - 0.1 * grad / (np.abs(grad) + 1e-8)
    np.testing.assert_allclose(params["w"], want, rtol=0, atol=1e-12)


def test_second_step_matches_hand_computation():
    cfg = TrainConfig(lr=0.05, beta1=0.9, beta2=0.99, eps=1e-8)
    params = {"w": np.array([0.0])}
    opt = Adam(cfg)
    g1, g2 = np.array([1.0]), np.array([-2.0])

    opt.step(params, {"w": g1.copy()})
    after_one = params["w"].copy()
    opt.step(params, {"w": g2.copy()})

    m = 0.9 * (0.1 * 1.0) + 0.1 * (-2.0)
    v = 0.99 * (0.01 * 1.0) + 0.01 * 4.0
    m_hat = m / (1.0 - 0.9**2)
    v_hat = v / (1.0 - 0.99**2)
    want = after_one - 0.05 * m_hat / (np.sqrt(v_hat) + 1e-8)
    np.testing.assert_allclose(params["w"], want, rtol=0, atol=1e-12)


def test_first_step_size_is_about_lr():
    # With bias correction the first step has magnitude lr regardless of
    # gradient scale (up to eps).
    for scale in (1e-4, 1.0, 1e4):
        params = {"w": np.array([0.0])}
        Adam(TrainConfig(lr=0.01)).step(params, {"w": np.array([scale])})
        assert abs(params["w"][0] + 0.01) < 2e-4


def test_decoupled_weight_decay_shrinks_parameters():
    cfg = TrainConfig(lr=0.1, weight_decay=0.5)
    params = {"w": np.array([10.0])}
    Adam(cfg).step(params, {"w": np.array([0.0])})
    # Zero gradient: the only movement is -lr * wd * w.
    np.testing.assert_allclose(params["w"], [10.0 - 0.1 * 0.5 * 10.0], atol=1e-12)


def test_converges_on_quadratic():
    params = {"w": np.array([5.0, -3.0, 2.0])}
    opt = Adam(TrainConfig(lr=0.05))
    for _ in range(2000):
        opt.step(params, {"w": 2.0 * params["w"]})
    assert np.abs(params["w"]).max() < 1e-4


def test_untouched_keys_keep_state():
    params = {"a": np.array([1.0]), "b": np.array([1.0])}
    opt = Adam(TrainConfig(lr=0.1))
    opt.step(params, {"a": np.array([1.0])})
    np.testing.assert_allclose(params["b"], [1.0])


def test_grad_norm():
    grads = {"a": np.array([3.0]), "b": np.array([[4.0]])}
    assert grad_norm(grads) == pytest.approx(5.0)
    assert grad_norm({}) == 0.0


class TestMinibatches:
    def test_covers_every_index_once(self):
        batches = minibatches(10, 3, None)
        flat = np.concatenate(batches)
        assert sorted(flat.tolist()) == list(range(10))
        assert [len(b) for b in batches] == [3, 3, 3, 1]

    def test_no_rng_means_in_order(self):
        batches = minibatches(5, 2, None)
        assert np.concatenate(batches).tolist() == [0, 1, 2, 3, 4]

    def test_rng_shuffles_but_still_covers(self):
        rng = np.random.default_rng(0)
        batches = minibatches(100, 7, rng)
        flat = np.concatenate(batches)
        assert sorted(flat.tolist()) == list(range(100))
        assert flat.tolist() != list(range(100))

    def test_empty(self):
        assert minibatches(0, 4, None) == []
