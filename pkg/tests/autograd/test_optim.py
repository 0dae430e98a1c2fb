"""Tests for the Adam optimizer"""

import math

import numpy as np
import pytest

from src.autograd.optim import Adam, AdamState, adam_step
from src.autograd.tensor import Tensor, precision


def scalar_adam(theta, grads, lr, b1=0.9, b2=0.999, eps=1e-8):
    """Plain-float Adam, one update per gradient"""
    m = v = 0.0
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta -= lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
    return theta


def scalar_adam_quadratic(theta, lr, steps, b1=0.9, b2=0.999, eps=1e-8):
    m = v = 0.0
    for t in range(1, steps + 1):
        g = 2 * theta
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta -= lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
    return theta


class TestAdamStep:
    def test_zero_gradient_leaves_params(self):
        p = {"w": np.array([1.0, -2.0, 3.0])}
        adam_step(p, {"w": np.zeros(3)}, AdamState(lr=0.01))
        np.testing.assert_array_equal(p["w"], [1.0, -2.0, 3.0])

    def test_first_step_magnitude_is_lr(self):
        p = {"w": np.array([0.5])}
        adam_step(p, {"w": np.array([1.0])}, AdamState(lr=0.01, beta1=0.9))
        assert p["w"][0] == pytest.approx(0.49, abs=1e-7)

    def test_matches_scalar_oracle(self):
        grads = [1.0, -0.5, 0.25, 2.0, 0.0]
        p = {"w": np.array([0.3])}
        state = AdamState(lr=0.01, beta1=0.9, beta2=0.999)
        for g in grads:
            adam_step(p, {"w": np.array([g])}, state)
        assert state.t == len(grads)
        assert p["w"][0] == pytest.approx(scalar_adam(0.3, grads, 0.01), abs=1e-12)

    def test_momentum_matters(self):
        # gradient of w^2, re-evaluated before each update
        twice = {"w": np.array([1.0])}
        state = AdamState(lr=0.01, beta1=0.9)
        for _ in range(2):
            adam_step(twice, {"w": 2 * twice["w"]}, state)
        once = {"w": np.array([1.0])}
        adam_step(once, {"w": 2 * once["w"]}, AdamState(lr=0.02, beta1=0.9))
        assert twice["w"][0] != pytest.approx(once["w"][0], abs=1e-9)
        assert twice["w"][0] == pytest.approx(scalar_adam_quadratic(1.0, 0.01, 2), abs=1e-12)

    def test_missing_gradient_counts_as_zero(self):
        p = {"w": np.array([1.0])}
        adam_step(p, {}, AdamState(lr=0.1))
        assert p["w"][0] == 1.0

    def test_rejects_bad_lr(self):
        with pytest.raises(ValueError):
            AdamState(lr=0.0)


class TestAdam:
    def test_descends_quadratic(self):
        w = Tensor([4.0, -3.0], requires_grad=True)
        opt = Adam({"w": w}, lr=0.1, betas=(0.9, 0.999))
        for _ in range(200):
            opt.zero_grad()
            (w * w).sum().backward()
            opt.step()
        assert np.all(np.abs(w.data) < 0.5)
        assert opt.steps == 200

    def test_state_restore_continues_identically(self):
        with precision("float64"):
            a = Tensor([1.0, 2.0], requires_grad=True)
            b = Tensor([1.0, 2.0], requires_grad=True)
        opt_a = Adam({"w": a}, lr=0.05)
        for _ in range(3):
            opt_a.zero_grad()
            (a * a).sum().backward()
            opt_a.step()
        b.data[:] = a.data
        opt_b = Adam({"w": b}, lr=0.05)
        opt_b.load_state(opt_a.state_tensors(), opt_a.steps)
        for opt, t in ((opt_a, a), (opt_b, b)):
            opt.zero_grad()
            (t * t).sum().backward()
            opt.step()
        np.testing.assert_array_equal(a.data, b.data)

    def test_state_tensor_names(self):
        w = Tensor([1.0], requires_grad=True)
        opt = Adam({"enc0.weight": w})
        assert opt.state_tensors() == {}
        w.grad = np.array([1.0], dtype=np.float32)
        opt.step()
        assert set(opt.state_tensors()) == {"m.enc0.weight", "v.enc0.weight"}
