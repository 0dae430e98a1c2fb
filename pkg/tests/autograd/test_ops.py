"""Tests for the differentiable operators"""

import math

import numpy as np
import pytest

from src.autograd import ops
from src.autograd.gradcheck import check_gradients
from src.autograd.tensor import Tensor, precision
from src.core.exceptions import ShapeMismatchError


def naive_conv2d(x, w, b, stride, pad):
    """Six nested loops, cross-correlation convention"""
    n, c, h, wd = x.shape
    c_out, _, k, _ = w.shape
    xp = np.zeros((n, c, h + 2 * pad, wd + 2 * pad))
    xp[:, :, pad : pad + h, pad : pad + wd] = x
    oh = (h + 2 * pad - k) // stride + 1
    ow = (wd + 2 * pad - k) // stride + 1
    out = np.zeros((n, c_out, oh, ow))
    for i in range(n):
        for o in range(c_out):
            for y in range(oh):
                for x_ in range(ow):
                    acc = b[o]
                    for ci in range(c):
                        for ky in range(k):
                            for kx in range(k):
                                acc += (
                                    xp[i, ci, y * stride + ky, x_ * stride + kx] * w[o, ci, ky, kx]
                                )
                    out[i, o, y, x_] = acc
    return out


class TestConvolution:
    def test_identity_kernel(self):
        x = np.random.default_rng(0).standard_normal((2, 3, 5, 5))
        w = np.eye(3).reshape(3, 3, 1, 1)
        out = ops.conv2d(Tensor(x), Tensor(w))
        np.testing.assert_allclose(out.data, x.astype(np.float32))

    def test_all_ones_sum(self):
        out = ops.conv2d(Tensor(np.ones((1, 1, 3, 3))), Tensor(np.ones((1, 1, 3, 3))))
        assert out.shape == (1, 1, 1, 1)
        assert out.item() == 9.0

    @pytest.mark.parametrize("stride,pad", [(1, 0), (2, 1), (1, 2), (3, 1)])
    def test_matches_naive_loops(self, stride, pad):
        rng = np.random.default_rng(stride * 10 + pad)
        x = rng.standard_normal((2, 3, 8, 8))
        w = rng.standard_normal((4, 3, 3, 3))
        b = rng.standard_normal(4)
        with precision("float64"):
            out = ops.conv2d(Tensor(x), Tensor(w), Tensor(b), stride=stride, pad=pad)
        np.testing.assert_allclose(out.data, naive_conv2d(x, w, b, stride, pad), atol=1e-5)

    @pytest.mark.parametrize(
        "h,k,stride,pad", [(8, 3, 1, 1), (8, 4, 2, 1), (7, 3, 2, 0), (5, 5, 1, 2)]
    )
    def test_output_shape_formula(self, h, k, stride, pad):
        x = Tensor(np.zeros((1, 2, h, h)))
        w = Tensor(np.zeros((3, 2, k, k)))
        out = ops.conv2d(x, w, stride=stride, pad=pad)
        expected = (h + 2 * pad - k) // stride + 1
        assert out.shape == (1, 3, expected, expected)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            ops.conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 3, 3, 3))))

    def test_transpose_identity(self):
        x = np.random.default_rng(1).standard_normal((1, 2, 4, 4))
        out = ops.conv2d_transpose(Tensor(x), Tensor(np.eye(2).reshape(2, 2, 1, 1)))
        np.testing.assert_allclose(out.data, x.astype(np.float32))

    def test_transpose_doubles(self):
        x = Tensor(np.zeros((1, 4, 8, 8)))
        w = Tensor(np.zeros((4, 2, 4, 4)))
        assert ops.conv2d_transpose(x, w, stride=2, pad=1).shape == (1, 2, 16, 16)

    @pytest.mark.parametrize(
        "h,k,stride,pad", [(4, 4, 2, 1), (3, 3, 1, 1), (5, 3, 2, 0), (2, 1, 1, 0)]
    )
    def test_transpose_shape_formula(self, h, k, stride, pad):
        out = ops.conv2d_transpose(
            Tensor(np.zeros((2, 3, h, h))), Tensor(np.zeros((3, 5, k, k))), stride=stride, pad=pad
        )
        expected = (h - 1) * stride - 2 * pad + k
        assert out.shape == (2, 5, expected, expected)

    def test_adjointness(self):
        rng = np.random.default_rng(2024)
        with precision("float64"):
            for _ in range(20):
                k = int(rng.integers(1, 5))
                stride = int(rng.integers(1, 3))
                pad = int(rng.integers(0, k))
                oh = int(rng.integers(2, 6))
                h = (oh - 1) * stride + k - 2 * pad
                if h < 1:
                    h, pad = (oh - 1) * stride + k, 0
                c_in, c_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
                x = rng.standard_normal((2, c_in, h, h))
                y = rng.standard_normal((2, c_out, oh, oh))
                w = Tensor(rng.standard_normal((c_out, c_in, k, k)))
                forward = ops.conv2d(Tensor(x), w, stride=stride, pad=pad).data
                adjoint = ops.conv2d_transpose(Tensor(y), w, stride=stride, pad=pad).data
                assert forward.shape == y.shape
                assert adjoint.shape == x.shape
                lhs = float(np.sum(forward * y))
                rhs = float(np.sum(x * adjoint))
                assert abs(lhs - rhs) <= 1e-4 * max(abs(lhs), abs(rhs), 1.0)

    def test_transpose_is_input_gradient_of_conv(self):
        rng = np.random.default_rng(5)
        with precision("float64"):
            x = Tensor(rng.standard_normal((1, 2, 8, 8)), requires_grad=True)
            w = Tensor(rng.standard_normal((3, 2, 4, 4)))
            g = rng.standard_normal((1, 3, 4, 4))
            out = ops.conv2d(x, w, stride=2, pad=1)
            (out * Tensor(g)).sum().backward()
            through_transpose = ops.conv2d_transpose(Tensor(g), w, stride=2, pad=1).data
        np.testing.assert_allclose(x.grad, through_transpose, atol=1e-10)


class TestNormalization:
    def test_constant_plane_gives_bias(self):
        x = Tensor(np.full((1, 2, 4, 4), 7.0))
        out = ops.instance_norm(x, Tensor([2.0, 3.0]), Tensor([0.5, -1.0]))
        np.testing.assert_allclose(out.data[0, 0], 0.5)
        np.testing.assert_allclose(out.data[0, 1], -1.0)

    def test_plane_statistics(self):
        rng = np.random.default_rng(3)
        x = Tensor(rng.standard_normal((2, 3, 16, 16)) * 4 + 2)
        gain, bias = np.array([1.0, 0.5, 2.0]), np.array([0.0, 1.0, -3.0])
        out = ops.instance_norm(x, Tensor(gain), Tensor(bias)).data
        for n in range(2):
            for c in range(3):
                assert out[n, c].mean() == pytest.approx(bias[c], abs=1e-3)
                assert out[n, c].std() == pytest.approx(gain[c], abs=1e-3)


class TestElementwise:
    def test_l1_of_equal_is_zero(self):
        a = Tensor(np.random.default_rng(0).standard_normal((1, 3, 4, 4)))
        assert ops.l1_loss(a, a).item() == 0.0

    def test_bce_at_zero_logit(self):
        loss = ops.bce_with_logits(Tensor(np.zeros((1, 1, 2, 2))), 1.0)
        assert loss.item() == pytest.approx(math.log(2), abs=1e-6)

    def test_bce_stable_for_large_logits(self):
        logits = Tensor(np.array([[[[1000.0, -1000.0]]]]))
        targets = Tensor(np.array([[[[1.0, 0.0]]]]))
        loss = ops.bce_with_logits(logits, targets)
        assert np.isfinite(loss.item())
        assert loss.item() == pytest.approx(0.0, abs=1e-6)

    def test_activations(self):
        x = Tensor([-2.0, 0.0, 3.0])
        np.testing.assert_allclose(ops.relu(x).data, [0.0, 0.0, 3.0])
        np.testing.assert_allclose(ops.leaky_relu(x, 0.2).data, [-0.4, 0.0, 3.0])
        np.testing.assert_allclose(ops.tanh(x).data, np.tanh([-2.0, 0.0, 3.0]), rtol=1e-6)
        np.testing.assert_allclose(ops.sigmoid(x).data[1], 0.5)

    def test_sigmoid_extremes(self):
        out = ops.sigmoid(Tensor([-1000.0, 1000.0])).data
        assert np.all(np.isfinite(out))
        np.testing.assert_allclose(out, [0.0, 1.0])

    def test_dropout_eval_is_identity(self):
        x = Tensor(np.ones((1, 1, 4, 4)))
        assert ops.dropout(x, 0.5, training=False) is x

    def test_dropout_training_scales(self):
        x = Tensor(np.ones((1, 4, 8, 8)))
        out = ops.dropout(x, 0.5, training=True, rng=np.random.default_rng(0)).data
        assert set(np.unique(out)) <= {0.0, 2.0}
        assert 0 < (out == 0).sum() < out.size

    def test_dropout_needs_generator(self):
        with pytest.raises(ValueError):
            ops.dropout(Tensor(np.ones((1, 1, 2, 2))), 0.5, training=True)

    def test_concat_channels(self):
        a = Tensor(np.zeros((2, 3, 4, 4)), requires_grad=True)
        b = Tensor(np.ones((2, 1, 4, 4)), requires_grad=True)
        out = ops.concat_channels(a, b)
        assert out.shape == (2, 4, 4, 4)
        (out * 2.0).sum().backward()
        np.testing.assert_allclose(a.grad, np.full(a.shape, 2.0))
        np.testing.assert_allclose(b.grad, np.full(b.shape, 2.0))

    def test_concat_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            ops.concat_channels(Tensor(np.zeros((1, 3, 4, 4))), Tensor(np.zeros((1, 3, 2, 2))))

    def test_loss_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            ops.l1_loss(Tensor(np.zeros((1, 3, 4, 4))), Tensor(np.zeros((1, 3, 4, 5))))


class TestPooling:
    def test_max_pool(self):
        x = Tensor(np.arange(16.0).reshape(1, 1, 4, 4))
        np.testing.assert_array_equal(ops.max_pool2d(x).data[0, 0], [[5, 7], [13, 15]])

    def test_max_pool_odd_size(self):
        with pytest.raises(ShapeMismatchError):
            ops.max_pool2d(Tensor(np.zeros((1, 1, 5, 5))))

    def test_max_pool_routes_to_maximum(self):
        x = Tensor(np.arange(16.0).reshape(1, 1, 4, 4), requires_grad=True)
        ops.max_pool2d(x).sum().backward()
        expected = np.zeros((4, 4))
        expected[1, 1] = expected[1, 3] = expected[3, 1] = expected[3, 3] = 1
        np.testing.assert_array_equal(x.grad[0, 0], expected)

    def test_global_avg_pool(self):
        x = Tensor(np.arange(8.0).reshape(1, 2, 2, 2))
        np.testing.assert_allclose(ops.global_avg_pool(x).data, [[1.5, 5.5]])

    def test_linear(self):
        x = Tensor([[1.0, 2.0]])
        w = Tensor([[1.0, 0.0], [0.5, 0.5]])
        out = ops.linear(x, w, Tensor([0.0, 1.0]))
        np.testing.assert_allclose(out.data, [[1.0, 2.5]])


def _spread(rng, shape, gap=0.1):
    """Values at least `gap` apart and away from zero, for kinked operators"""
    size = int(np.prod(shape))
    values = (rng.permutation(size) + 1) * gap * rng.choice([-1.0, 1.0], size)
    return values.reshape(shape)


def _cases(rng):
    normal = rng.standard_normal

    def t(a):
        return Tensor(a, requires_grad=True)

    yield "conv2d", lambda x, w, b: ops.conv2d(x, w, b, stride=2, pad=1), [
        t(normal((2, 3, 6, 6))),
        t(normal((4, 3, 3, 3))),
        t(normal(4)),
    ]
    yield "conv2d_transpose", lambda x, w, b: ops.conv2d_transpose(x, w, b, stride=2, pad=1), [
        t(normal((1, 3, 3, 3))),
        t(normal((3, 4, 4, 4))),
        t(normal(4)),
    ]
    yield "instance_norm", ops.instance_norm, [
        t(normal((2, 3, 4, 4))),
        t(normal(3)),
        t(normal(3)),
    ]
    yield "leaky_relu", lambda x: ops.leaky_relu(x, 0.2), [t(_spread(rng, (1, 2, 3, 3)))]
    yield "relu", ops.relu, [t(_spread(rng, (1, 2, 3, 3)))]
    yield "tanh", ops.tanh, [t(normal((1, 2, 3, 3)))]
    yield "sigmoid", ops.sigmoid, [t(normal((1, 2, 3, 3)))]
    yield "dropout", lambda x: ops.dropout(x, 0.3, True, np.random.default_rng(11)), [
        t(normal((1, 2, 4, 4)))
    ]
    yield "concat_channels", ops.concat_channels, [
        t(normal((1, 2, 3, 3))),
        t(normal((1, 1, 3, 3))),
    ]
    yield "l1_loss", lambda a, b: ops.l1_loss(a, b), [
        t(_spread(rng, (1, 1, 3, 3))),
        t(np.zeros((1, 1, 3, 3))),
    ]
    yield "mse_loss", ops.mse_loss, [t(normal((1, 2, 3, 3))), t(normal((1, 2, 3, 3)))]
    yield "bce_with_logits", ops.bce_with_logits, [
        t(normal((1, 1, 3, 3))),
        t(rng.random((1, 1, 3, 3))),
    ]
    yield "max_pool2d", ops.max_pool2d, [t(_spread(rng, (1, 2, 4, 4)))]
    yield "global_avg_pool", ops.global_avg_pool, [t(normal((2, 3, 4, 4)))]
    yield "linear", ops.linear, [t(normal((3, 5))), t(normal((2, 5))), t(normal(2))]


CASE_NAMES = [name for name, _, _ in _cases(np.random.default_rng(0))]


@pytest.mark.parametrize("mode,tolerance", [("float32", 1e-2), ("float64", 1e-4)])
@pytest.mark.parametrize("name", CASE_NAMES)
def test_gradients_match_finite_differences(name, mode, tolerance):
    with precision(mode):
        cases = {n: (fn, inputs) for n, fn, inputs in _cases(np.random.default_rng(17))}
        fn, inputs = cases[name]
        result = check_gradients(fn, inputs, n_points=10, seed=3)
    assert result.checked > 0
    assert result.passed(tolerance), f"{name}: {result.per_input}"


def _tiny_net(x, w1, g1, b1, w2, w3, b3, smooth):
    act = ops.tanh if smooth else (lambda v: ops.leaky_relu(v, 0.2))
    h = act(ops.instance_norm(ops.conv2d(x, w1, stride=1, pad=1), g1, b1))
    h = act(ops.conv2d_transpose(h, w2, stride=2, pad=1))
    logits = ops.linear(ops.global_avg_pool(h), w3, b3)
    return ops.bce_with_logits(logits, 1.0)


@pytest.mark.parametrize("mode,tolerance", [("float32", 1e-2), ("float64", 1e-4)])
def test_three_layer_network_gradients(mode, tolerance):
    rng = np.random.default_rng(8)
    with precision(mode):
        params = [
            Tensor(rng.standard_normal((1, 3, 4, 4)), requires_grad=True),
            Tensor(rng.standard_normal((4, 3, 3, 3)) * 0.5, requires_grad=True),
            Tensor(rng.standard_normal(4), requires_grad=True),
            Tensor(rng.standard_normal(4), requires_grad=True),
            Tensor(rng.standard_normal((4, 2, 4, 4)) * 0.5, requires_grad=True),
            Tensor(rng.standard_normal((1, 2)), requires_grad=True),
            Tensor(rng.standard_normal(1), requires_grad=True),
        ]
        smooth = mode == "float32"
        result = check_gradients(
            lambda *p: _tiny_net(*p, smooth=smooth), params, n_points=10, seed=1
        )
    assert len(result.per_input) == 7
    assert result.passed(tolerance), result.per_input
