import math

import numpy as np
import pytest

from conftest import relative_grad_error
from levyforge.data import make_windows
from levyforge.errors import ContractError, ParseError, ShapeError, TrainingError
from levyforge.neural import (
    DenseNet,
    LstmHyper,
    adam_step,
    dense_backward,
    dense_forward,
    init_adam,
    init_dense,
    init_lstm,
    load_dense,
    load_lstm,
    lstm_bptt,
    lstm_forward,
    save_dense,
    save_lstm,
    train_lstm,
)
from levyforge.neural.lstm import _backward_batch, _forward_batch


class TestDenseForward:
    def test_identity_rectifier(self):
        net = DenseNet((2, 2), [np.eye(2)], [np.zeros(2)])
        # single affine layer is the output layer (linear); add a hidden one
        net = DenseNet((2, 2, 1), [np.eye(2), np.ones((1, 2))], [np.zeros(2), np.zeros(1)])
        out, cache = dense_forward(net, [1.0, -2.0])
        assert np.allclose(cache["activations"][1], [1.0, 0.0])

    def test_bias_passthrough(self):
        net = DenseNet(
            (3, 2, 1),
            [np.zeros((2, 3)), np.zeros((1, 2))],
            [np.zeros(2), np.array([3.0])],
        )
        for x in ([0.0, 0.0, 0.0], [5.0, -1.0, 2.0]):
            out, _ = dense_forward(net, x)
            assert np.allclose(out, [3.0])

    def test_hand_computed_2_3_1(self):
        w0 = np.array([[0.5, -1.0], [2.0, 0.25], [-0.5, 0.75]])
        b0 = np.array([0.1, -0.2, 0.3])
        w1 = np.array([[1.0, -2.0, 0.5]])
        b1 = np.array([-0.4])
        net = DenseNet((2, 3, 1), [w0, b0 * 0 + w0 @ np.zeros(2) + b0], [b0, b1])
        net = DenseNet((2, 3, 1), [w0, w1], [b0, b1])
        x = np.array([1.5, -0.5])
        hidden = np.maximum(w0 @ x + b0, 0.0)
        expected = w1 @ hidden + b1
        out, _ = dense_forward(net, x)
        assert np.allclose(out, expected, atol=1e-12)

    def test_shape_error(self):
        net = init_dense((4, 3, 2), seed=0)
        with pytest.raises(ShapeError):
            dense_forward(net, [1.0, 2.0])


class TestDenseBackward:
    def test_linear_closed_form(self):
        # y = w x + b, L = (y - t)^2: dL/dw = 2 (y - t) x
        net = DenseNet((1, 1), [np.array([[0.7]])], [np.array([0.2])])
        x, t = np.array([1.3]), 2.0
        y, cache = dense_forward(net, x)
        grads = dense_backward(net, cache, 2.0 * (y - t))
        assert grads[0][0, 0] == pytest.approx(2.0 * (y[0] - t) * x[0], rel=1e-12)
        assert grads[1][0] == pytest.approx(2.0 * (y[0] - t), rel=1e-12)

    def test_dead_rectifier_zero_gradient(self):
        w0 = np.array([[1.0]])
        net = DenseNet((1, 1, 1), [w0, np.array([[2.0]])], [np.zeros(1), np.zeros(1)])
        y, cache = dense_forward(net, [-3.0])  # pre-activation negative
        grads = dense_backward(net, cache, np.array([1.0]))
        assert grads[0][0, 0] == 0.0

    def test_stale_cache(self):
        net_a = init_dense((2, 3, 1), seed=1)
        net_b = init_dense((2, 3, 1), seed=2)
        _, cache = dense_forward(net_a, [0.5, 0.5])
        with pytest.raises(ContractError):
            dense_backward(net_b, cache, np.array([1.0]))

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for trial in range(20):
            net = init_dense((4, 8, 8, 3), seed=trial)
            x = rng.standard_normal(4)
            target = rng.standard_normal(3)
            y, cache = dense_forward(net, x)
            grads = dense_backward(net, cache, 2.0 * (y - target))
            for pi, p in enumerate(net.params):
                flat = p.ravel()
                for idx in range(flat.size):
                    h, orig = 1e-5, flat[idx]
                    flat[idx] = orig + h
                    yp, _ = dense_forward(net, x)
                    flat[idx] = orig - h
                    ym, _ = dense_forward(net, x)
                    flat[idx] = orig
                    fd = (np.sum((yp - target) ** 2) - np.sum((ym - target) ** 2)) / (2 * h)
                    worst = max(worst, relative_grad_error(grads[pi].ravel()[idx], fd))
        assert worst < 1e-6


class TestAdam:
    def test_zero_gradient_identity(self):
        params = [np.array([1.0, -2.0]), np.array([[0.5]])]
        state = init_adam(params, lr=0.1)
        new_params, new_state = adam_step(state, params, [np.zeros(2), np.zeros((1, 1))])
        assert all(np.array_equal(a, b) for a, b in zip(params, new_params))
        assert new_state.t == 1

    def test_first_step_bias_corrected(self):
        state = init_adam([np.array([0.0])], lr=0.1)
        new_params, _ = adam_step(state, [np.array([0.0])], [np.array([1.0])])
        # m_hat = 1, v_hat = 1 after correction: step = -lr / (1 + eps)
        assert new_params[0][0] == pytest.approx(-0.1, rel=1e-6)

    def test_determinism(self):
        params = [np.array([0.3])]
        grads = [np.array([0.7])]
        state = init_adam(params, lr=0.05)
        a, _ = adam_step(state, params, grads)
        b, _ = adam_step(state, params, grads)
        assert np.array_equal(a[0], b[0])

    def test_sign_sgd_limit(self):
        state = init_adam([np.array([0.0])], lr=0.1, beta1=0.0, beta2=0.0, epsilon=1e-300)
        new_params, _ = adam_step(state, [np.array([0.0])], [np.array([-3.7])])
        assert new_params[0][0] == pytest.approx(0.1, rel=1e-12)

    def test_shape_mismatch(self):
        state = init_adam([np.zeros(2)], lr=0.1)
        with pytest.raises(ShapeError):
            adam_step(state, [np.zeros(2)], [np.zeros(3)])


class TestLstmForward:
    def test_zero_weights(self):
        w = init_lstm(1, 4, seed=0)
        zero = w.replace_params([np.zeros_like(p) for p in w.params])
        pred, traj = lstm_forward(zero, np.ones((5, 1)))
        assert pred == 0.0
        assert np.all(traj["h"] == 0.0)

    def test_head_bias_passthrough(self):
        w = init_lstm(1, 4, seed=0)
        params = [np.zeros_like(p) for p in w.params]
        params[-1] = np.array(1.25)
        zero = w.replace_params(params)
        pred, _ = lstm_forward(zero, np.ones((3, 1)))
        assert pred == pytest.approx(1.25)

    def test_saturated_forget_gate(self):
        w = init_lstm(1, 3, seed=1)
        params = [np.zeros_like(p) for p in w.params]
        params[4] = np.full(3, 10.0)   # b_f
        params[5] = np.full(3, -10.0)  # b_i (input gate shut)
        params[6] = np.full(3, 0.8)    # b_c
        sat = w.replace_params(params)
        _, traj = lstm_forward(sat, np.random.default_rng(2).normal(size=(6, 1)))
        assert np.all(traj["f"] > 0.9999)
        cells = np.vstack([np.zeros(3), traj["c"]])
        assert np.max(np.abs(np.diff(cells, axis=0))) < 1e-3

    def test_hand_computed_single_step(self):
        w = init_lstm(1, 1, seed=3)
        vals = dict(w_f=0.3, w_i=-0.2, w_c=0.5, w_o=0.4, b_f=0.1, b_i=0.2,
                    b_c=-0.1, b_o=0.0, w_y=1.5, b_y=0.25)
        params = [
            np.array([[vals["w_f"], 0.0]]), np.array([[vals["w_i"], 0.0]]),
            np.array([[vals["w_c"], 0.0]]), np.array([[vals["w_o"], 0.0]]),
            np.array([vals["b_f"]]), np.array([vals["b_i"]]),
            np.array([vals["b_c"]]), np.array([vals["b_o"]]),
            np.array([vals["w_y"]]), np.array(vals["b_y"]),
        ]
        net = w.replace_params(params)
        x = 0.7
        sig = lambda z: 1.0 / (1.0 + math.exp(-z))
        f = sig(vals["w_f"] * x + vals["b_f"])
        i = sig(vals["w_i"] * x + vals["b_i"])
        g = math.tanh(vals["w_c"] * x + vals["b_c"])
        o = sig(vals["w_o"] * x + vals["b_o"])
        c = i * g
        h = o * math.tanh(c)
        expected = vals["w_y"] * h + vals["b_y"]
        pred, _ = lstm_forward(net, [[x]])
        assert pred == pytest.approx(expected, abs=1e-12)

    def test_gate_bounds(self):
        w = init_lstm(2, 6, seed=4)
        _, traj = lstm_forward(w, np.random.default_rng(5).normal(size=(8, 2)) * 3.0)
        for name in ("f", "i", "o"):
            assert np.all((traj[name] > 0.0) & (traj[name] < 1.0))
        assert np.all(np.abs(traj["g"]) < 1.0)
        assert np.all(np.abs(traj["h"]) < 1.0)

    def test_forward_determinism(self):
        w = init_lstm(1, 5, seed=6)
        seq = np.random.default_rng(7).normal(size=(10, 1))
        a, _ = lstm_forward(w, seq)
        b, _ = lstm_forward(w, seq)
        assert a == b

    def test_shape_error(self):
        w = init_lstm(2, 3, seed=8)
        with pytest.raises(ShapeError):
            lstm_forward(w, np.ones((4, 3)))


class TestLstmBptt:
    def test_head_bias_gradient_zero_dynamics(self):
        w = init_lstm(1, 4, seed=0)
        zero = w.replace_params([np.zeros_like(p) for p in w.params])
        target = -0.6
        grads = lstm_bptt(zero, np.ones((4, 1)), target)
        pred = 0.0
        assert grads[-1] == pytest.approx(2.0 * (pred - target))

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for trial in range(20):
            w = init_lstm(2, 4, seed=100 + trial)
            seq = rng.standard_normal((3, 2))
            target = rng.standard_normal()
            grads = lstm_bptt(w, seq, target)
            for pi, p in enumerate(w.params):
                flat = np.atleast_1d(p.reshape(-1))
                for idx in range(flat.size):
                    h, orig = 1e-5, flat[idx]
                    flat[idx] = orig + h
                    pp, _ = lstm_forward(w, seq)
                    flat[idx] = orig - h
                    pm, _ = lstm_forward(w, seq)
                    flat[idx] = orig
                    fd = ((pp - target) ** 2 - (pm - target) ** 2) / (2 * h)
                    an = np.atleast_1d(grads[pi].reshape(-1))[idx]
                    worst = max(worst, relative_grad_error(an, fd))
        assert worst < 1e-5

    def test_gradient_linearity(self):
        # doubling dL/dpred doubles every gradient
        w = init_lstm(1, 3, seed=9)
        seq = np.random.default_rng(10).normal(size=(4, 1, 1))
        _, cache = _forward_batch(w, seq.transpose(1, 0, 2))
        g1 = _backward_batch(w, cache, np.array([1.0]))
        g2 = _backward_batch(w, cache, np.array([2.0]))
        for a, b in zip(g1, g2):
            assert np.allclose(2.0 * a, b, atol=1e-14)


class TestTrainLstm:
    def test_constant_target(self):
        series = np.concatenate([np.linspace(0.2, 0.8, 40), np.full(20, 0.5)])
        data = make_windows(np.full(60, 0.5), lookback=4, horizon=1)
        weights, trace = train_lstm(data, LstmHyper(hidden_size=4, lr=0.05, epochs=200, seed=0))
        assert trace[-1] < 1e-6

    def test_noiseless_ar1(self):
        # x_{t+1} = 0.9 x_t + 0.05, learnable to high precision
        x = np.empty(160)
        x[0] = 1.0
        for t in range(159):
            x[t + 1] = 0.9 * x[t] + 0.05
        data = make_windows(x, lookback=2, horizon=1)
        cut = int(len(data) * 0.8)
        from levyforge.data import WindowedDataset

        train = WindowedDataset(data.inputs[:cut], data.targets[:cut], 2, 1)
        weights, _ = train_lstm(train, LstmHyper(hidden_size=8, lr=0.05, epochs=400, seed=1))
        preds, _ = _forward_batch(weights, data.inputs[cut:][:, :, None])
        mse = float(np.mean((preds - data.targets[cut:, 0]) ** 2))
        assert mse < 1e-4

    def test_seed_determinism(self):
        data = make_windows(np.sin(np.linspace(0.0, 6.0, 80)), lookback=3, horizon=1)
        hyper = LstmHyper(hidden_size=4, lr=0.02, epochs=50, seed=7)
        _, trace_a = train_lstm(data, hyper)
        _, trace_b = train_lstm(data, hyper)
        assert trace_a == trace_b

    def test_divergence_error_names_epoch(self):
        data = make_windows(np.sin(np.linspace(0.0, 6.0, 60)) * 100.0, lookback=3, horizon=1)
        with pytest.raises(TrainingError, match="epoch"):
            train_lstm(data, LstmHyper(hidden_size=4, lr=1e12, epochs=500, seed=0))

    def test_regularization_hooks(self):
        data = make_windows(np.sin(np.linspace(0.0, 6.0, 80)), lookback=3, horizon=1)
        hyper = LstmHyper(hidden_size=4, lr=0.02, epochs=30, seed=3, dropout=0.3, weight_decay=1e-4)
        _, trace_a = train_lstm(data, hyper)
        _, trace_b = train_lstm(data, hyper)
        assert all(np.isfinite(trace_a))
        assert trace_a == trace_b


class TestCheckpoints:
    def test_dense_round_trip(self):
        net = init_dense((3, 5, 2), seed=11)
        restored = load_dense(save_dense(net))
        assert restored.layer_dims == net.layer_dims
        for a, b in zip(net.params, restored.params):
            assert np.array_equal(a, b)

    def test_lstm_round_trip(self):
        w = init_lstm(2, 4, seed=12)
        restored = load_lstm(save_lstm(w))
        for a, b in zip(w.params, restored.params):
            assert np.array_equal(a, b)

    def test_version_check(self):
        net = init_dense((2, 2), seed=13)
        text = save_dense(net).replace("levyforge-nn-1", "levyforge-nn-0")
        with pytest.raises(ParseError):
            load_dense(text)

    def test_kind_check(self):
        net = init_dense((2, 2), seed=14)
        with pytest.raises(ParseError):
            load_lstm(save_dense(net))
