"""Backprop baseline tests: gradient checks, descent sanity, FF equivalence."""

import numpy as np
import pytest

from ffmlp import bp, datasets, network
from ffmlp.errors import ParameterError
from ffmlp.pipeline import fit_ffmlp


def finite_difference_grads(net, x, y, h=1e-5):
    """Central differences on every weight and bias."""
    gw = [np.zeros_like(w) for w in net.weights]
    gb = [np.zeros_like(b) for b in net.biases]
    for i, w in enumerate(net.weights):
        it = np.nditer(w, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = w[idx]
            w[idx] = orig + h
            up = bp.batch_loss(net, x, y)
            w[idx] = orig - h
            down = bp.batch_loss(net, x, y)
            w[idx] = orig
            gw[i][idx] = (up - down) / (2 * h)
    for i, b in enumerate(net.biases):
        for j in range(b.size):
            orig = b[j]
            b[j] = orig + h
            up = bp.batch_loss(net, x, y)
            b[j] = orig - h
            down = bp.batch_loss(net, x, y)
            b[j] = orig
            gb[i][j] = (up - down) / (2 * h)
    return gw, gb


def assert_grads_close(analytic, numeric, rel=1e-4):
    for a, n in zip(analytic, numeric):
        scale = np.maximum(np.abs(n), 1e-3)
        assert np.all(np.abs(a - n) / scale <= rel), np.max(np.abs(a - n) / scale)


class TestGradients:
    @pytest.mark.parametrize("arch", [(3, 4, 5, 3), (2, 6, 4, 2), (5, 2, 3, 4)])
    def test_matches_finite_differences(self, arch):
        rng = np.random.default_rng(sum(arch))
        net = bp.init_xavier(arch, seed=1)
        # break bias symmetry so numeric derivatives are informative
        for b in net.biases:
            b += rng.normal(scale=0.1, size=b.shape)
        x = rng.normal(size=(7, arch[0]))
        y = rng.integers(0, arch[-1], size=7)
        gw, gb = bp.gradients(net, x, y)
        fw, fb = finite_difference_grads(net, x, y)
        assert_grads_close(gw, fw)
        assert_grads_close(gb, fb)

    def test_single_sample_gradient(self):
        net = bp.init_xavier((2, 3, 3, 2), seed=4)
        x = np.array([[0.3, -1.2]])
        y = np.array([1])
        gw, gb = bp.gradients(net, x, y)
        fw, fb = finite_difference_grads(net, x, y)
        assert_grads_close(gw, fw)
        assert_grads_close(gb, fb)

    def test_zero_weight_network_output_bias_grad(self):
        arch = (3, 4, 4, 3)
        net = bp.BPNet(
            [np.zeros((4, 3)), np.zeros((4, 4)), np.zeros((3, 4))],
            [np.zeros(4), np.zeros(4), np.zeros(3)],
        )
        x = np.random.default_rng(0).normal(size=(6, 3))
        y = np.array([0, 1, 2, 0, 1, 2])
        _, gb = bp.gradients(net, x, y)
        onehot = np.zeros((6, 3))
        onehot[np.arange(6), y] = 1.0
        expected = (np.full((6, 3), 1.0 / 3) - onehot).sum(axis=0) / 6
        assert np.allclose(gb[-1], expected, atol=1e-12)

    def test_dead_relu_blocks_gradient(self):
        net = bp.init_xavier((2, 3, 3, 2), seed=0)
        net.biases[0][:] = -100.0  # all first-layer units dead everywhere
        x = np.random.default_rng(1).normal(size=(5, 2))
        y = np.array([0, 1, 0, 1, 0])
        gw, _ = bp.gradients(net, x, y)
        assert np.all(gw[0] == 0.0)


class TestTraining:
    def test_zero_learning_rate_keeps_weights(self):
        ds = datasets.gen_xor(30, 2.0, 0.5, seed=2)
        cfg = bp.TrainConfig(epochs=3, learning_rate=0.0, seed=0)
        net0 = bp.init_xavier((2, 4, 4, 2), seed=0)
        net, hist = bp.train_bp((2, 4, 4, 2), None, ds.samples, ds.labels, ds.samples, ds.labels, cfg)
        for w0, w1 in zip(net0.weights, net.weights):
            assert np.array_equal(w0, w1)
        assert len(set(hist.train_acc)) == 1

    def test_history_lengths(self):
        ds = datasets.gen_xor(20, 2.0, 0.5, seed=3)
        cfg = bp.TrainConfig(epochs=4, seed=0)
        _, hist = bp.train_bp((2, 4, 4, 2), None, ds.samples, ds.labels, ds.samples, ds.labels, cfg)
        assert len(hist.train_acc) == len(hist.test_acc) == len(hist.loss) == 4

    def test_deterministic_under_seed(self):
        ds = datasets.gen_xor(40, 2.0, 0.5, seed=5)
        cfg = bp.TrainConfig(epochs=3, seed=9)
        net_a, hist_a = bp.train_bp((2, 4, 4, 2), None, ds.samples, ds.labels, ds.samples, ds.labels, cfg)
        net_b, hist_b = bp.train_bp((2, 4, 4, 2), None, ds.samples, ds.labels, ds.samples, ds.labels, cfg)
        for wa, wb in zip(net_a.weights, net_b.weights):
            assert np.array_equal(wa, wb)
        assert hist_a.loss == hist_b.loss

    def test_loss_decreases_on_repeated_batch(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(16, 3))
        y = rng.integers(0, 2, size=16)
        net = bp.init_xavier((3, 5, 4, 2), seed=2)
        losses = [bp.batch_loss(net, x, y)]
        for _ in range(10):
            _, gw, gb = bp.loss_and_gradients(net, x, y)
            for i in range(3):
                net.weights[i] -= 0.01 * gw[i]
                net.biases[i] -= 0.01 * gb[i]
            losses.append(bp.batch_loss(net, x, y))
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_from_ff_epochs_zero_reproduces_predictions(self):
        ds = datasets.gen_xor(150, 2.0, 0.6, seed=7)
        result = fit_ffmlp(ds, 2, threshold=0.1, gmm_seed=4, sample_mode="raw")
        cfg = bp.TrainConfig(epochs=0, init="from_ff", seed=0)
        net, hist = bp.train_bp(
            result.layer_sizes, result.network, ds.samples, ds.labels, ds.samples, ds.labels, cfg
        )
        ff_pred = network.predict_batch(result.network, ds.samples)
        bp_pred = bp.predict(net, ds.samples, fallback_class=result.network.fallback_class)
        assert np.array_equal(ff_pred, bp_pred)
        assert hist.train_acc == []

    def test_arch_mismatch_rejected(self):
        ds = datasets.gen_xor(50, 2.0, 0.5, seed=8)
        result = fit_ffmlp(ds, 2, threshold=0.1, gmm_seed=5, sample_mode="raw")
        cfg = bp.TrainConfig(epochs=1, init="from_ff", seed=0)
        with pytest.raises(ParameterError):
            bp.train_bp((2, 8, 4, 2), result.network, ds.samples, ds.labels, ds.samples, ds.labels, cfg)

    def test_xavier_bounds(self):
        net = bp.init_xavier((10, 20, 20, 5), seed=3)
        for w, (fi, fo) in zip(net.weights, [(10, 20), (20, 20), (20, 5)]):
            a = np.sqrt(6.0 / (fi + fo))
            assert np.all(np.abs(w) <= a)
        for b in net.biases:
            assert np.all(b == 0.0)
