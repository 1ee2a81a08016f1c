"""From-scratch SGD backprop baseline on the same (d, 2L, D2, C) architecture.

ReLU after both intermediate layers, softmax cross-entropy at the output
(log-sum-exp form), plain mini-batch SGD with optional momentum. The shuffle
order of epoch e is drawn from (seed, e), so runs are reproducible and
independent seeds can execute concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericError, ParameterError
from .network import FFNetwork

DEFAULT_BATCH_SIZE = 4


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float = 0.01
    momentum: float = 0.0
    batch_size: int = DEFAULT_BATCH_SIZE
    init: str = "xavier_uniform"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ParameterError("epochs must be non-negative")
        if self.learning_rate < 0:
            raise ParameterError("learning_rate must be non-negative")
        if self.momentum < 0:
            raise ParameterError("momentum must be non-negative")
        if self.batch_size < 1:
            raise ParameterError("batch_size must be at least 1")
        if self.init not in ("xavier_uniform", "from_ff"):
            raise ParameterError(f"unknown init {self.init!r}")


@dataclass
class TrainHistory:
    """Per-epoch train/test accuracy and mean training loss."""

    train_acc: list[float] = field(default_factory=list)
    test_acc: list[float] = field(default_factory=list)
    loss: list[float] = field(default_factory=list)


@dataclass
class BPNet:
    """Weight matrices (out, in) and bias vectors for the three dense layers."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "BPNet":
        return BPNet([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_xavier(arch: tuple[int, int, int, int], seed: int) -> BPNet:
    """Xavier-uniform weights, +-sqrt(6/(fan_in+fan_out)); zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(arch[:-1], arch[1:]):
        a = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-a, a, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return BPNet(weights, biases)


def init_from_ff(net: FFNetwork) -> BPNet:
    return BPNet(
        [net.W1.copy(), net.W2.copy(), net.W3.copy()],
        [net.b1.copy(), net.b2.copy(), net.b3.copy()],
    )


def _forward(net: BPNet, x: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    zs, acts = [], [x]
    h = x
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w.T + b
        zs.append(z)
        h = np.maximum(z, 0.0) if i < len(net.weights) - 1 else z
        acts.append(h)
    return zs, acts


def logits_batch(net: BPNet, x: np.ndarray) -> np.ndarray:
    return _forward(net, np.atleast_2d(np.asarray(x, dtype=np.float64)))[1][-1]


def predict(net: BPNet, x: np.ndarray, fallback_class: Optional[int] = None) -> np.ndarray:
    """Argmax class per row; optional fallback where every logit is zero."""
    logits = logits_batch(net, x)
    out = np.argmax(logits, axis=1)
    if fallback_class is not None:
        out[~np.any(logits != 0.0, axis=1)] = int(fallback_class)
    return out


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def loss_and_gradients(
    net: BPNet, x: np.ndarray, y: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean cross-entropy over the batch and its exact weight/bias gradients."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[0] == 0:
        raise ParameterError("batch must be nonempty")
    m = x.shape[0]
    zs, acts = _forward(net, x)
    log_probs = _log_softmax(acts[-1])
    loss = float(-log_probs[np.arange(m), y].mean())

    delta = np.exp(log_probs)
    delta[np.arange(m), y] -= 1.0
    delta /= m

    grads_w: list[np.ndarray] = [np.empty(0)] * len(net.weights)
    grads_b: list[np.ndarray] = [np.empty(0)] * len(net.weights)
    for i in range(len(net.weights) - 1, -1, -1):
        grads_w[i] = delta.T @ acts[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i]) * (zs[i - 1] > 0.0)
    return loss, grads_w, grads_b


def gradients(net: BPNet, x: np.ndarray, y: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    _, gw, gb = loss_and_gradients(net, x, y)
    return gw, gb


def batch_loss(net: BPNet, x: np.ndarray, y: np.ndarray) -> float:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    log_probs = _log_softmax(logits_batch(net, x))
    return float(-log_probs[np.arange(x.shape[0]), y].mean())


def train_bp(
    arch: tuple[int, int, int, int],
    init_net: Optional[FFNetwork],
    train_x: np.ndarray,
    train_y: np.ndarray,
    test_x: np.ndarray,
    test_y: np.ndarray,
    cfg: TrainConfig,
) -> tuple[BPNet, TrainHistory]:
    """Mini-batch SGD on softmax cross-entropy; deterministic under cfg.seed."""
    if cfg.init == "from_ff":
        if init_net is None:
            raise ParameterError("init='from_ff' requires a constructed network")
        if init_net.layer_sizes != tuple(arch):
            raise ParameterError(
                f"architecture {tuple(arch)} does not match the constructed network {init_net.layer_sizes}"
            )
        net = init_from_ff(init_net)
    else:
        net = init_xavier(tuple(arch), cfg.seed)

    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    history = TrainHistory()
    n = train_x.shape[0]
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, gw, gb = loss_and_gradients(net, train_x[idx], train_y[idx])
            if not math.isfinite(loss):
                raise NumericError(f"training diverged at epoch {epoch} (loss {loss})")
            epoch_losses.append(loss)
            for i in range(len(net.weights)):
                vel_w[i] = cfg.momentum * vel_w[i] + gw[i]
                vel_b[i] = cfg.momentum * vel_b[i] + gb[i]
                net.weights[i] -= cfg.learning_rate * vel_w[i]
                net.biases[i] -= cfg.learning_rate * vel_b[i]
        history.loss.append(float(np.mean(epoch_losses)))
        history.train_acc.append(float(np.mean(predict(net, train_x) == train_y)))
        history.test_acc.append(float(np.mean(predict(net, test_x) == test_y)))
    return net, history
