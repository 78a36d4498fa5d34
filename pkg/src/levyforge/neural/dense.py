"""Fully connected network with ReLU hidden layers and exact backprop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, DomainError, ShapeError
from ..rng import substream

__all__ = ["DenseNet", "init_dense", "dense_forward", "dense_backward"]


@dataclass
class DenseNet:
    """Layer dims (d, hidden..., p); weights[l] has shape (dims[l+1], dims[l])."""

    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise DomainError(f"bad layer dims {dims}")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[l + 1], dims[l]) or b.shape != (dims[l + 1],):
                raise ShapeError(f"layer {l}: weight/bias shapes do not chain")

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def replace_params(self, params: list[np.ndarray]) -> "DenseNet":
        ws = [params[2 * l] for l in range(len(self.weights))]
        bs = [params[2 * l + 1] for l in range(len(self.biases))]
        return DenseNet(self.layer_dims, ws, bs)


def init_dense(layer_dims, seed: int) -> DenseNet:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization."""
    rng = substream(seed, 0xD)
    dims = tuple(int(d) for d in layer_dims)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, (fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, fan_out))
    return DenseNet(dims, weights, biases)


def dense_forward(net: DenseNet, x) -> tuple[np.ndarray, dict]:
    """Forward pass: ReLU on hidden layers, affine output; caches activations."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.layer_dims[0],):
        raise ShapeError(f"input shape {x.shape} != ({net.layer_dims[0]},)")
    activations = [x]
    pre = []
    a = x
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = w @ a + b
        pre.append(z)
        a = z if l == last else np.maximum(z, 0.0)
        activations.append(a)
    cache = {"net": net, "activations": activations, "pre": pre}
    return a, cache


def dense_backward(net: DenseNet, cache: dict, loss_grad) -> list[np.ndarray]:
    """Gradients of a scalar loss w.r.t. every weight and bias.

    ``loss_grad`` is dL/d(output).  Returns the flat parameter list
    [dW0, db0, dW1, db1, ...] matching ``net.params``.
    """
    if cache.get("net") is not net:
        raise ContractError("cache does not belong to this network")
    loss_grad = np.asarray(loss_grad, dtype=np.float64)
    if loss_grad.shape != (net.layer_dims[-1],):
        raise ShapeError(f"loss_grad shape {loss_grad.shape} != ({net.layer_dims[-1]},)")
    activations, pre = cache["activations"], cache["pre"]
    grads: list[np.ndarray] = [None] * (2 * len(net.weights))
    delta = loss_grad
    for l in range(len(net.weights) - 1, -1, -1):
        if l != len(net.weights) - 1:
            delta = delta * (pre[l] > 0.0)
        grads[2 * l] = np.outer(delta, activations[l])
        grads[2 * l + 1] = delta.copy()
        if l > 0:
            delta = net.weights[l].T @ delta
    return grads
