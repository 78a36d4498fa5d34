"""Single-layer LSTM with a scalar affine head and exact BPTT gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import WindowedDataset
from ..errors import DomainError, ShapeError, TrainingError
from ..rng import substream
from .optim import adam_step, init_adam

__all__ = ["LstmWeights", "LstmHyper", "init_lstm", "lstm_forward", "lstm_bptt", "train_lstm"]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LstmWeights:
    """Gate matrices act on the concatenation [input, previous hidden]."""

    w_f: np.ndarray
    w_i: np.ndarray
    w_c: np.ndarray
    w_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray
    w_y: np.ndarray
    b_y: np.ndarray
    hidden_size: int
    input_size: int

    def __post_init__(self):
        h, d = self.hidden_size, self.input_size
        for name in ("w_f", "w_i", "w_c", "w_o"):
            if getattr(self, name).shape != (h, d + h):
                raise ShapeError(f"{name} must have shape ({h}, {d + h})")
        for name in ("b_f", "b_i", "b_c", "b_o"):
            if getattr(self, name).shape != (h,):
                raise ShapeError(f"{name} must have shape ({h},)")
        if self.w_y.shape != (h,) or self.b_y.shape != ():
            raise ShapeError("head must be a (hidden,) weight and scalar bias")

    @property
    def params(self) -> list[np.ndarray]:
        return [
            self.w_f, self.w_i, self.w_c, self.w_o,
            self.b_f, self.b_i, self.b_c, self.b_o,
            self.w_y, self.b_y,
        ]

    def replace_params(self, params: list[np.ndarray]) -> "LstmWeights":
        return LstmWeights(*params, hidden_size=self.hidden_size, input_size=self.input_size)


def init_lstm(input_size: int, hidden_size: int, seed: int) -> LstmWeights:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization, seeded."""
    if input_size < 1 or hidden_size < 1:
        raise DomainError("input_size and hidden_size must be positive")
    rng = substream(seed, 0x15)
    fan_in = input_size + hidden_size
    bound = 1.0 / np.sqrt(fan_in)
    gate = lambda: rng.uniform(-bound, bound, (hidden_size, fan_in))
    bias = lambda: rng.uniform(-bound, bound, hidden_size)
    head_bound = 1.0 / np.sqrt(hidden_size)
    return LstmWeights(
        w_f=gate(), w_i=gate(), w_c=gate(), w_o=gate(),
        b_f=bias(), b_i=bias(), b_c=bias(), b_o=bias(),
        w_y=rng.uniform(-head_bound, head_bound, hidden_size),
        b_y=np.array(rng.uniform(-head_bound, head_bound)),
        hidden_size=hidden_size,
        input_size=input_size,
    )


def _as_batch(sequence) -> np.ndarray:
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq[:, None]
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ShapeError("sequence must be a nonempty (T, input_size) array")
    return seq[None, :, :]  # batch of one


def _forward_batch(weights: LstmWeights, x: np.ndarray, head_mask=None):
    """x: (batch, T, input); returns predictions (batch,) and step cache."""
    batch, steps, d = x.shape
    if d != weights.input_size:
        raise ShapeError(f"input size {d} != {weights.input_size}")
    hsz = weights.hidden_size
    h = np.zeros((batch, hsz))
    c = np.zeros((batch, hsz))
    cache = {"x": x, "u": [], "f": [], "i": [], "g": [], "o": [], "c": [], "tanh_c": [], "h": []}
    for t in range(steps):
        u = np.concatenate([x[:, t, :], h], axis=1)
        f = _sigmoid(u @ weights.w_f.T + weights.b_f)
        i = _sigmoid(u @ weights.w_i.T + weights.b_i)
        g = np.tanh(u @ weights.w_c.T + weights.b_c)
        o = _sigmoid(u @ weights.w_o.T + weights.b_o)
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        for key, val in (("u", u), ("f", f), ("i", i), ("g", g), ("o", o), ("c", c), ("tanh_c", tc), ("h", h)):
            cache[key].append(val)
    h_out = h if head_mask is None else h * head_mask
    cache["h_out"] = h_out
    preds = h_out @ weights.w_y + float(weights.b_y)
    return preds, cache


def _backward_batch(weights: LstmWeights, cache: dict, dpred: np.ndarray, head_mask=None):
    """Gradients of a scalar loss given dL/dpred per batch row."""
    x = cache["x"]
    batch, steps, d = x.shape
    hsz = weights.hidden_size
    grads = {name: np.zeros_like(getattr(weights, name))
             for name in ("w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o")}
    d_wy = cache["h_out"].T @ dpred
    d_by = np.array(np.sum(dpred))
    dh = np.outer(dpred, weights.w_y)
    if head_mask is not None:
        dh = dh * head_mask
    dc = np.zeros((batch, hsz))
    for t in range(steps - 1, -1, -1):
        f, i, g, o = cache["f"][t], cache["i"][t], cache["g"][t], cache["o"][t]
        tc = cache["tanh_c"][t]
        u = cache["u"][t]
        c_prev = cache["c"][t - 1] if t > 0 else np.zeros((batch, hsz))
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dzf = df * f * (1.0 - f)
        dzi = di * i * (1.0 - i)
        dzg = dg * (1.0 - g * g)
        dzo = do * o * (1.0 - o)
        grads["w_f"] += dzf.T @ u
        grads["w_i"] += dzi.T @ u
        grads["w_c"] += dzg.T @ u
        grads["w_o"] += dzo.T @ u
        grads["b_f"] += dzf.sum(axis=0)
        grads["b_i"] += dzi.sum(axis=0)
        grads["b_c"] += dzg.sum(axis=0)
        grads["b_o"] += dzo.sum(axis=0)
        du = dzf @ weights.w_f + dzi @ weights.w_i + dzg @ weights.w_c + dzo @ weights.w_o
        dh = du[:, d:]
        dc = dc * f
    return [
        grads["w_f"], grads["w_i"], grads["w_c"], grads["w_o"],
        grads["b_f"], grads["b_i"], grads["b_c"], grads["b_o"],
        d_wy, d_by,
    ]


def lstm_forward(weights: LstmWeights, sequence) -> tuple[float, dict]:
    """Run one sequence from zero state; returns (prediction, trajectory).

    The trajectory maps gate/state names to (T, hidden) arrays; gate outputs
    are sigmoid/tanh bounded, so f, i, o lie in (0, 1) and g, h in (-1, 1).
    """
    preds, cache = _forward_batch(weights, _as_batch(sequence))
    traj = {key: np.stack([step[0] for step in cache[key]]) for key in ("f", "i", "g", "o", "c", "h")}
    return float(preds[0]), traj


def lstm_bptt(weights: LstmWeights, sequence, target: float) -> list[np.ndarray]:
    """Exact gradients of (prediction - target)^2 for a single sequence.

    Returns the flat list matching ``weights.params``.
    """
    preds, cache = _forward_batch(weights, _as_batch(sequence))
    dpred = 2.0 * (preds - float(target))
    return _backward_batch(weights, cache, dpred)


@dataclass
class LstmHyper:
    hidden_size: int = 8
    lr: float = 0.01
    epochs: int = 200
    seed: int = 0
    dropout: float = 0.0
    weight_decay: float = 0.0


def train_lstm(dataset: WindowedDataset, hyper: LstmHyper) -> tuple[LstmWeights, list[float]]:
    """Full-batch Adam on the final-step squared error; deterministic per seed.

    Targets use the first horizon column (one-step-ahead training); dropout,
    when enabled, masks the final hidden state before the affine head.
    """
    if len(dataset) == 0:
        raise TrainingError("dataset is empty")
    x = dataset.inputs[:, :, None]
    y = dataset.targets[:, 0]
    batch = x.shape[0]

    weights = init_lstm(1, hyper.hidden_size, hyper.seed)
    params = weights.params
    adam = init_adam(params, hyper.lr)
    drop_rng = substream(hyper.seed, 0xD0)
    trace: list[float] = []
    for epoch in range(hyper.epochs):
        mask = None
        if hyper.dropout > 0.0:
            keep = 1.0 - hyper.dropout
            mask = (drop_rng.random((batch, hyper.hidden_size)) < keep) / keep
        preds, cache = _forward_batch(weights, x, head_mask=mask)
        err = preds - y
        loss = float(np.mean(err**2))
        if not np.isfinite(loss):
            raise TrainingError(f"training diverged at epoch {epoch}")
        trace.append(loss)
        grads = _backward_batch(weights, cache, 2.0 * err / batch, head_mask=mask)
        if hyper.weight_decay > 0.0:
            grads = [g + hyper.weight_decay * p for g, p in zip(grads, params)]
        params, adam = adam_step(adam, params, grads)
        weights = weights.replace_params(params)
    return weights, trace
