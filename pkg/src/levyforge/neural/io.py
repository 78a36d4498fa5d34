"""JSON weight checkpoints (schema version levyforge-nn-1)."""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError
from .dense import DenseNet
from .lstm import LstmWeights

__all__ = ["save_dense", "load_dense", "save_lstm", "load_lstm"]

CHECKPOINT_VERSION = "levyforge-nn-1"

_LSTM_FIELDS = ("w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "w_y", "b_y")


def save_dense(net: DenseNet) -> str:
    return json.dumps(
        {
            "version": CHECKPOINT_VERSION,
            "kind": "dense",
            "layer_dims": list(net.layer_dims),
            "weights": [w.ravel().tolist() for w in net.weights],
            "biases": [b.tolist() for b in net.biases],
        }
    )


def load_dense(text: str) -> DenseNet:
    obj = json.loads(text)
    _check(obj, "dense")
    dims = tuple(obj["layer_dims"])
    weights = [
        np.asarray(flat, dtype=np.float64).reshape(dims[l + 1], dims[l])
        for l, flat in enumerate(obj["weights"])
    ]
    biases = [np.asarray(b, dtype=np.float64) for b in obj["biases"]]
    return DenseNet(dims, weights, biases)


def save_lstm(weights: LstmWeights) -> str:
    payload = {
        "version": CHECKPOINT_VERSION,
        "kind": "lstm",
        "input_size": weights.input_size,
        "hidden_size": weights.hidden_size,
    }
    for name in _LSTM_FIELDS:
        payload[name] = np.asarray(getattr(weights, name)).ravel().tolist()
    return json.dumps(payload)


def load_lstm(text: str) -> LstmWeights:
    obj = json.loads(text)
    _check(obj, "lstm")
    h, d = int(obj["hidden_size"]), int(obj["input_size"])
    kwargs = {}
    for name in _LSTM_FIELDS:
        arr = np.asarray(obj[name], dtype=np.float64)
        if name.startswith("w_") and name != "w_y":
            arr = arr.reshape(h, d + h)
        elif name == "b_y":
            arr = arr.reshape(())
        kwargs[name] = arr
    return LstmWeights(hidden_size=h, input_size=d, **kwargs)


def _check(obj: dict, kind: str) -> None:
    if obj.get("version") != CHECKPOINT_VERSION:
        raise ParseError(f"unsupported checkpoint version {obj.get('version')!r}")
    if obj.get("kind") != kind:
        raise ParseError(f"checkpoint kind {obj.get('kind')!r}, expected {kind!r}")
