"""From-scratch dense network and LSTM with exact analytic gradients."""

from .dense import DenseNet, dense_backward, dense_forward, init_dense
from .io import load_dense, load_lstm, save_dense, save_lstm
from .lstm import LstmHyper, LstmWeights, init_lstm, lstm_bptt, lstm_forward, train_lstm
from .optim import AdamState, adam_step, init_adam

__all__ = [
    "DenseNet",
    "init_dense",
    "dense_forward",
    "dense_backward",
    "LstmWeights",
    "LstmHyper",
    "init_lstm",
    "lstm_forward",
    "lstm_bptt",
    "train_lstm",
    "AdamState",
    "init_adam",
    "adam_step",
    "save_dense",
    "load_dense",
    "save_lstm",
    "load_lstm",
]
