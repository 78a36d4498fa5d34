"""GWO-tuned LSTM training, hybrid LSTM + jump-diffusion forecasting, metrics.

The hybrid forecaster anchors each one-day Monte Carlo transition on the
previous *actual* price (walk-forward, never on prior forecasts), mixes the
LSTM point with the Monte Carlo mean through a convex weight w, and re-centers
the Monte Carlo quantile band on the ensemble point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import MinMaxScalerState, RawSeries, StandardScalerState, WindowedDataset
from .errors import DomainError, ShapeError, SizeError, TrainingError
from .neural.lstm import LstmHyper, LstmWeights, _forward_batch, train_lstm
from .optimizers import Bounds, SearchConfig, gwo_minimize
from .processes.params import MertonParams
from .rng import stable_hash64, substream

__all__ = [
    "HyperBox",
    "TunedHyper",
    "HybridConfig",
    "ForecastResult",
    "MetricsReport",
    "tune_lstm",
    "rolling_lstm_forecast",
    "hybrid_forecast",
    "compute_metrics",
]

TRADING_DT = 1.0 / 252.0


@dataclass(frozen=True)
class HyperBox:
    """Hyperparameter search ranges; integer dims round at evaluation time.

    The learning rate is searched on a log10 scale.  Lookback candidates use
    the trailing slice of the dataset's (maximal) lookback window, so one
    windowed dataset serves every candidate and the chronological split stays
    fixed.
    """

    hidden_size: tuple[int, int] = (4, 32)
    log10_lr: tuple[float, float] = (-2.5, -1.0)
    lookback: tuple[int, int] = (2, 10)
    epochs: tuple[int, int] = (50, 300)

    def to_bounds(self, max_lookback: int) -> Bounds:
        lo_lb, hi_lb = self.lookback
        hi_lb = min(hi_lb, max_lookback)
        lo_lb = min(lo_lb, hi_lb)
        # the +0.999 / epsilon padding keeps collapsed ranges searchable
        hi_lr = max(self.log10_lr[1], self.log10_lr[0] + 1e-9)
        return Bounds(
            np.array([self.hidden_size[0], self.log10_lr[0], lo_lb, self.epochs[0]], dtype=float),
            np.array(
                [self.hidden_size[1] + 0.999, hi_lr, hi_lb + 0.999, self.epochs[1] + 0.999]
            ),
        )


@dataclass(frozen=True)
class TunedHyper:
    hidden_size: int
    lr: float
    lookback: int
    epochs: int
    validation_mse: float

    def to_hyper(self, seed: int) -> LstmHyper:
        return LstmHyper(
            hidden_size=self.hidden_size, lr=self.lr, epochs=self.epochs, seed=seed
        )


def _decode(position: np.ndarray) -> tuple[int, float, int, int]:
    hidden = int(position[0])
    lr = 10.0 ** float(position[1])
    lookback = int(position[2])
    epochs = int(position[3])
    return hidden, lr, lookback, epochs


def _split_train_val(dataset: WindowedDataset) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = len(dataset)
    n_val = max(1, n // 5)
    if n - n_val < 1:
        raise SizeError("dataset too small for a chronological 80/20 split")
    cut = n - n_val
    return (
        dataset.inputs[:cut],
        dataset.targets[:cut, 0],
        dataset.inputs[cut:],
        dataset.targets[cut:, 0],
    )


def tune_lstm(
    dataset: WindowedDataset, box: HyperBox, gwo: SearchConfig
) -> TunedHyper:
    """GWO search over (hidden_size, lr, lookback, epochs).

    Each candidate trains a fresh LSTM on the chronological first 80% of the
    windows and scores the validation MSE on the last 20%.  The training seed
    is a stable hash of the rounded candidate, so the objective is pure and
    the whole search is deterministic for a fixed GWO seed.
    """
    train_x, train_y, val_x, val_y = _split_train_val(dataset)
    bounds = box.to_bounds(dataset.lookback)

    def objective(position: np.ndarray) -> float:
        hidden, lr, lookback, epochs = _decode(position)
        sub = WindowedDataset(train_x[:, -lookback:], train_y[:, None], lookback, 1)
        hyper = LstmHyper(
            hidden_size=hidden, lr=lr, epochs=epochs,
            seed=stable_hash64("tune_lstm", hidden, round(lr, 12), lookback, epochs),
        )
        try:
            weights, _ = train_lstm(sub, hyper)
        except TrainingError:
            return math.inf
        preds, _ = _forward_batch(weights, val_x[:, -lookback:, None])
        return float(np.mean((preds - val_y) ** 2))

    result = gwo_minimize(objective, bounds, gwo)
    hidden, lr, lookback, epochs = _decode(result.best.position)
    return TunedHyper(hidden, lr, lookback, epochs, float(result.best.fitness))


def rolling_lstm_forecast(
    weights: LstmWeights,
    scalers: tuple[StandardScalerState, MinMaxScalerState],
    series: RawSeries,
    horizon: int,
    lookback: int,
) -> np.ndarray:
    """Walk-forward one-step forecasts for the last ``horizon`` points.

    Each step feeds the actual trailing window (input-scaled), never a prior
    forecast, and inverse-transforms the prediction back to price units.
    """
    if horizon < 0:
        raise DomainError("horizon must be >= 0")
    if horizon == 0:
        return np.empty(0)
    input_scaler, target_scaler = scalers
    prices = series.prices
    if prices.shape[0] < lookback + horizon:
        raise SizeError(
            f"need at least lookback + horizon = {lookback + horizon} points, "
            f"got {prices.shape[0]}"
        )
    scaled = input_scaler.transform(prices)
    first_target = prices.shape[0] - horizon
    windows = np.stack(
        [scaled[t - lookback : t] for t in range(first_target, prices.shape[0])]
    )
    preds, _ = _forward_batch(weights, windows[:, :, None])
    return np.asarray(target_scaler.inverse(preds))


@dataclass(frozen=True)
class HybridConfig:
    w: float = 0.5
    n_mc_paths: int = 2000
    quantiles: tuple[float, float] = (0.05, 0.95)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise DomainError(f"ensemble weight must lie in [0, 1], got {self.w}")
        lo, hi = self.quantiles
        if not 0.0 <= lo < hi <= 1.0:
            raise DomainError(f"bad quantile pair {self.quantiles}")


@dataclass(frozen=True)
class ForecastResult:
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    horizon: int
    ensemble_weight: float

    def __post_init__(self):
        for name in ("point", "lower", "upper"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (self.point.shape == self.lower.shape == self.upper.shape == (self.horizon,)):
            raise ShapeError("point/lower/upper must all have length horizon")
        if self.horizon and not (
            np.all(self.lower <= self.point) and np.all(self.point <= self.upper)
        ):
            raise DomainError("band must bracket the point forecast")

    def to_csv(self, path, actual=None) -> None:
        """Header ``step,point,lower,upper[,actual]``."""
        cols = ["step,point,lower,upper"]
        if actual is not None:
            actual = np.asarray(actual, dtype=np.float64)
            if actual.shape != (self.horizon,):
                raise ShapeError("actual must have length horizon")
            cols = ["step,point,lower,upper,actual"]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(cols[0] + "\n")
            for i in range(self.horizon):
                row = f"{i},{self.point[i]!r},{self.lower[i]!r},{self.upper[i]!r}"
                if actual is not None:
                    row += f",{actual[i]!r}"
                fh.write(row + "\n")


def _one_day_merton_sample(
    params: MertonParams, anchor: float, n_paths: int, rng: np.random.Generator
) -> np.ndarray:
    """Exact one-step transitions (jump count, jump sum, diffusion)."""
    dt = TRADING_DT
    z = rng.standard_normal(n_paths)
    counts = rng.poisson(params.lam * dt, n_paths)
    z_jump = rng.standard_normal(n_paths)
    dlog = (
        (params.mu - params.lam * params.k - 0.5 * params.sigma**2) * dt
        + params.sigma * math.sqrt(dt) * z
        + counts * params.m
        + params.delta * np.sqrt(counts) * z_jump
    )
    return anchor * np.exp(dlog)


def hybrid_forecast(
    lstm_point, merton: MertonParams, anchors, config: HybridConfig
) -> ForecastResult:
    """Convex LSTM / Merton-MC ensemble with re-centered quantile bands.

    For each step t, ``n_mc_paths`` one-day Merton transitions start from
    anchors[t]; the point forecast is w * lstm + (1 - w) * MC mean, and the
    band is the empirical MC quantile pair shifted so the MC mean lands on
    the ensemble point.
    """
    lstm_point = np.asarray(lstm_point, dtype=np.float64)
    anchors = np.asarray(anchors, dtype=np.float64)
    if lstm_point.shape != anchors.shape or lstm_point.ndim != 1:
        raise ShapeError("lstm_point and anchors must be equal-length vectors")
    if np.any(anchors <= 0.0):
        raise DomainError("anchors must be positive prices")
    horizon = lstm_point.shape[0]
    q_lo, q_hi = config.quantiles
    point = np.empty(horizon)
    lower = np.empty(horizon)
    upper = np.empty(horizon)
    for t in range(horizon):
        rng = substream(config.seed, 0xF0, t)
        sample = _one_day_merton_sample(merton, anchors[t], config.n_mc_paths, rng)
        mc_mean = float(sample.mean())
        point[t] = config.w * lstm_point[t] + (1.0 - config.w) * mc_mean
        shift = point[t] - mc_mean
        # min/max guard absorbs 1-ulp rounding when the sample degenerates
        lower[t] = min(np.quantile(sample, q_lo) + shift, point[t])
        upper[t] = max(np.quantile(sample, q_hi) + shift, point[t])
    return ForecastResult(point, lower, upper, horizon, config.w)


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    mse: float
    rmse: float
    mspe: float
    r2: float

    def __post_init__(self):
        if abs(self.rmse**2 - self.mse) > 1e-12 * max(1.0, self.mse):
            raise DomainError("rmse must equal sqrt(mse)")

    def to_json(self) -> str:
        return json.dumps(
            {"mae": self.mae, "mse": self.mse, "rmse": self.rmse,
             "mspe": self.mspe, "r2": self.r2}
        )


def compute_metrics(pred, actual) -> MetricsReport:
    """MAE, MSE, RMSE, MSPE (mean squared relative error), R^2."""
    pred = np.asarray(pred, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if pred.shape != actual.shape or pred.ndim != 1 or pred.size == 0:
        raise ShapeError("pred and actual must be equal-length nonempty vectors")
    if np.any(actual == 0.0):
        raise DomainError("MSPE undefined: actual contains zeros")
    err = pred - actual
    mse = float(np.mean(err**2))
    ss_tot = float(np.sum((actual - actual.mean()) ** 2))
    if ss_tot == 0.0:
        raise DomainError("R^2 undefined: actual has zero variance")
    return MetricsReport(
        mae=float(np.mean(np.abs(err))),
        mse=mse,
        rmse=math.sqrt(mse),
        mspe=float(np.mean((err / actual) ** 2)),
        r2=1.0 - float(np.sum(err**2)) / ss_tot,
    )
