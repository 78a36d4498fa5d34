"""Price-series ingestion, scaling, windowing, and fractional differencing.

All operations are pure and the returned records are immutable, so they can
be shared freely between workers.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateScaleError,
    DomainError,
    OrderingError,
    ParseError,
    SizeError,
)

__all__ = [
    "RawSeries",
    "StandardScalerState",
    "MinMaxScalerState",
    "WindowedDataset",
    "load_csv",
    "fit_standard",
    "fit_minmax",
    "scaler_from_json",
    "make_windows",
    "frac_diff",
    "frac_diff_weights",
]


@dataclass(frozen=True)
class RawSeries:
    """Daily price observations: strictly increasing dates, positive prices."""

    timestamps: tuple[_dt.date, ...]
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=np.float64)
        prices.flags.writeable = False
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        if len(self.timestamps) != prices.shape[0]:
            raise DomainError("timestamps and prices must have equal length")
        if prices.shape[0] < 2:
            raise SizeError("a price series needs at least 2 observations")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
            raise DomainError("all prices must be finite and > 0")
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if b <= a:
                raise OrderingError(f"timestamps not strictly increasing at {b}")

    def __len__(self) -> int:
        return self.prices.shape[0]

    def log_returns(self) -> np.ndarray:
        return np.diff(np.log(self.prices))


def load_csv(path, date_col: str = "date", price_col: str = "price") -> RawSeries:
    """Read a `date,price` CSV into a RawSeries.

    Dates must be ISO-8601 and pre-sorted; rows out of order raise
    OrderingError rather than being silently sorted, to surface upstream
    data-hygiene problems.  Blank or unparsable price cells raise ParseError
    naming the offending row (1-based, header = row 1).
    """
    timestamps: list[_dt.date] = []
    prices: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: empty file, expected a header row")
        for col in (date_col, price_col):
            if col not in reader.fieldnames:
                raise ParseError(f"{path}: missing required column {col!r}")
        for row_no, row in enumerate(reader, start=2):
            raw_date = (row.get(date_col) or "").strip()
            raw_price = (row.get(price_col) or "").strip()
            if not raw_date:
                raise ParseError(f"{path}: row {row_no}: empty {date_col!r} cell")
            if not raw_price:
                raise ParseError(f"{path}: row {row_no}: empty {price_col!r} cell")
            try:
                stamp = _dt.date.fromisoformat(raw_date)
            except ValueError as exc:
                raise ParseError(f"{path}: row {row_no}: bad date {raw_date!r}") from exc
            try:
                price = float(raw_price)
            except ValueError as exc:
                raise ParseError(f"{path}: row {row_no}: bad price {raw_price!r}") from exc
            if price <= 0.0:
                raise DomainError(f"{path}: row {row_no}: non-positive price {price}")
            if timestamps and stamp <= timestamps[-1]:
                raise OrderingError(
                    f"{path}: row {row_no}: date {stamp} not after {timestamps[-1]}"
                )
            timestamps.append(stamp)
            prices.append(price)
    if len(prices) < 2:
        raise SizeError(f"{path}: need at least 2 rows, got {len(prices)}")
    return RawSeries(tuple(timestamps), np.array(prices))


def _as_values(series) -> np.ndarray:
    if isinstance(series, RawSeries):
        return series.prices
    return np.asarray(series, dtype=np.float64)


@dataclass(frozen=True)
class StandardScalerState:
    """Zero-mean / unit-variance affine scaler (population std)."""

    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0.0:
            raise DegenerateScaleError(f"std must be > 0, got {self.std}")

    def transform(self, values) -> np.ndarray:
        return (_as_values(values) - self.mean) / self.std

    def inverse(self, values) -> np.ndarray:
        return _as_values(values) * self.std + self.mean

    def to_json(self) -> str:
        return json.dumps({"kind": "standard", "a": self.mean, "b": self.std})


@dataclass(frozen=True)
class MinMaxScalerState:
    """Affine scaler mapping the fitted [min, max] onto [0, 1].

    Out-of-range values are mapped by the same affine rule (no clamping);
    forecasts may legitimately leave the training range.
    """

    min: float
    max: float

    def __post_init__(self):
        if not self.max > self.min:
            raise DegenerateScaleError(f"max must exceed min, got [{self.min}, {self.max}]")

    def transform(self, values) -> np.ndarray:
        return (_as_values(values) - self.min) / (self.max - self.min)

    def inverse(self, values) -> np.ndarray:
        return _as_values(values) * (self.max - self.min) + self.min

    def to_json(self) -> str:
        return json.dumps({"kind": "minmax", "a": self.min, "b": self.max})


def fit_standard(series) -> StandardScalerState:
    """Fit a standard scaler; population (not sample) standard deviation."""
    values = _as_values(series)
    if values.shape[0] < 2:
        raise SizeError("need at least 2 values to fit a scaler")
    std = float(np.std(values))
    if std == 0.0:
        raise DegenerateScaleError("constant series has no scale")
    return StandardScalerState(mean=float(np.mean(values)), std=std)


def fit_minmax(series) -> MinMaxScalerState:
    values = _as_values(series)
    if values.shape[0] < 2:
        raise SizeError("need at least 2 values to fit a scaler")
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        raise DegenerateScaleError("constant series has no scale")
    return MinMaxScalerState(min=lo, max=hi)


def scaler_from_json(text: str):
    """Inverse of the scalers' ``to_json`` (schema: {kind, a, b})."""
    obj = json.loads(text)
    kind = obj.get("kind")
    if kind == "standard":
        return StandardScalerState(mean=float(obj["a"]), std=float(obj["b"]))
    if kind == "minmax":
        return MinMaxScalerState(min=float(obj["a"]), max=float(obj["b"]))
    raise ParseError(f"unknown scaler kind {kind!r}")


@dataclass(frozen=True)
class WindowedDataset:
    """Supervised one-step (or multi-step) windows over a scalar series.

    ``inputs[i]`` is ``series[i : i+lookback]`` and ``targets[i]`` the
    contiguous continuation ``series[i+lookback : i+lookback+horizon]``.
    """

    inputs: np.ndarray
    targets: np.ndarray
    lookback: int
    horizon: int

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        inputs.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise DomainError("inputs and targets must be 2-D arrays")
        if inputs.shape[0] != targets.shape[0]:
            raise DomainError("inputs and targets must pair up")
        if inputs.shape[1] != self.lookback or targets.shape[1] != self.horizon:
            raise DomainError("window widths do not match lookback/horizon")

    def __len__(self) -> int:
        return self.inputs.shape[0]


def make_windows(series, lookback: int, horizon: int) -> WindowedDataset:
    """Slice a series into overlapping (lookback -> horizon) pairs."""
    if lookback < 1 or horizon < 1:
        raise DomainError("lookback and horizon must be positive")
    values = _as_values(series)
    n = values.shape[0]
    count = n - lookback - horizon + 1
    if count < 1:
        raise SizeError(
            f"series of length {n} too short for lookback={lookback}, horizon={horizon}"
        )
    idx = np.arange(lookback)[None, :] + np.arange(count)[:, None]
    tidx = np.arange(horizon)[None, :] + (np.arange(count) + lookback)[:, None]
    return WindowedDataset(values[idx], values[tidx], lookback, horizon)


def frac_diff_weights(d: float, truncation: int) -> np.ndarray:
    """Truncated fractional-differencing weights w_0..w_truncation.

    w_0 = 1 and w_k = -w_{k-1} * (d - k + 1) / k, so d=1 gives the discrete
    difference [1, -1, 0, ...] and d=0 the identity.
    """
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"d must lie in [0, 1], got {d}")
    if truncation < 1:
        raise DomainError("truncation must be >= 1")
    w = np.empty(truncation + 1)
    w[0] = 1.0
    for k in range(1, truncation + 1):
        w[k] = -w[k - 1] * (d - k + 1) / k
    return w


def frac_diff(series, d: float, truncation: int) -> np.ndarray:
    """Fixed-truncation fractional differencing of a scalar series.

    output[t] = sum_{k=0..truncation} w_k * x[t-k]; the first ``truncation``
    points are dropped, so the output has length len(x) - truncation.
    """
    values = _as_values(series)
    w = frac_diff_weights(d, truncation)
    if values.shape[0] <= truncation:
        raise SizeError(
            f"series of length {values.shape[0]} too short for truncation={truncation}"
        )
    # correlate with the weight vector reversed: out[i] = sum_k w[k] x[i+trunc-k]
    return np.convolve(values, w, mode="valid")
