"""Shared fixtures: synthetic Merton price series and a gradient checker."""

import datetime

import numpy as np
import pytest

from levyforge.data import RawSeries
from levyforge.processes import MertonParams, SimGrid, simulate_merton_em

TRUE_MERTON = MertonParams(mu=0.05, sigma=0.2, lam=10.0, m=0.0, delta=0.11)


def synth_merton_series(params: MertonParams, n_days: int, seed: int) -> RawSeries:
    """One simulated daily price path wrapped as a RawSeries."""
    grid = SimGrid(t_end=n_days / 252.0, n_steps=n_days, s0=100.0)
    prices = simulate_merton_em(params, grid, 1, seed=seed).paths[0]
    start = datetime.date(2010, 1, 4)
    stamps = tuple(start + datetime.timedelta(days=i) for i in range(len(prices)))
    return RawSeries(stamps, prices)


@pytest.fixture(scope="session")
def merton_series_3000() -> RawSeries:
    return synth_merton_series(TRUE_MERTON, 3000, seed=4242)


def relative_grad_error(analytic: float, numeric: float, floor: float = 1e-4) -> float:
    """Gradient-check metric with a denominator floor.

    The floor absorbs the central-difference noise floor (~ eps^(2/3) * |L|)
    on components whose true gradient is itself tiny.
    """
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def write_price_csv(path, series: RawSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,price\n")
        for stamp, price in zip(series.timestamps, series.prices):
            fh.write(f"{stamp.isoformat()},{float(price)!r}\n")
