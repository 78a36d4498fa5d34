"""Fractional Heston simulation with exact-covariance fBM variance noise."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericalError, SizeError
from ..rng import BLOCK, block_rng, n_blocks
from .params import HestonParams, PathSet, SimGrid

__all__ = ["fbm_increment_covariance", "fbm_increments", "simulate_fractional_heston"]

MAX_FBM_STEPS = 4096


def fbm_increment_covariance(hurst: float, n_steps: int, dt: float) -> np.ndarray:
    """Covariance matrix of fractional Brownian increments over a regular grid.

    Cov(dB_i, dB_j) = dt^{2H}/2 * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) with
    k = |i - j|; for H = 0.5 this is the diagonal dt * I.
    """
    k = np.abs(np.arange(n_steps)[:, None] - np.arange(n_steps)[None, :]).astype(float)
    two_h = 2.0 * hurst
    gamma = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    return dt**two_h * gamma


def _fbm_cholesky(hurst: float, n_steps: int, dt: float) -> np.ndarray:
    if n_steps > MAX_FBM_STEPS:
        raise SizeError(
            f"n_steps={n_steps} exceeds the fBM covariance bound {MAX_FBM_STEPS}"
        )
    cov = fbm_increment_covariance(hurst, n_steps, dt)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"fBM increment covariance not factorizable (H={hurst}, n={n_steps})"
        ) from exc


def fbm_increments(
    hurst: float, n_steps: int, dt: float, n_draws: int, seed: int
) -> np.ndarray:
    """(n_draws, n_steps) exact-covariance fBM increment samples."""
    chol = _fbm_cholesky(hurst, n_steps, dt)
    out = np.empty((n_draws, n_steps))
    for b in range(n_blocks(n_draws)):
        rows = min(BLOCK, n_draws - b * BLOCK)
        z = block_rng(seed, b).standard_normal((BLOCK, n_steps))
        out[b * BLOCK : b * BLOCK + rows] = (z @ chol.T)[:rows]
    return out


def simulate_fractional_heston(
    params: HestonParams, grid: SimGrid, n_paths: int, seed: int
) -> tuple[PathSet, np.ndarray]:
    """Simulate correlated price/variance paths; returns (prices, variance).

    The variance follows dv = kappa (theta - v) dt + xi v^beta dB^H with dB^H
    exact fBM increments (Cholesky of the increment covariance).  Negative
    excursions are handled by full truncation: diffusion terms see v+ =
    max(v, 0).  Per step, the price's Brownian driver is built from the same
    white noise z that generates the fBM, as sqrt(dt) * (rho z + sqrt(1-rho^2)
    z_perp), so the underlying drivers correlate at rho.

    The variance matrix (n_paths, n_steps+1) is returned alongside the price
    PathSet because several diagnostics (Feller behaviour, noise-free limits)
    need it.
    """
    s, dt = grid.n_steps, grid.dt
    chol = _fbm_cholesky(params.hurst, s, dt)
    rho_perp = math.sqrt(1.0 - params.rho**2)
    sqrt_dt = math.sqrt(dt)

    prices = np.empty((n_paths, s + 1))
    variance = np.empty((n_paths, s + 1))
    for b in range(n_blocks(n_paths)):
        rng = block_rng(seed, b)
        zv = rng.standard_normal((BLOCK, s))
        zp = rng.standard_normal((BLOCK, s))
        db = zv @ chol.T

        v = np.full(BLOCK, params.v0)
        log_s = np.zeros(BLOCK)
        v_block = np.empty((BLOCK, s + 1))
        ls_block = np.empty((BLOCK, s + 1))
        v_block[:, 0] = v
        ls_block[:, 0] = 0.0
        for step in range(s):
            v_pos = np.maximum(v, 0.0)
            zs = params.rho * zv[:, step] + rho_perp * zp[:, step]
            log_s = log_s + (params.mu - 0.5 * v_pos) * dt + np.sqrt(v_pos * dt) * zs
            v = v + params.kappa * (params.theta - v_pos) * dt + params.xi * v_pos**params.beta * db[:, step]
            ls_block[:, step + 1] = log_s
            v_block[:, step + 1] = v
        rows = min(BLOCK, n_paths - b * BLOCK)
        lo = b * BLOCK
        prices[lo : lo + rows] = grid.s0 * np.exp(ls_block[:rows])
        variance[lo : lo + rows] = v_block[:rows]
    return PathSet(grid, prices), variance
