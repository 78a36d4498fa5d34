"""Geometric Brownian motion, compound Poisson, and Merton jump-diffusion.

All simulators share the blocked stream scheme from :mod:`levyforge.rng`:
paths are generated in blocks of ``BLOCK`` rows, each block drawing a fixed
sequence of arrays from its own counter-based generator, so results are
reproducible and unaffected by the total path count.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..rng import BLOCK, block_rng, n_blocks
from .params import MertonParams, PathSet, SimGrid

__all__ = [
    "expected_jump_size",
    "simulate_gbm",
    "simulate_compound_poisson",
    "simulate_merton_em",
    "simulate_merton_jump_adapted",
]


def expected_jump_size(m: float, delta: float) -> float:
    """Expected relative jump size k = exp(m + delta^2/2) - 1."""
    if delta < 0.0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    return math.exp(m + 0.5 * delta**2) - 1.0


def _blocked(n_paths: int, n_steps: int, seed: int, fill_block) -> np.ndarray:
    """Assemble per-block results into an (n_paths, n_steps+1) matrix."""
    out = np.empty((n_paths, n_steps + 1))
    for b in range(n_blocks(n_paths)):
        rows = min(BLOCK, n_paths - b * BLOCK)
        block = fill_block(block_rng(seed, b))
        out[b * BLOCK : b * BLOCK + rows] = block[:rows]
    return out


def simulate_gbm(
    mu: float, sigma: float, grid: SimGrid, n_paths: int, seed: int
) -> PathSet:
    """Exact GBM sampling: log-normal increments on the regular grid."""
    if sigma < 0.0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    dt, s = grid.dt, grid.n_steps

    def fill(rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((BLOCK, s))
        dlog = (mu - 0.5 * sigma**2) * dt + sigma * math.sqrt(dt) * z
        log_paths = np.concatenate(
            [np.zeros((BLOCK, 1)), np.cumsum(dlog, axis=1)], axis=1
        )
        return grid.s0 * np.exp(log_paths)

    return PathSet(grid, _blocked(n_paths, s, seed, fill))


def simulate_compound_poisson(
    lam: float, m: float, delta: float, grid: SimGrid, n_paths: int, seed: int
) -> PathSet:
    """Level paths of Q_t = sum_{i<=N_t} (Y_i - 1), ln Y_i ~ N(m, delta^2).

    Per step the jump count is Poisson(lam * dt) and each jump contributes
    Y_i - 1 individually; Q_0 = 0.
    """
    if lam < 0.0:
        raise DomainError(f"lam must be >= 0, got {lam}")
    if delta < 0.0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    dt, s = grid.dt, grid.n_steps

    def fill(rng: np.random.Generator) -> np.ndarray:
        counts = rng.poisson(lam * dt, (BLOCK, s))
        contrib = np.zeros((BLOCK, s))
        for j in range(int(counts.max(initial=0))):
            z = rng.standard_normal((BLOCK, s))
            contrib += np.where(counts > j, np.exp(m + delta * z) - 1.0, 0.0)
        return np.concatenate(
            [np.zeros((BLOCK, 1)), np.cumsum(contrib, axis=1)], axis=1
        )

    return PathSet(grid, _blocked(n_paths, s, seed, fill))


def simulate_merton_em(
    params: MertonParams, grid: SimGrid, n_paths: int, seed: int
) -> PathSet:
    """Euler scheme in log space (positive by construction).

    ln S_{t+dt} = ln S_t + (mu - lam*k - sigma^2/2) dt + sigma sqrt(dt) Z
                  + sum of the step's jump log-sizes.
    Given a step count N, the jump log-size sum is drawn as N(N m, N delta^2),
    the exact distribution of a sum of N iid N(m, delta^2) draws.
    """
    dt, s = grid.dt, grid.n_steps
    drift = (params.mu - params.lam * params.k - 0.5 * params.sigma**2) * dt

    def fill(rng: np.random.Generator) -> np.ndarray:
        z1 = rng.standard_normal((BLOCK, s))
        counts = rng.poisson(params.lam * dt, (BLOCK, s))
        z2 = rng.standard_normal((BLOCK, s))
        dlog = (
            drift
            + params.sigma * math.sqrt(dt) * z1
            + counts * params.m
            + params.delta * np.sqrt(counts) * z2
        )
        log_paths = np.concatenate(
            [np.zeros((BLOCK, 1)), np.cumsum(dlog, axis=1)], axis=1
        )
        return grid.s0 * np.exp(log_paths)

    return PathSet(grid, _blocked(n_paths, s, seed, fill))


def simulate_merton_jump_adapted(
    params: MertonParams, grid: SimGrid, n_paths: int, seed: int
) -> PathSet:
    """Jump-adapted scheme: exact Poisson arrival times on [0, T].

    Per path the total jump count is Poisson(lam*T) and arrival times are
    uniform on [0, T] (the arrival-time law conditional on the count).  The
    diffusion is advanced exactly (log-normal increments) between jump and
    grid times and each jump is applied atomically at its arrival, which for
    constant coefficients collapses to adding each jump's log-size to every
    grid node at or after its arrival.  Output is sampled on the regular grid.
    """
    dt, s, t_end = grid.dt, grid.n_steps, grid.t_end
    drift = params.mu - params.lam * params.k - 0.5 * params.sigma**2
    times = grid.times()

    def fill(rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((BLOCK, s))
        wiener = np.concatenate(
            [np.zeros((BLOCK, 1)), np.cumsum(math.sqrt(dt) * z, axis=1)], axis=1
        )
        log_paths = drift * times[None, :] + params.sigma * wiener

        n_jumps = rng.poisson(params.lam * t_end, BLOCK)
        max_jumps = int(n_jumps.max(initial=0))
        if max_jumps > 0:
            arrivals = rng.random((BLOCK, max_jumps)) * t_end
            sizes = rng.normal(params.m, params.delta, (BLOCK, max_jumps))
            alive = np.arange(max_jumps)[None, :] < n_jumps[:, None]
            # first grid node at or after each arrival
            node = np.maximum(np.ceil(arrivals / dt).astype(np.int64), 1)
            node = np.minimum(node, s)
            flat = np.bincount(
                (np.arange(BLOCK)[:, None] * (s + 1) + node)[alive],
                weights=sizes[alive],
                minlength=BLOCK * (s + 1),
            ).reshape(BLOCK, s + 1)
            log_paths += np.cumsum(flat, axis=1)
        return grid.s0 * np.exp(log_paths)

    return PathSet(grid, _blocked(n_paths, s, seed, fill))
