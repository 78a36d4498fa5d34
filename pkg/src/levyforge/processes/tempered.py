"""Tempered-stable Levy measure: density, integrability, jump simulation."""

from __future__ import annotations

import numpy as np
from scipy import integrate

from ..errors import DomainError, NumericalError, TractabilityError
from ..rng import BLOCK, block_rng, n_blocks
from .params import PathSet, SimGrid, TemperedParams

__all__ = [
    "tempered_levy_density",
    "levy_integrability_check",
    "simulate_tempered_jumps",
]

_TABLE_SIZE = 8192


def tempered_levy_density(x, params: TemperedParams):
    """Levy density C |x|^(-1-alpha) exp(-lambda |x|); singular at x = 0."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr == 0.0):
        raise DomainError("Levy density is singular at x = 0")
    ax = np.abs(x_arr)
    out = params.c_level * ax ** (-1.0 - params.alpha) * np.exp(-params.lambda_temper * ax)
    return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out


def _one_sided_density(params: TemperedParams):
    return lambda x: params.c_level * x ** (-1.0 - params.alpha) * np.exp(
        -params.lambda_temper * x
    )


def levy_integrability_check(params: TemperedParams, cutoff: float = 1e-4) -> float:
    """Numerical value of the Levy-Khintchine integral int (1 ^ x^2) nu(dx).

    The region |x| >= cutoff is handled by adaptive quadrature (split at the
    kink |x| = 1); the mass below the cutoff is bounded analytically by
    2 C cutoff^(2-alpha) / (2-alpha), i.e. with the tempering factor replaced
    by 1.  Exponential tempering makes the tail integral finite for every
    alpha in (0, 2).
    """
    if cutoff <= 0.0:
        raise DomainError(f"cutoff must be > 0, got {cutoff}")
    nu = _one_sided_density(params)
    integrand = lambda x: min(1.0, x * x) * nu(x)

    pieces = []
    if cutoff < 1.0:
        pieces.append((cutoff, 1.0))
        pieces.append((1.0, np.inf))
    else:
        pieces.append((cutoff, np.inf))
    total = 0.0
    for lo, hi in pieces:
        value, abserr = integrate.quad(integrand, lo, hi, limit=200)
        if not np.isfinite(value) or abserr > 1e-6 * max(1.0, abs(value)):
            raise NumericalError(
                f"tail quadrature unreliable on [{lo}, {hi}]: value={value}, err={abserr}"
            )
        total += value
    small = params.c_level * cutoff ** (2.0 - params.alpha) / (2.0 - params.alpha)
    return 2.0 * (total + small)


def _build_sampling_table(params: TemperedParams, cutoff: float):
    """Inverse-CDF table for one-sided jump sizes >= cutoff, and intensity."""
    half_intensity, abserr = integrate.quad(
        _one_sided_density(params), cutoff, np.inf, limit=200
    )
    if not np.isfinite(half_intensity) or half_intensity < 0.0:
        raise NumericalError("jump intensity quadrature failed")
    if params.lambda_temper > 0.0:
        x_max = max(10.0 * cutoff, 80.0 / params.lambda_temper)
    else:
        x_max = cutoff * 1e6  # untempered limit: power-law table span

    grid = np.geomspace(cutoff, x_max, _TABLE_SIZE)
    pdf = _one_sided_density(params)(grid)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    if cdf[-1] <= 0.0:
        return 0.0, grid, cdf
    cdf /= cdf[-1]
    return 2.0 * half_intensity, grid, cdf


def simulate_tempered_jumps(
    params: TemperedParams,
    grid: SimGrid,
    n_paths: int,
    seed: int,
    small_jump_cutoff: float = 1e-3,
) -> PathSet:
    """Compound-Poisson approximation of the tempered-stable jump component.

    Jumps with |x| >= small_jump_cutoff arrive with intensity
    Lambda = int_{|x| >= cutoff} nu(dx) and sizes drawn from nu / Lambda via
    an inverse-CDF table; signs are symmetric Rademacher.  Small jumps are
    replaced by their compensating drift, which vanishes for this symmetric
    measure, so the level paths start at 0 and have mean approximately 0.
    """
    if small_jump_cutoff <= 0.0:
        raise DomainError(f"small_jump_cutoff must be > 0, got {small_jump_cutoff}")
    intensity, xgrid, cdf = _build_sampling_table(params, small_jump_cutoff)
    dt, s = grid.dt, grid.n_steps
    if intensity * dt > 1e3:
        raise TractabilityError(
            f"cutoff {small_jump_cutoff} gives {intensity * dt:.3g} expected jumps "
            "per step; raise the cutoff or refine the grid"
        )

    out = np.empty((n_paths, s + 1))
    for b in range(n_blocks(n_paths)):
        rng = block_rng(seed, b)
        counts = rng.poisson(intensity * dt, (BLOCK, s))
        contrib = np.zeros((BLOCK, s))
        for j in range(int(counts.max(initial=0))):
            active = counts > j
            n_active = int(active.sum())
            u = rng.random(n_active)
            signs = np.where(rng.random(n_active) < 0.5, -1.0, 1.0)
            contrib[active] += signs * np.interp(u, cdf, xgrid)
        block = np.concatenate(
            [np.zeros((BLOCK, 1)), np.cumsum(contrib, axis=1)], axis=1
        )
        rows = min(BLOCK, n_paths - b * BLOCK)
        out[b * BLOCK : b * BLOCK + rows] = block[:rows]
    return PathSet(grid, out)
