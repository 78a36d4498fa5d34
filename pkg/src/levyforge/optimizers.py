"""Box-constrained derivative-free minimizers: Grey Wolf Optimizer and
Marine Predators Algorithm.

Both share the same contract: the objective maps a position vector to a
scalar (lower is better, non-finite treated as infinitely bad), every
evaluated position is clamped inside the bounds, the best-so-far history is
non-increasing, and the total number of objective calls is exactly
``population * (iterations + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SearchError
from .rng import substream

__all__ = [
    "Bounds",
    "Candidate",
    "SearchConfig",
    "GwoResult",
    "MpaResult",
    "gwo_minimize",
    "mpa_minimize",
    "write_history_csv",
]


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DomainError("bounds must be equal-length 1-D vectors")
        if not np.all(lower < upper):
            raise DomainError("lower bounds must be strictly below upper bounds")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def clamp(self, positions: np.ndarray) -> np.ndarray:
        return np.clip(positions, self.lower, self.upper)


@dataclass(frozen=True)
class Candidate:
    position: np.ndarray
    fitness: float


@dataclass(frozen=True)
class SearchConfig:
    population: int
    iterations: int
    seed: int = 0
    fads_prob: float = 0.2
    mixing: float = 0.5

    def __post_init__(self):
        if self.population < 4:
            raise DomainError(f"population must be >= 4, got {self.population}")
        if self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations}")


@dataclass(frozen=True)
class GwoResult:
    best: Candidate
    history: list[float]
    n_calls: int


@dataclass(frozen=True)
class MpaResult:
    best: Candidate
    history: list[float]
    phases: list[int]
    n_calls: int


def _evaluate(objective, positions: np.ndarray) -> np.ndarray:
    raw = np.array([float(objective(p)) for p in positions])
    return np.where(np.isfinite(raw), raw, np.inf)


def gwo_minimize(objective, bounds: Bounds, config: SearchConfig) -> GwoResult:
    """Canonical GWO: coefficient a decays linearly 2 -> 0 and each wolf is
    pulled toward the alpha/beta/delta leaders (best three points seen)."""
    rng = substream(config.seed, 0x6F)
    pop, dim = config.population, bounds.dim
    pos = bounds.lower + rng.random((pop, dim)) * (bounds.upper - bounds.lower)
    fit = _evaluate(objective, pos)
    n_calls = pop
    if not np.any(np.isfinite(fit)):
        raise SearchError("objective returned non-finite values at every initial point")

    order = np.argsort(fit)
    leaders = [pos[i].copy() for i in order[:3]]
    leader_fit = [fit[i] for i in order[:3]]
    history = [leader_fit[0]]

    for it in range(config.iterations):
        a = 2.0 - 2.0 * it / config.iterations
        attracted = np.zeros((pop, dim))
        for leader in leaders:
            coef_a = 2.0 * a * rng.random((pop, dim)) - a
            coef_c = 2.0 * rng.random((pop, dim))
            attracted += leader - coef_a * np.abs(coef_c * leader - pos)
        pos = bounds.clamp(attracted / 3.0)
        fit = _evaluate(objective, pos)
        n_calls += pop
        for i in np.argsort(fit):
            f = fit[i]
            if f < leader_fit[0]:
                leaders = [pos[i].copy(), leaders[0], leaders[1]]
                leader_fit = [f, leader_fit[0], leader_fit[1]]
            elif f < leader_fit[1]:
                leaders = [leaders[0], pos[i].copy(), leaders[1]]
                leader_fit = [leader_fit[0], f, leader_fit[1]]
            elif f < leader_fit[2]:
                leaders[2] = pos[i].copy()
                leader_fit[2] = f
        history.append(leader_fit[0])
    best = Candidate(leaders[0], leader_fit[0])
    return GwoResult(best, history, n_calls)


def _mantegna_levy(rng: np.random.Generator, shape, exponent: float = 1.5) -> np.ndarray:
    """Levy-flight step lengths via Mantegna's algorithm."""
    num = math.gamma(1.0 + exponent) * math.sin(math.pi * exponent / 2.0)
    den = math.gamma((1.0 + exponent) / 2.0) * exponent * 2.0 ** ((exponent - 1.0) / 2.0)
    sigma_u = (num / den) ** (1.0 / exponent)
    u = rng.normal(0.0, sigma_u, shape)
    v = rng.standard_normal(shape)
    return u / np.abs(v) ** (1.0 / exponent)


def mpa_minimize(objective, bounds: Bounds, config: SearchConfig) -> MpaResult:
    """Three-phase MPA with FADs effect and marine-memory greedy selection.

    Phase 1 (iterations < max/3): Brownian exploration around the elite;
    phase 2: half the population takes Levy steps (exponent 1.5), half
    Brownian; phase 3: Levy exploitation around the elite.  The recorded
    phase label first changes at iteration index ceil(max/3) and again at
    ceil(2 max/3).
    """
    rng = substream(config.seed, 0x3A)
    pop, dim = config.population, bounds.dim
    p_mix = config.mixing
    lo, hi = bounds.lower, bounds.upper

    pos = lo + rng.random((pop, dim)) * (hi - lo)
    fit = _evaluate(objective, pos)
    n_calls = pop
    if not np.any(np.isfinite(fit)):
        raise SearchError("objective returned non-finite values at every initial point")
    mem_pos, mem_fit = pos.copy(), fit.copy()
    elite_idx = int(np.argmin(mem_fit))
    elite = mem_pos[elite_idx].copy()
    elite_fit = float(mem_fit[elite_idx])
    history = [elite_fit]
    phases: list[int] = []

    for it in range(config.iterations):
        cf = (1.0 - it / config.iterations) ** (2.0 * it / config.iterations)
        if it < config.iterations / 3.0:
            phase = 1
            rb = rng.standard_normal((pop, dim))
            step = rb * (elite - rb * pos)
            pos = pos + p_mix * rng.random((pop, dim)) * step
        elif it < 2.0 * config.iterations / 3.0:
            phase = 2
            half = pop // 2
            rl = 0.05 * _mantegna_levy(rng, (half, dim))
            step = rl * (elite - rl * pos[:half])
            pos[:half] = pos[:half] + p_mix * rng.random((half, dim)) * step
            rb = rng.standard_normal((pop - half, dim))
            step = rb * (rb * elite - pos[half:])
            pos[half:] = elite + p_mix * cf * step
        else:
            phase = 3
            rl = 0.05 * _mantegna_levy(rng, (pop, dim))
            step = rl * (rl * elite - pos)
            pos = elite + p_mix * cf * step

        # fish-aggregating-devices effect / eddy jumps
        if rng.random() < config.fads_prob:
            mask = rng.random((pop, dim)) < config.fads_prob
            pos = pos + cf * (lo + rng.random((pop, dim)) * (hi - lo)) * mask
        else:
            r = rng.random()
            shuffle_a = rng.permutation(pop)
            shuffle_b = rng.permutation(pop)
            pos = pos + (config.fads_prob * (1.0 - r) + r) * (pos[shuffle_a] - pos[shuffle_b])

        pos = bounds.clamp(pos)
        fit = _evaluate(objective, pos)
        n_calls += pop

        worse = fit > mem_fit
        pos[worse] = mem_pos[worse]
        fit[worse] = mem_fit[worse]
        mem_pos, mem_fit = pos.copy(), fit.copy()
        best_idx = int(np.argmin(mem_fit))
        if mem_fit[best_idx] < elite_fit:
            elite = mem_pos[best_idx].copy()
            elite_fit = float(mem_fit[best_idx])
        history.append(elite_fit)
        phases.append(phase)

    return MpaResult(Candidate(elite, elite_fit), history, phases, n_calls)


def write_history_csv(history, path) -> None:
    """Fitness history as ``iteration,best_fitness`` rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iteration,best_fitness\n")
        for i, value in enumerate(history):
            fh.write(f"{i},{repr(float(value))}\n")
