"""Parameter records, simulation grid, and path container."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ShapeError

__all__ = [
    "MertonParams",
    "HestonParams",
    "StableParams",
    "TemperedParams",
    "SimGrid",
    "PathSet",
]


@dataclass(frozen=True)
class MertonParams:
    """Jump-diffusion parameters: drift mu, diffusion vol sigma, jump
    intensity lam (per year), and log-normal jump log-sizes N(m, delta^2)."""

    mu: float
    sigma: float
    lam: float
    m: float
    delta: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if self.lam < 0.0:
            raise DomainError(f"lam must be >= 0, got {self.lam}")
        if self.delta < 0.0:
            raise DomainError(f"delta must be >= 0, got {self.delta}")

    @property
    def k(self) -> float:
        """Expected relative jump size E[Y - 1] = exp(m + delta^2/2) - 1."""
        return math.exp(self.m + 0.5 * self.delta**2) - 1.0


@dataclass(frozen=True)
class HestonParams:
    """Mean-reverting stochastic variance with a fractional driver.

    ``hurst`` is the Hurst exponent of the variance noise (0.5 recovers
    standard Brownian motion) and ``beta`` the vol-of-vol exponent v^beta.
    The Feller condition 2*kappa*theta >= xi^2 is recorded as a flag, not
    enforced: the full-truncation scheme tolerates violations.
    """

    mu: float
    kappa: float
    theta: float
    xi: float
    rho: float
    v0: float
    hurst: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.theta <= 0.0:
            raise DomainError(f"theta must be > 0, got {self.theta}")
        if self.xi < 0.0:
            # xi = 0 is admitted as the noise-free limit (deterministic variance)
            raise DomainError(f"xi must be >= 0, got {self.xi}")
        if not -1.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (-1, 1), got {self.rho}")
        if self.v0 <= 0.0:
            raise DomainError(f"v0 must be > 0, got {self.v0}")
        if not 0.5 <= self.hurst < 1.0:
            raise DomainError(f"hurst must lie in [0.5, 1), got {self.hurst}")

    @property
    def feller_ok(self) -> bool:
        return 2.0 * self.kappa * self.theta >= self.xi**2


@dataclass(frozen=True)
class StableParams:
    """Alpha-stable law: stability alpha, skewness beta_skew, location, scale."""

    alpha: float
    beta_skew: float = 0.0
    gamma_loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1.0 <= self.beta_skew <= 1.0:
            raise DomainError(f"beta_skew must lie in [-1, 1], got {self.beta_skew}")
        if self.scale <= 0.0:
            raise DomainError(f"scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class TemperedParams:
    """Tempered-stable Levy measure C |x|^(-1-alpha) exp(-lambda |x|).

    lambda_temper = 0 is admitted as the untempered (pure power-law) limit;
    the truncated Levy-Khintchine integral stays finite either way.
    """

    c_level: float
    alpha: float
    lambda_temper: float

    def __post_init__(self):
        if self.c_level <= 0.0:
            raise DomainError(f"c_level must be > 0, got {self.c_level}")
        if not 0.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.lambda_temper < 0.0:
            raise DomainError(f"lambda_temper must be >= 0, got {self.lambda_temper}")


@dataclass(frozen=True)
class SimGrid:
    """Regular time grid on [0, t_end] (years) with an initial price."""

    t_end: float
    n_steps: int
    s0: float

    def __post_init__(self):
        if self.t_end <= 0.0:
            raise DomainError(f"t_end must be > 0, got {self.t_end}")
        if self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.s0 <= 0.0:
            raise DomainError(f"s0 must be > 0, got {self.s0}")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_steps + 1)


@dataclass(frozen=True)
class PathSet:
    """n_paths x (n_steps + 1) matrix of simulated trajectories.

    Price simulators start every path at grid.s0 and keep it positive;
    jump-level simulators (compound Poisson, tempered jumps) start at 0.
    """

    grid: SimGrid
    paths: np.ndarray

    def __post_init__(self):
        paths = np.asarray(self.paths, dtype=np.float64)
        paths.flags.writeable = False
        object.__setattr__(self, "paths", paths)
        if paths.ndim != 2:
            raise ShapeError("paths must be a 2-D matrix")
        if paths.shape[1] != self.grid.n_steps + 1:
            raise ShapeError(
                f"paths have {paths.shape[1]} columns, grid wants {self.grid.n_steps + 1}"
            )

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    def terminal(self) -> np.ndarray:
        return self.paths[:, -1]

    def to_csv(self, path) -> None:
        """Header ``t,path_0,...,path_{n-1}``, one row per grid time."""
        times = self.grid.times()
        header = "t," + ",".join(f"path_{i}" for i in range(self.n_paths))
        table = np.column_stack([times, self.paths.T])
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for row in table:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")

    def to_json(self) -> str:
        return json.dumps(
            {
                "grid": {
                    "t_end": self.grid.t_end,
                    "n_steps": self.grid.n_steps,
                    "s0": self.grid.s0,
                },
                "paths": self.paths.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PathSet":
        obj = json.loads(text)
        grid = SimGrid(**obj["grid"])
        return cls(grid, np.asarray(obj["paths"], dtype=np.float64))
