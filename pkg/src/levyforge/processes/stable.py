"""Alpha-stable sampling (Chambers-Mallows-Stuck) and characteristic function."""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import DomainError, UnsupportedParameterizationError
from ..rng import substream
from .params import StableParams

__all__ = ["sample_alpha_stable", "stable_cf"]


def sample_alpha_stable(params: StableParams, n: int, seed: int) -> np.ndarray:
    """Draw n iid stable variates via the CMS transform.

    A standard draw X ~ S(alpha, beta; scale 1, location 0) is built from
    V ~ U(-pi/2, pi/2) and W ~ Exp(1); the result is gamma_loc + scale * X.
    For alpha = 2 the law reduces to Normal(gamma_loc, 2 * scale^2).  The
    alpha = 1 branch uses a different parameterization and is not supported.
    """
    if params.alpha == 1.0:
        raise UnsupportedParameterizationError("alpha = 1 branch not supported")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    alpha, beta = params.alpha, params.beta_skew
    rng = substream(seed)
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, n)
    w = rng.exponential(1.0, n)

    t_ab = beta * math.tan(math.pi * alpha / 2.0)
    b_ab = math.atan(t_ab) / alpha
    s_ab = (1.0 + t_ab**2) ** (1.0 / (2.0 * alpha))
    x = (
        s_ab
        * np.sin(alpha * (v + b_ab))
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - alpha * (v + b_ab)) / w) ** ((1.0 - alpha) / alpha)
    )
    return params.gamma_loc + params.scale * x


def stable_cf(u: float, t: float, params: StableParams) -> complex:
    """E[exp(i u S_t)] for the stable process started at gamma_loc * (t=1 shift).

    exp(-t (scale |u|)^alpha (1 - i beta sgn(u) tan(pi alpha / 2)) + i gamma u);
    the scale enters through t * (scale * |u|)^alpha.
    """
    if params.alpha == 1.0:
        raise UnsupportedParameterizationError("alpha = 1 branch not supported")
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    alpha, beta = params.alpha, params.beta_skew
    sgn = (u > 0) - (u < 0)
    mag = t * (params.scale * abs(u)) ** alpha
    return cmath.exp(
        -mag * complex(1.0, -beta * sgn * math.tan(math.pi * alpha / 2.0))
        + 1j * params.gamma_loc * u
    )
