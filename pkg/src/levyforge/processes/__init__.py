"""Stochastic process simulators and Levy-measure tooling."""

from .heston import (
    fbm_increment_covariance,
    fbm_increments,
    simulate_fractional_heston,
)
from .merton import (
    expected_jump_size,
    simulate_compound_poisson,
    simulate_gbm,
    simulate_merton_em,
    simulate_merton_jump_adapted,
)
from .params import (
    HestonParams,
    MertonParams,
    PathSet,
    SimGrid,
    StableParams,
    TemperedParams,
)
from .stable import sample_alpha_stable, stable_cf
from .tempered import (
    levy_integrability_check,
    simulate_tempered_jumps,
    tempered_levy_density,
)

__all__ = [
    "MertonParams",
    "HestonParams",
    "StableParams",
    "TemperedParams",
    "SimGrid",
    "PathSet",
    "expected_jump_size",
    "simulate_gbm",
    "simulate_compound_poisson",
    "simulate_merton_em",
    "simulate_merton_jump_adapted",
    "simulate_fractional_heston",
    "fbm_increment_covariance",
    "fbm_increments",
    "sample_alpha_stable",
    "stable_cf",
    "tempered_levy_density",
    "levy_integrability_check",
    "simulate_tempered_jumps",
]
