import math

import numpy as np
import pytest

from levyforge.errors import DomainError, TractabilityError
from levyforge.processes import (
    SimGrid,
    TemperedParams,
    levy_integrability_check,
    simulate_tempered_jumps,
    tempered_levy_density,
)

PARAMS = TemperedParams(c_level=1.0, alpha=0.5, lambda_temper=1.0)


class TestDensity:
    def test_unit_factors(self):
        p = TemperedParams(c_level=1.0, alpha=0.5, lambda_temper=0.0)
        assert tempered_levy_density(1.0, p) == pytest.approx(1.0)

    def test_tempering(self):
        p = TemperedParams(c_level=1.0, alpha=0.5, lambda_temper=2.0)
        assert tempered_levy_density(1.0, p) == pytest.approx(math.exp(-2.0))

    def test_symmetry(self):
        xs = np.array([0.01, 0.3, 1.7, 9.0])
        assert np.allclose(
            tempered_levy_density(xs, PARAMS), tempered_levy_density(-xs, PARAMS)
        )

    def test_singularity(self):
        with pytest.raises(DomainError):
            tempered_levy_density(0.0, PARAMS)

    def test_param_bounds(self):
        with pytest.raises(DomainError):
            TemperedParams(c_level=0.0, alpha=0.5, lambda_temper=1.0)
        with pytest.raises(DomainError):
            TemperedParams(c_level=1.0, alpha=2.0, lambda_temper=1.0)
        with pytest.raises(DomainError):
            TemperedParams(c_level=1.0, alpha=0.5, lambda_temper=-1.0)


class TestIntegrability:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5, 1.9])
    def test_finite(self, alpha):
        p = TemperedParams(c_level=1.0, alpha=alpha, lambda_temper=1.0)
        assert np.isfinite(levy_integrability_check(p, cutoff=1e-4))

    def test_riemann_oracle(self):
        cutoff = 1e-4
        value = levy_integrability_check(PARAMS, cutoff=cutoff)
        xs = np.linspace(cutoff, 60.0, 2_000_000)
        integrand = np.minimum(1.0, xs**2) * tempered_levy_density(xs, PARAMS)
        small = PARAMS.c_level * cutoff ** (2.0 - PARAMS.alpha) / (2.0 - PARAMS.alpha)
        oracle = 2.0 * (np.trapezoid(integrand, xs) + small)
        assert value == pytest.approx(oracle, rel=1e-4)

    def test_linear_in_c(self):
        doubled = TemperedParams(c_level=2.0, alpha=0.5, lambda_temper=1.0)
        assert levy_integrability_check(doubled, 1e-4) == pytest.approx(
            2.0 * levy_integrability_check(PARAMS, 1e-4), rel=1e-10
        )

    def test_bad_cutoff(self):
        with pytest.raises(DomainError):
            levy_integrability_check(PARAMS, cutoff=0.0)


class TestSimulation:
    def test_compensated_mean(self):
        grid = SimGrid(1.0, 250, 1.0)
        ps = simulate_tempered_jumps(PARAMS, grid, 20_000, seed=1, small_jump_cutoff=1e-3)
        terminal = ps.terminal()
        se = terminal.std(ddof=1) / math.sqrt(terminal.shape[0])
        assert abs(terminal.mean()) <= 3.0 * se

    def test_large_cutoff_no_jumps(self):
        ps = simulate_tempered_jumps(PARAMS, SimGrid(1.0, 50, 1.0), 100, seed=2,
                                     small_jump_cutoff=50.0)
        assert np.all(ps.paths == 0.0)

    def test_tail_exponent(self):
        # fine grid so that steps carry at most one jump almost surely
        grid = SimGrid(0.02, 500, 1.0)
        ps = simulate_tempered_jumps(PARAMS, grid, 5000, seed=3, small_jump_cutoff=1e-3)
        increments = np.diff(ps.paths, axis=1).ravel()
        jumps = np.abs(increments[np.abs(increments) > 1e-12])
        cut = 1e-3
        sel = jumps[(jumps >= cut) & (jumps <= 5 * cut)]
        hist, edges = np.histogram(sel, bins=np.geomspace(cut, 5 * cut, 12), density=True)
        mid = np.sqrt(edges[1:] * edges[:-1])
        slope = np.polyfit(np.log(mid), np.log(hist), 1)[0]
        assert slope == pytest.approx(-1.0 - PARAMS.alpha, abs=0.15)

    def test_tractability_guard(self):
        heavy = TemperedParams(c_level=100.0, alpha=1.9, lambda_temper=0.1)
        with pytest.raises(TractabilityError):
            simulate_tempered_jumps(heavy, SimGrid(10.0, 2, 1.0), 4, seed=4,
                                    small_jump_cutoff=1e-6)

    def test_determinism(self):
        grid = SimGrid(0.5, 64, 1.0)
        a = simulate_tempered_jumps(PARAMS, grid, 200, seed=5)
        b = simulate_tempered_jumps(PARAMS, grid, 200, seed=5)
        assert np.array_equal(a.paths, b.paths)

    def test_bad_cutoff(self):
        with pytest.raises(DomainError):
            simulate_tempered_jumps(PARAMS, SimGrid(1.0, 10, 1.0), 4, seed=6,
                                    small_jump_cutoff=0.0)
