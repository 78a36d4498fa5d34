import math

import numpy as np
import pytest

from levyforge.errors import DomainError, SizeError
from levyforge.processes import (
    HestonParams,
    SimGrid,
    fbm_increment_covariance,
    fbm_increments,
    simulate_fractional_heston,
)


class TestParams:
    def test_bounds(self):
        base = dict(mu=0.05, kappa=1.0, theta=0.04, xi=0.3, rho=-0.5, v0=0.04)
        with pytest.raises(DomainError):
            HestonParams(**{**base, "kappa": 0.0})
        with pytest.raises(DomainError):
            HestonParams(**{**base, "rho": 1.0})
        with pytest.raises(DomainError):
            HestonParams(**{**base, "hurst": 0.3})
        with pytest.raises(DomainError):
            HestonParams(**{**base, "hurst": 1.0})

    def test_feller_flag(self):
        ok = HestonParams(0.0, kappa=2.0, theta=0.09, xi=0.3, rho=0.0, v0=0.04)
        bad = HestonParams(0.0, kappa=0.5, theta=0.01, xi=0.9, rho=0.0, v0=0.04)
        assert ok.feller_ok and not bad.feller_ok


class TestFbm:
    def test_h_half_covariance_diagonal(self):
        cov = fbm_increment_covariance(0.5, 16, 0.01)
        assert np.allclose(cov, 0.01 * np.eye(16), atol=1e-15)

    def test_h_half_no_autocorrelation(self):
        inc = fbm_increments(0.5, 64, 0.01, 2000, seed=1)
        corr = np.corrcoef(inc[:, :-1].ravel(), inc[:, 1:].ravel())[0, 1]
        assert abs(corr) < 0.01

    def test_lag_one_autocorrelation_h75(self):
        # analytic lag-1 autocorrelation of fBM increments: 2^(2H-1) - 1
        inc = fbm_increments(0.75, 64, 0.01, 4000, seed=2)
        corr = np.corrcoef(inc[:, :-1].ravel(), inc[:, 1:].ravel())[0, 1]
        assert corr == pytest.approx(2.0 ** (2 * 0.75 - 1) - 1.0, abs=0.02)

    def test_variance_scaling(self):
        inc = fbm_increments(0.8, 32, 0.02, 4000, seed=3)
        assert inc.var() == pytest.approx(0.02 ** (2 * 0.8), rel=0.05)

    def test_step_bound(self):
        with pytest.raises(SizeError):
            fbm_increments(0.6, 5000, 0.001, 4, seed=4)


class TestFractionalHeston:
    def test_noise_free_limit(self):
        p = HestonParams(mu=0.05, kappa=2.0, theta=0.09, xi=0.0, rho=-0.5, v0=0.04, hurst=0.7)
        _, variance = simulate_fractional_heston(p, SimGrid(2.0, 500, 100.0), 3, seed=5)
        v = variance[0]
        assert np.all(np.diff(v) > 0.0)
        assert v[-1] == pytest.approx(0.09, abs=0.002)
        assert np.allclose(variance[0], variance[1])

    def test_positive_prices(self):
        p = HestonParams(mu=0.05, kappa=1.5, theta=0.05, xi=0.6, rho=-0.7, v0=0.05, hurst=0.55)
        prices, _ = simulate_fractional_heston(p, SimGrid(1.0, 128, 100.0), 256, seed=6)
        assert np.all(prices.paths > 0.0)
        assert np.all(prices.paths[:, 0] == 100.0)

    def test_driver_correlation(self):
        # recover the underlying white noises from the paths; their sample
        # correlation must match rho within 0.02 at >= 1e5 (path, step) pairs
        p = HestonParams(mu=0.05, kappa=2.0, theta=0.09, xi=0.4, rho=-0.6, v0=0.09, hurst=0.5)
        grid = SimGrid(1.0, 100, 100.0)
        prices, variance = simulate_fractional_heston(p, grid, 1100, seed=7)
        dt = grid.dt
        v_pos = np.maximum(variance[:, :-1], 0.0)
        usable = v_pos > 1e-12
        d_var = variance[:, 1:] - variance[:, :-1] - p.kappa * (p.theta - v_pos) * dt
        z_var = np.where(usable, d_var, 0.0) / np.where(usable, p.xi * np.sqrt(v_pos), 1.0)
        z_var /= math.sqrt(dt)
        d_log = np.diff(np.log(prices.paths), axis=1) - (p.mu - 0.5 * v_pos) * dt
        z_price = np.where(usable, d_log, 0.0) / np.where(usable, np.sqrt(v_pos * dt), 1.0)
        mask = usable.ravel()
        assert mask.sum() > 1e5
        corr = np.corrcoef(z_var.ravel()[mask], z_price.ravel()[mask])[0, 1]
        assert corr == pytest.approx(p.rho, abs=0.02)

    def test_determinism_and_prefix(self):
        p = HestonParams(mu=0.0, kappa=1.0, theta=0.04, xi=0.3, rho=0.2, v0=0.04, hurst=0.6)
        grid = SimGrid(0.5, 64, 10.0)
        a, va = simulate_fractional_heston(p, grid, 1200, seed=8)
        b, vb = simulate_fractional_heston(p, grid, 2000, seed=8)
        assert np.array_equal(a.paths, b.paths[:1200])
        assert np.array_equal(va, vb[:1200])

    def test_step_bound(self):
        p = HestonParams(mu=0.0, kappa=1.0, theta=0.04, xi=0.3, rho=0.0, v0=0.04)
        with pytest.raises(SizeError):
            simulate_fractional_heston(p, SimGrid(20.0, 5000, 100.0), 4, seed=9)
