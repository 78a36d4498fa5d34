import cmath
import math

import numpy as np
import pytest

from levyforge.errors import DomainError, UnsupportedParameterizationError
from levyforge.processes import StableParams, sample_alpha_stable, stable_cf


class TestParams:
    def test_bounds(self):
        with pytest.raises(DomainError):
            StableParams(alpha=0.0)
        with pytest.raises(DomainError):
            StableParams(alpha=2.1)
        with pytest.raises(DomainError):
            StableParams(alpha=1.5, beta_skew=1.5)
        with pytest.raises(DomainError):
            StableParams(alpha=1.5, scale=0.0)


class TestCharacteristicFunction:
    def test_u_zero(self):
        assert stable_cf(0.0, 1.0, StableParams(alpha=1.5)) == pytest.approx(1.0 + 0.0j)

    def test_alpha_two_real_modulus(self):
        p = StableParams(alpha=2.0, beta_skew=0.7, gamma_loc=0.3, scale=0.5)
        u, t = 1.3, 2.0
        value = stable_cf(u, t, p)
        # tan(pi) = 0 kills the skew term: |cf| = exp(-t (scale u)^2), phase = gamma u
        assert abs(value) == pytest.approx(math.exp(-t * (0.5 * 1.3) ** 2), rel=1e-10)
        assert cmath.phase(value) == pytest.approx(0.3 * 1.3, abs=1e-12)

    def test_direct_point(self):
        p = StableParams(alpha=1.5, beta_skew=0.0, gamma_loc=0.0, scale=1.0)
        assert stable_cf(1.0, 1.0, p) == pytest.approx(math.exp(-1.0) + 0.0j)

    def test_alpha_one_unsupported(self):
        with pytest.raises(UnsupportedParameterizationError):
            stable_cf(1.0, 1.0, StableParams(alpha=1.0))
        with pytest.raises(UnsupportedParameterizationError):
            sample_alpha_stable(StableParams(alpha=1.0), 10, seed=0)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            stable_cf(1.0, -1.0, StableParams(alpha=1.5))


class TestSampler:
    def test_gaussian_reduction(self):
        p = StableParams(alpha=2.0, beta_skew=0.0, gamma_loc=0.0, scale=1.0 / math.sqrt(2.0))
        x = sample_alpha_stable(p, 200_000, seed=1)
        n = x.shape[0]
        assert abs(x.mean()) < 3.0 / math.sqrt(n)
        assert abs(x.var() - 1.0) < 3.0 * math.sqrt(2.0 / n)

    @pytest.mark.parametrize("alpha,beta", [(1.7, 0.0), (1.3, 0.0), (1.7, 0.5)])
    def test_ecf_matches_cf(self, alpha, beta):
        p = StableParams(alpha=alpha, beta_skew=beta, gamma_loc=0.1, scale=0.8)
        x = sample_alpha_stable(p, 200_000, seed=2)
        for u in (0.5, 1.0, 2.0):
            ecf = np.mean(np.exp(1j * u * x))
            assert abs(ecf - stable_cf(u, 1.0, p)) < 0.01

    def test_levy_distribution_positive(self):
        p = StableParams(alpha=0.5, beta_skew=1.0, gamma_loc=0.0, scale=1.0)
        x = sample_alpha_stable(p, 50_000, seed=3)
        assert np.all(x > 0.0)

    def test_determinism(self):
        p = StableParams(alpha=1.6)
        a = sample_alpha_stable(p, 1000, seed=4)
        b = sample_alpha_stable(p, 1000, seed=4)
        assert np.array_equal(a, b)

    def test_bad_count(self):
        with pytest.raises(DomainError):
            sample_alpha_stable(StableParams(alpha=1.5), 0, seed=0)
