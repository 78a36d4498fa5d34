"""Moment-matching calibration of Merton and fractional Heston parameters.

The calibration objective compares six statistics of daily log-returns
between the model and the observed series: annualized mean, annualized
variance, skewness, excess kurtosis, the normalized mean absolute deviation
E|r - E r| / sqrt(dt), and the annualized rate of threshold exceedances
|r - E r| > tau with tau frozen at five robust (median/MAD) daily sigmas of
the data.  The first four alone leave a flat ridge in (sigma, lam, delta) --
the diffusion variance absorbs whatever the jump part gives up while the
kurtosis only pins lam * delta^4 -- so the absolute deviation (concave
mixture weighting, statistically the most stable moment) and the exceedance
rate (a direct, binomially-accurate jump counter) are included to make the
diffusion/jump split well conditioned.

Model statistics are closed-form:

* Merton: exact compound-Poisson cumulants of the log-return, the absolute
  deviation as a Poisson-weighted sum of folded-normal means, and the
  exceedance rate as the matching Poisson mixture of normal tails;
* fractional Heston: quasi-stationary small-step approximations (variance at
  its stationary CIR law, skewness from the leverage covariation).  The Hurst
  exponent does not enter these marginal statistics and is therefore not
  identified by the loss; it is returned from the bounded net output (NN) or
  the search box (MPA) as-is.

Both calibrators operate on log-returns of the raw price series; scalers
belong to the forecasting pipeline.  The reported calibration error eps is
the RMSE between the scale-normalized model and empirical statistic vectors.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sstats

from .data import RawSeries, fit_standard
from .errors import CalibrationError, DomainError, ShapeError, SizeError
from .neural.dense import dense_backward, dense_forward, init_dense
from .neural.optim import adam_step, init_adam
from .optimizers import Bounds, SearchConfig, mpa_minimize
from .processes.params import HestonParams, MertonParams

__all__ = [
    "TRADING_DT",
    "MOMENT_SCALES",
    "DEFAULT_MERTON_BOUNDS",
    "DEFAULT_HESTON_BOUNDS",
    "LogNormalPriors",
    "RegularizationConfig",
    "NetConfig",
    "CalibrationResult",
    "calibration_error",
    "robust_jump_threshold",
    "empirical_log_return_stats",
    "merton_log_return_stats",
    "merton_stats_jacobian",
    "heston_log_return_stats",
    "heston_stats_jacobian",
    "moment_distance",
    "moment_loss",
    "regularized_loss",
    "nn_calibrate",
    "mpa_calibrate",
]

TRADING_DT = 1.0 / 252.0

# Approximate sampling scales of the six statistics for a daily series of a
# few thousand points; used to normalize the squared moment distance.
MOMENT_SCALES = np.array([0.1, 0.02, 0.5, 5.0, 0.005, 1.0])

_POISSON_TRUNCATION = 32
_JUMP_THRESHOLD_SIGMAS = 5.0
_DEFAULT_THRESHOLD = 0.05  # ~5 robust sigmas for a 20%-vol daily series

# Default search boxes; wide enough to envelope every parameter regime the
# calibrators are expected to meet.
DEFAULT_MERTON_BOUNDS = Bounds(
    np.array([-1.0, 0.001, 0.0, -1.0, 0.001]),
    np.array([1.0, 2.0, 10.0, 1.0, 1.0]),
)
DEFAULT_HESTON_BOUNDS = Bounds(
    np.array([-1.0, 0.01, 0.001, 0.01, -0.99, 0.51]),
    np.array([1.0, 5.0, 1.0, 2.0, 0.99, 0.99]),
)


def calibration_error(model_prices, market_prices) -> float:
    """RMSE between normalized model and market vectors."""
    model = np.asarray(model_prices, dtype=np.float64)
    market = np.asarray(market_prices, dtype=np.float64)
    if model.shape != market.shape or model.ndim != 1 or model.size == 0:
        raise ShapeError("model and market vectors must be equal-length and nonempty")
    return float(np.sqrt(np.mean((model - market) ** 2)))


def robust_jump_threshold(returns, multiple: float = _JUMP_THRESHOLD_SIGMAS) -> float:
    """multiple * 1.4826 * MAD of the returns (a jump-insensitive scale)."""
    r = np.asarray(returns, dtype=np.float64)
    mad = float(np.median(np.abs(r - np.median(r))))
    if mad == 0.0:
        raise DomainError("degenerate series: zero median absolute deviation")
    return multiple * 1.4826 * mad


def empirical_log_return_stats(
    returns, dt: float = TRADING_DT, threshold: float | None = None
) -> np.ndarray:
    """(annualized mean, annualized variance, skewness, excess kurtosis,
    normalized mean absolute deviation E|r - mean| / sqrt(dt), annualized
    rate of |r - mean| exceeding the jump threshold)."""
    r = np.asarray(returns, dtype=np.float64)
    if r.size < 4:
        raise SizeError("need at least 4 returns for the moment statistics")
    var = float(np.var(r))
    if var == 0.0:
        raise DomainError("degenerate series: zero return variance")
    if threshold is None:
        threshold = robust_jump_threshold(r)
    centered = r - np.mean(r)
    return np.array(
        [
            float(np.mean(r)) / dt,
            var / dt,
            float(_sstats.skew(r)),
            float(_sstats.kurtosis(r)),
            float(np.mean(np.abs(centered))) / math.sqrt(dt),
            float(np.mean(np.abs(centered) > threshold)) / dt,
        ]
    )


def _mixture_pieces(params: MertonParams, dt: float):
    """Poisson-mixture components of the centered return r - E r.

    Conditional on N jumps, r - E r ~ N(a_N, b_N^2) with a_N = (N - lam dt) m
    and b_N^2 = sigma^2 dt + N delta^2.
    """
    from scipy.special import gammaln

    lam, m, sigma, d = params.lam, params.m, params.sigma, params.delta
    n = np.arange(_POISSON_TRUNCATION + 1, dtype=np.float64)
    rate = lam * dt
    if rate > 0.0:
        p = np.exp(-rate + n * math.log(rate) - gammaln(n + 1.0))
    else:
        p = np.where(n == 0, 1.0, 0.0)
    a = (n - rate) * m
    b = np.sqrt(sigma**2 * dt + n * d**2)
    return n, p, a, b


def _std_normal_pdf(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _std_normal_sf(z: np.ndarray) -> np.ndarray:
    from scipy.special import erfc

    return 0.5 * erfc(z / math.sqrt(2.0))


def merton_log_return_stats(
    params: MertonParams, dt: float = TRADING_DT, threshold: float = _DEFAULT_THRESHOLD
) -> np.ndarray:
    """Exact model statistics of a one-step log-return.

    Log-return cumulants: c1 = (mu - sigma^2/2 - lam*k + lam*m) dt,
    c2 = (sigma^2 + lam (m^2 + delta^2)) dt, and for n >= 3 the compound
    Poisson part alone, c_n = lam dt E[J^n] with J ~ N(m, delta^2).  The
    absolute deviation and exceedance rate are Poisson mixtures of
    folded-normal means E|N(a, b^2)| = b sqrt(2/pi) exp(-a^2/2b^2)
    + a erf(a / b sqrt2) and of normal tail masses.
    """
    mu, sigma, lam, m, d = params.mu, params.sigma, params.lam, params.m, params.delta
    k = params.k
    c1 = (mu - 0.5 * sigma**2 - lam * k + lam * m) * dt
    c2 = (sigma**2 + lam * (m**2 + d**2)) * dt
    c3 = lam * (m**3 + 3.0 * m * d**2) * dt
    c4 = lam * (m**4 + 6.0 * m**2 * d**2 + 3.0 * d**4) * dt
    if c2 <= 0.0:
        raise DomainError("log-return variance must be positive")
    from scipy.special import erf

    _, p, a, b = _mixture_pieces(params, dt)
    t = np.divide(a, b, out=np.zeros_like(a), where=b > 0)
    h = b * math.sqrt(2.0 / math.pi) * np.exp(-0.5 * t * t) + a * erf(t / math.sqrt(2.0))
    mad = float(p @ h) / math.sqrt(dt)
    tail = _std_normal_sf(np.divide(threshold - a, b, out=np.full_like(a, np.inf), where=b > 0))
    tail += _std_normal_sf(np.divide(threshold + a, b, out=np.full_like(a, np.inf), where=b > 0))
    exceed = float(p @ tail) / dt
    return np.array([c1 / dt, c2 / dt, c3 / c2**1.5, c4 / c2**2, mad, exceed])


def merton_stats_jacobian(
    params: MertonParams, dt: float = TRADING_DT, threshold: float = _DEFAULT_THRESHOLD
) -> np.ndarray:
    """(6, 5) Jacobian of merton_log_return_stats w.r.t. (mu, sigma, lam, m, delta)."""
    from scipy.special import erf

    sigma, lam, m, d = params.sigma, params.lam, params.m, params.delta
    k = params.k
    kp = k + 1.0  # dk/dm; dk/ddelta = delta * kp

    c2 = (sigma**2 + lam * (m**2 + d**2)) * dt
    c3 = lam * (m**3 + 3.0 * m * d**2) * dt
    c4 = lam * (m**4 + 6.0 * m**2 * d**2 + 3.0 * d**4) * dt

    dc1 = np.array([dt, -sigma * dt, (m - k) * dt, lam * (1.0 - kp) * dt, -lam * d * kp * dt])
    dc2 = np.array([0.0, 2.0 * sigma * dt, (m**2 + d**2) * dt, 2.0 * lam * m * dt, 2.0 * lam * d * dt])
    dc3 = np.array([0.0, 0.0, (m**3 + 3 * m * d**2) * dt, lam * (3 * m**2 + 3 * d**2) * dt, 6.0 * lam * m * d * dt])
    dc4 = np.array([0.0, 0.0, (m**4 + 6 * m**2 * d**2 + 3 * d**4) * dt,
                    lam * (4 * m**3 + 12 * m * d**2) * dt, lam * (12 * m**2 * d + 12 * d**3) * dt])

    n, p, a, b = _mixture_pieces(params, dt)
    rate = lam * dt
    safe_b = np.where(b > 0, b, 1.0)
    t = np.where(b > 0, a / safe_b, 0.0)
    phi_t = math.sqrt(2.0 / math.pi) * np.exp(-0.5 * t * t)
    erf_t = erf(t / math.sqrt(2.0))
    h = b * phi_t + a * erf_t
    # Poisson weights differentiate via d p_n / d lam = dt (p_{n-1} - p_n)
    dp_dlam = dt * (np.concatenate([[0.0], p[:-1]]) - p)
    da_dlam = -dt * m
    da_dm = n - rate
    db_dsigma = np.where(b > 0, sigma * dt / safe_b, 0.0)
    db_ddelta = np.where(b > 0, n * d / safe_b, 0.0)

    # E|X| pieces: dh/da = erf(a / b sqrt2), dh/db = sqrt(2/pi) exp(-a^2/2b^2)
    dmad = np.array(
        [
            0.0,
            float(p @ (phi_t * db_dsigma)),
            float(dp_dlam @ h + p @ (erf_t * da_dlam)),
            float(p @ (erf_t * da_dm)),
            float(p @ (phi_t * db_ddelta)),
        ]
    ) / math.sqrt(dt)

    # tail pieces: P_N = S((tau - a)/b) + S((tau + a)/b)
    z_lo = np.where(b > 0, (threshold - a) / safe_b, np.inf)
    z_hi = np.where(b > 0, (threshold + a) / safe_b, np.inf)
    phi_lo, phi_hi = _std_normal_pdf(z_lo), _std_normal_pdf(z_hi)
    tail = _std_normal_sf(z_lo) + _std_normal_sf(z_hi)
    dtail_da = np.where(b > 0, (phi_lo - phi_hi) / safe_b, 0.0)
    dtail_db = np.where(b > 0, (phi_lo * (threshold - a) + phi_hi * (threshold + a)) / safe_b**2, 0.0)
    dexceed = np.array(
        [
            0.0,
            float(p @ (dtail_db * db_dsigma)),
            float(dp_dlam @ tail + p @ (dtail_da * da_dlam)),
            float(p @ (dtail_da * da_dm)),
            float(p @ (dtail_db * db_ddelta)),
        ]
    ) / dt

    jac = np.empty((6, 5))
    jac[0] = dc1 / dt
    jac[1] = dc2 / dt
    jac[2] = dc3 / c2**1.5 - 1.5 * c3 / c2**2.5 * dc2
    jac[3] = dc4 / c2**2 - 2.0 * c4 / c2**3 * dc2
    jac[4] = dmad
    jac[5] = dexceed
    return jac


def heston_log_return_stats(
    params: HestonParams, dt: float = TRADING_DT, threshold: float = _DEFAULT_THRESHOLD
) -> np.ndarray:
    """Quasi-stationary small-step approximations of the return statistics.

    With the variance at its stationary CIR law (mean theta, variance
    xi^2 theta / (2 kappa)) and kappa*dt << 1:
    mean = mu - theta/2, variance = theta,
    skewness = 3 rho xi sqrt(dt) / (2 sqrt(theta)) (leverage covariation),
    excess kurtosis = 3 Var(v) / theta^2 = 3 xi^2 / (2 kappa theta),
    normalized absolute deviation = sqrt(2/pi) E[sqrt(v)] with E[sqrt(v)]
    expanded to second order as sqrt(theta) (1 - xi^2 / (16 kappa theta)),
    exceedance rate = 2 S(tau / sqrt(theta dt)) / dt at the mean variance.
    """
    kappa, theta, xi = params.kappa, params.theta, params.xi
    s3 = 1.5 * params.rho * xi * math.sqrt(dt) / math.sqrt(theta)
    s4 = 1.5 * xi**2 / (kappa * theta)
    s5 = math.sqrt(2.0 / math.pi) * (math.sqrt(theta) - xi**2 / (16.0 * kappa * math.sqrt(theta)))
    z = threshold / math.sqrt(theta * dt)
    s6 = 2.0 * float(_std_normal_sf(np.array(z))) / dt
    return np.array([params.mu - 0.5 * theta, theta, s3, s4, s5, s6])


def heston_stats_jacobian(
    params: HestonParams, dt: float = TRADING_DT, threshold: float = _DEFAULT_THRESHOLD
) -> np.ndarray:
    """(6, 6) Jacobian w.r.t. (mu, kappa, theta, xi, rho, hurst)."""
    kappa, theta, xi, rho = params.kappa, params.theta, params.xi, params.rho
    sq = math.sqrt(dt)
    c = math.sqrt(2.0 / math.pi)
    jac = np.zeros((6, 6))
    jac[0, 0] = 1.0
    jac[0, 2] = -0.5
    jac[1, 2] = 1.0
    jac[2, 2] = -0.75 * rho * xi * sq * theta**-1.5
    jac[2, 3] = 1.5 * rho * sq / math.sqrt(theta)
    jac[2, 4] = 1.5 * xi * sq / math.sqrt(theta)
    jac[3, 1] = -1.5 * xi**2 / (kappa**2 * theta)
    jac[3, 2] = -1.5 * xi**2 / (kappa * theta**2)
    jac[3, 3] = 3.0 * xi / (kappa * theta)
    jac[4, 1] = c * xi**2 / (16.0 * kappa**2 * math.sqrt(theta))
    jac[4, 2] = c * (0.5 / math.sqrt(theta) + xi**2 / (32.0 * kappa * theta**1.5))
    jac[4, 3] = -c * xi / (8.0 * kappa * math.sqrt(theta))
    z = threshold / math.sqrt(theta * dt)
    jac[5, 2] = float(_std_normal_pdf(np.array(z))) * z / (theta * dt)
    return jac


def moment_distance(model_stats, emp_stats) -> float:
    """Scale-normalized squared distance between statistic vectors."""
    diff = (np.asarray(model_stats) - np.asarray(emp_stats)) / MOMENT_SCALES
    return float(np.sum(diff**2))


def moment_loss(params: MertonParams, series: RawSeries) -> float:
    """Squared distance between Merton model and empirical return statistics."""
    if len(series) < 30:
        raise SizeError("need at least 30 observations to calibrate")
    returns = series.log_returns()
    threshold = robust_jump_threshold(returns)
    emp = empirical_log_return_stats(returns, threshold=threshold)
    return moment_distance(merton_log_return_stats(params, threshold=threshold), emp)


@dataclass(frozen=True)
class LogNormalPriors:
    """Log-normal priors on the jump intensity and expected jump size k."""

    mu_lambda: float
    sigma_lambda: float
    mu_k: float
    sigma_k: float

    def __post_init__(self):
        if self.sigma_lambda <= 0.0 or self.sigma_k <= 0.0:
            raise DomainError("prior sigmas must be > 0")


@dataclass(frozen=True)
class RegularizationConfig:
    lambda_reg: float = 0.0
    priors: LogNormalPriors | None = None

    def __post_init__(self):
        if self.lambda_reg < 0.0:
            raise DomainError("lambda_reg must be >= 0")

    @property
    def active(self) -> bool:
        return self.lambda_reg > 0.0 or self.priors is not None


def _neg_log_lognormal(x: float, mu: float, sigma: float) -> float:
    if x <= 0.0:
        return math.inf
    z = (math.log(x) - mu) / sigma
    return math.log(x) + math.log(sigma) + 0.5 * math.log(2.0 * math.pi) + 0.5 * z * z


def regularized_loss(
    base: float, params: MertonParams, config: RegularizationConfig
) -> float:
    """base + lambda_reg * sigma/k, plus negative log-prior terms if priors
    are configured (a MAP-style penalty, not posterior inference)."""
    total = float(base)
    if config.lambda_reg > 0.0:
        if params.k <= 0.0:
            raise DomainError(
                f"sigma/k penalty needs k > 0, got k = {params.k:.6g}"
            )
        total += config.lambda_reg * params.sigma / params.k
    if config.priors is not None:
        pr = config.priors
        total += _neg_log_lognormal(params.lam, pr.mu_lambda, pr.sigma_lambda)
        total += _neg_log_lognormal(params.k, pr.mu_k, pr.sigma_k)
    return total


def _regularization_gradient(params: MertonParams, config: RegularizationConfig) -> np.ndarray:
    """d(penalty)/d(mu, sigma, lam, m, delta); zero where not differentiable."""
    grad = np.zeros(5)
    k = params.k
    kp = k + 1.0
    if config.lambda_reg > 0.0 and k > 0.0:
        grad[1] += config.lambda_reg / k
        grad[3] += -config.lambda_reg * params.sigma / k**2 * kp
        grad[4] += -config.lambda_reg * params.sigma / k**2 * params.delta * kp
    if config.priors is not None:
        pr = config.priors
        if params.lam > 0.0:
            grad[2] += 1.0 / params.lam + (math.log(params.lam) - pr.mu_lambda) / (
                pr.sigma_lambda**2 * params.lam
            )
        if k > 0.0:
            dk = 1.0 / k + (math.log(k) - pr.mu_k) / (pr.sigma_k**2 * k)
            grad[3] += dk * kp
            grad[4] += dk * params.delta * kp
    return grad


@dataclass(frozen=True)
class NetConfig:
    """Dense calibration net: input window length, two hidden layers.

    ``restarts`` independent seeded trainings are run and the best kept;
    gradients are clipped at ``grad_clip`` global norm to keep the sigmoid
    squashing layer from saturating early.
    """

    input_dim: int = 30
    hidden: tuple[int, int] = (32, 32)
    epochs: int = 600
    lr: float = 0.05
    restarts: int = 3
    grad_clip: float = 10.0


@dataclass(frozen=True)
class CalibrationResult:
    model_kind: str
    params: MertonParams | HestonParams
    epsilon: float
    runtime_seconds: float
    method: str
    seed: int

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be >= 0")

    def params_dict(self) -> dict:
        if isinstance(self.params, MertonParams):
            p = self.params
            return {"mu": p.mu, "sigma": p.sigma, "lambda": p.lam, "m": p.m, "delta": p.delta}
        p = self.params
        return {
            "mu": p.mu, "kappa": p.kappa, "theta": p.theta, "xi": p.xi,
            "rho": p.rho, "hurst": p.hurst, "v0": p.v0, "beta": p.beta,
        }

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model_kind,
                "method": self.method,
                "seed": self.seed,
                "runtime_seconds": self.runtime_seconds,
                "epsilon": self.epsilon,
                "params": self.params_dict(),
            },
            sort_keys=True,
        )


def _model_tools(model_kind: str):
    if model_kind == "merton":
        return (
            DEFAULT_MERTON_BOUNDS,
            lambda vec: MertonParams(*vec),
            merton_log_return_stats,
            merton_stats_jacobian,
        )
    if model_kind == "fractional_heston":
        def build(vec):
            mu, kappa, theta, xi, rho, hurst = vec
            # calibration assumes a stationary start: v0 pinned to theta
            return HestonParams(mu=mu, kappa=kappa, theta=theta, xi=xi,
                                rho=rho, v0=theta, hurst=hurst)
        return (
            DEFAULT_HESTON_BOUNDS,
            build,
            heston_log_return_stats,
            heston_stats_jacobian,
        )
    raise DomainError(f"unknown model kind {model_kind!r}")


def _epsilon(model_stats: np.ndarray, emp_stats: np.ndarray) -> float:
    return calibration_error(model_stats / MOMENT_SCALES, emp_stats / MOMENT_SCALES)


def nn_calibrate(
    series: RawSeries,
    model_kind: str = "merton",
    net_config: NetConfig | None = None,
    reg: RegularizationConfig | None = None,
    seed: int = 0,
) -> CalibrationResult:
    """Calibrate by training a dense net whose outputs are the parameters.

    The net maps the standardized trailing price window to raw outputs that
    a sigmoid squashes into the parameter box (so any net weights give valid
    parameters), and Adam minimizes the moment distance plus the optional
    regularization terms; gradients flow through the closed-form statistic
    Jacobians.  The best parameters seen during training are returned.

    Regularization penalties are Merton-specific and ignored for the
    fractional Heston model.
    """
    start = time.perf_counter()
    cfg = net_config or NetConfig()
    if len(series) < 30:
        raise SizeError("need at least 30 observations to calibrate")
    bounds, build, raw_stats, raw_jac = _model_tools(model_kind)
    lo, hi = bounds.lower, bounds.upper
    returns = series.log_returns()
    threshold = robust_jump_threshold(returns)
    emp = empirical_log_return_stats(returns, threshold=threshold)
    stats_fn = lambda p: raw_stats(p, threshold=threshold)
    jac_fn = lambda p: raw_jac(p, threshold=threshold)
    use_reg = reg is not None and reg.active and model_kind == "merton"

    window = fit_standard(series).transform(series)[-cfg.input_dim :]
    if window.shape[0] < cfg.input_dim:
        raise SizeError(f"series shorter than the net input window ({cfg.input_dim})")

    from .rng import stable_hash64

    best_loss, best_vec = math.inf, None
    for restart in range(max(1, cfg.restarts)):
        net = init_dense(
            (cfg.input_dim, *cfg.hidden, lo.shape[0]),
            seed=stable_hash64("nn_calibrate", seed, restart),
        )
        adam = init_adam(net.params, cfg.lr)
        for epoch in range(cfg.epochs):
            raw, cache = dense_forward(net, window)
            squash = 1.0 / (1.0 + np.exp(-raw))
            vec = lo + (hi - lo) * squash
            params = build(vec)
            model_stats = stats_fn(params)
            diff = (model_stats - emp) / MOMENT_SCALES
            loss = float(np.sum(diff**2))
            dl_dvec = jac_fn(params).T @ (2.0 * diff / MOMENT_SCALES)
            if use_reg:
                try:
                    loss = regularized_loss(loss, params, reg)
                    dl_dvec = dl_dvec + _regularization_gradient(params, reg)
                except DomainError:
                    loss = math.inf
            if not np.isfinite(loss):
                raise CalibrationError(f"nn calibration diverged at epoch {epoch}")
            if loss < best_loss:
                best_loss, best_vec = loss, vec.copy()
            dl_draw = dl_dvec * (hi - lo) * squash * (1.0 - squash)
            grads = dense_backward(net, cache, dl_draw)
            norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
            if norm > cfg.grad_clip:
                grads = [g * (cfg.grad_clip / norm) for g in grads]
            new_params, adam = adam_step(adam, net.params, grads)
            net = net.replace_params(new_params)

    params = build(best_vec)
    eps = _epsilon(stats_fn(params), emp)
    return CalibrationResult(
        model_kind=model_kind,
        params=params,
        epsilon=eps,
        runtime_seconds=time.perf_counter() - start,
        method="nn",
        seed=seed,
    )


def mpa_calibrate(
    series: RawSeries,
    model_kind: str = "merton",
    search_config: SearchConfig | None = None,
    reg: RegularizationConfig | None = None,
    seed: int = 0,
) -> CalibrationResult:
    """Calibrate by Marine Predators search over the parameter box.

    Same objective as nn_calibrate (moment distance plus optional Merton
    regularization); parameter combinations where the penalty is undefined
    score as infinitely bad rather than aborting the search.
    """
    start = time.perf_counter()
    if len(series) < 30:
        raise SizeError("need at least 30 observations to calibrate")
    bounds, build, raw_stats, _ = _model_tools(model_kind)
    returns = series.log_returns()
    threshold = robust_jump_threshold(returns)
    emp = empirical_log_return_stats(returns, threshold=threshold)
    stats_fn = lambda p: raw_stats(p, threshold=threshold)
    use_reg = reg is not None and reg.active and model_kind == "merton"
    config = search_config or SearchConfig(population=25, iterations=150, seed=seed)

    def objective(vec):
        params = build(vec)
        loss = moment_distance(stats_fn(params), emp)
        if use_reg:
            try:
                loss = regularized_loss(loss, params, reg)
            except DomainError:
                return math.inf
        return loss

    result = mpa_minimize(objective, bounds, config)
    params = build(result.best.position)
    eps = _epsilon(stats_fn(params), emp)
    return CalibrationResult(
        model_kind=model_kind,
        params=params,
        epsilon=eps,
        runtime_seconds=time.perf_counter() - start,
        method="mpa",
        seed=seed,
    )
