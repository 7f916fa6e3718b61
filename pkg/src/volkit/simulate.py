"""Euler path engine for the stochastic-vol models and zero-drift GBM.

The spot Brownian increment is z1 and the volatility one is
rho*z1 + sqrt(1-rho^2)*z2, so the volatility leg moves with rho only
through the mixing.  Paths are drawn in fixed-size blocks with one Philox
substream per block: results are byte-identical no matter how many
threads VOLKIT_THREADS allows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._kernels import kernels
from .errors import TooShort
from .marketdata import TRADING_DAYS_PER_YEAR, OhlcSeries, synthetic_dates
from .varswap import HestonParams, LambdaSabrParams, SabrParams, SteinParams


@dataclass(frozen=True)
class GbmParams:
    """Zero-drift geometric Brownian motion with constant volatility."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")


Model = GbmParams | SabrParams | HestonParams | SteinParams | LambdaSabrParams


@dataclass(frozen=True)
class SdeSpec:
    model: Model
    horizon_years: float

    def __post_init__(self):
        if self.horizon_years <= 0.0:
            raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class PathConfig:
    n_paths: int
    n_steps: int
    seed: int

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ValueError("n_paths and n_steps must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_paths: int


def correlated_increments(rng: np.random.Generator, n: int, rho: float,
                          dt: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """(dW1, dW2) pairs with correlation rho over a step of length dt."""
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    s = math.sqrt(dt)
    return s * z1, s * (rho * z1 + math.sqrt(1.0 - rho * rho) * z2)


def _model_rho(model: Model) -> float:
    return getattr(model, "rho", 0.0)


def _varint_block(model: Model, z1: np.ndarray, z2: np.ndarray, dt: float) -> np.ndarray:
    k = kernels()
    if isinstance(model, SabrParams):
        return k.sabr_varint(z1, z2, model.alpha, model.nu, model.rho, dt)
    if isinstance(model, HestonParams):
        return k.heston_varint(z1, z2, model.v0, model.kappa, model.theta,
                               model.nu, model.rho, dt)
    if isinstance(model, SteinParams):
        return k.stein_varint(z1, z2, model.sigma0, model.kappa, model.theta,
                              model.nu, model.rho, dt)
    if isinstance(model, LambdaSabrParams):
        return k.lambda_sabr_varint(z1, z2, model.alpha, model.kappa, model.theta,
                                    model.nu, model.rho, dt)
    if isinstance(model, GbmParams):
        return np.full(z1.shape[0], model.sigma * model.sigma * dt * z1.shape[1])
    raise TypeError(f"unknown model {type(model).__name__}")


def mc_variance_strike(spec: SdeSpec, config: PathConfig) -> McEstimate:
    """Monte-Carlo mean of (1/T) * trapezoidal integral of sigma_t^2."""
    T = spec.horizon_years
    dt = T / config.n_steps
    total = 0.0
    total_sq = 0.0

    def run_block(block: tuple[int, int]) -> tuple[float, float]:
        index, size = block
        rng = _rng.substream(config.seed, index)
        z1 = rng.standard_normal((size, config.n_steps))
        z2 = rng.standard_normal((size, config.n_steps))
        acc = _varint_block(spec.model, z1, z2, dt) / T
        return float(acc.sum()), float(np.dot(acc, acc))

    parts = _rng.ordered_map(run_block, _rng.path_blocks(config.n_paths))
    for s, s2 in parts:
        total += s
        total_sq += s2
    n = config.n_paths
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return McEstimate(mean, math.sqrt(var / n), n)


def simulate_paths(spec: SdeSpec, config: PathConfig,
                   s0: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Full Euler paths, shape (n_paths, n_steps+1): (spot, vol state).

    The vol state is sigma_t for the sigma-driven models (Stein's may go
    negative), the variance v_t for the square-root model (negative
    excursions are clipped only inside the coefficients), and the constant
    sigma for plain GBM.  Stepping matches the integrated-variance kernels
    exactly.
    """
    model = spec.model
    T = spec.horizon_years
    n_steps = config.n_steps
    dt = T / n_steps
    sqdt = math.sqrt(dt)
    rho = _model_rho(model)
    srho = math.sqrt(1.0 - rho * rho)

    spots = np.empty((config.n_paths, n_steps + 1))
    vols = np.empty((config.n_paths, n_steps + 1))
    row = 0
    for index, size in _rng.path_blocks(config.n_paths):
        rng = _rng.substream(config.seed, index)
        z1 = rng.standard_normal((size, n_steps))
        z2 = rng.standard_normal((size, n_steps))
        s = np.full(size, float(s0))
        spots[row:row + size, 0] = s
        if isinstance(model, GbmParams):
            v = np.full(size, model.sigma)
        elif isinstance(model, HestonParams):
            v = np.full(size, model.v0)
        elif isinstance(model, SteinParams):
            v = np.full(size, model.sigma0)
        else:
            v = np.full(size, model.alpha)
        vols[row:row + size, 0] = v
        for j in range(n_steps):
            dw1 = sqdt * z1[:, j]
            dw2 = sqdt * (rho * z1[:, j] + srho * z2[:, j])
            if isinstance(model, GbmParams):
                s = s + model.sigma * s * dw1
            elif isinstance(model, HestonParams):
                vp = np.maximum(v, 0.0)
                s = s + np.sqrt(vp) * s * dw1
                v = v + model.kappa * (model.theta - vp) * dt + model.nu * np.sqrt(vp) * dw2
            elif isinstance(model, SteinParams):
                s = s + v * s * dw1
                v = v + model.kappa * (model.theta - v) * dt + model.nu * dw2
            elif isinstance(model, SabrParams):
                s = s + v * np.power(s, model.beta) * dw1
                v = v + model.nu * v * dw2
            else:
                s = s + v * np.power(s, model.beta) * dw1
                v = v + model.kappa * (model.theta - v) * dt + model.nu * v * dw2
            spots[row:row + size, j + 1] = s
            vols[row:row + size, j + 1] = v
        row += size
    return spots, vols


def integrated_variance(spec: SdeSpec, vol_paths: np.ndarray) -> np.ndarray:
    """(1/T) trapezoid of sigma^2 along stored paths (cross-check helper)."""
    model = spec.model
    if isinstance(model, HestonParams):
        var = np.maximum(vol_paths, 0.0)
    else:
        var = vol_paths * vol_paths
    dt = spec.horizon_years / (vol_paths.shape[1] - 1)
    inner = 0.5 * (var[:, :-1] + var[:, 1:]).sum(axis=1) * dt
    return inner / spec.horizon_years


def gbm_bars_from_rng(rng: np.random.Generator, sigma_annualized: float, days: int,
                      intrabar_steps: int, s0: float = 100.0,
                      overnight_vol: float = 0.0) -> OhlcSeries:
    """One zero-drift GBM bar series using an already-positioned generator."""
    if days < 1 or intrabar_steps < 1:
        raise TooShort("need at least one day and one intrabar step")
    var_day = sigma_annualized**2 / TRADING_DAYS_PER_YEAR
    var_step = var_day / intrabar_steps
    z = rng.standard_normal((days, intrabar_steps))
    inc = -0.5 * var_step + math.sqrt(var_step) * z
    if overnight_vol > 0.0:
        gap_var = overnight_vol**2 / TRADING_DAYS_PER_YEAR
        gap = -0.5 * gap_var + math.sqrt(gap_var) * rng.standard_normal(days)
        gap[0] = 0.0
    else:
        gap = np.zeros(days)
    o, h, l, c = kernels().gbm_log_bars(inc, gap)
    log_s0 = math.log(s0)
    return OhlcSeries(np.exp(log_s0 + o), np.exp(log_s0 + h), np.exp(log_s0 + l),
                      np.exp(log_s0 + c), synthetic_dates(days), label="gbm")


def simulate_gbm_bars(sigma_annualized: float, days: int, intrabar_steps: int,
                      seed: int, s0: float = 100.0,
                      overnight_vol: float = 0.0) -> OhlcSeries:
    """Daily o/h/l/c carved from a fine zero-drift GBM walk.

    With ``overnight_vol`` left at zero each open equals the previous
    close; a positive value adds an independent lognormal overnight gap,
    whose variance the range-based estimators cannot see.
    """
    return gbm_bars_from_rng(_rng.substream(seed), sigma_annualized, days,
                             intrabar_steps, s0, overnight_vol)
