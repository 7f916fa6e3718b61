"""Residual-quality diagnostics: moments, QQ data, ACF, Ljung-Box, vol-of-vol.

Moment estimators use population normalization (divide by n).  The
Ljung-Box p-value comes from the in-house regularized incomplete gamma
(:mod:`volkit._special`); decisions are strict: reject iff p < 0.05.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._special import chi2_sf
from .errors import (
    DegenerateSample,
    LagTooLarge,
    Misaligned,
    NonPositiveVol,
    TooShort,
    ZeroVol,
)
from .marketdata import ReturnSeries, VolSeries

REJECT_LEVEL = 0.05


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    values: np.ndarray
    dates: tuple[str, ...] | None = None
    method: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MomentsReport:
    skewness: float
    kurtosis: float  # non-excess; 3 for a Gaussian


@dataclass(frozen=True, eq=False)
class AcfResult:
    lags: np.ndarray
    values: np.ndarray
    n_obs: int

    @property
    def confidence_band(self) -> float:
        return 1.96 / math.sqrt(self.n_obs)


@dataclass(frozen=True)
class LjungBoxResult:
    q_stat: float
    lags: int
    p_value: float
    n_obs: int

    @property
    def reject(self) -> bool:
        return self.p_value < REJECT_LEVEL


def _values(x) -> np.ndarray:
    if isinstance(x, (ReturnSeries, VolSeries, ResidualSeries)):
        return x.values
    return np.asarray(x, dtype=np.float64)


def residuals(returns: ReturnSeries, vol: VolSeries, method: str = "") -> ResidualSeries:
    """Standardized residuals ret_t / sigma_t on the overlap of the dates.

    If either side has no date labels, the series are aligned by position
    and must have equal length.
    """
    if returns.dates is not None and vol.dates is not None:
        vol_by_date = dict(zip(vol.dates, vol.values))
        dates = [d for d in returns.dates if d in vol_by_date]
        if not dates:
            raise Misaligned("no overlapping dates")
        ret_by_date = dict(zip(returns.dates, returns.values))
        r = np.array([ret_by_date[d] for d in dates])
        v = np.array([vol_by_date[d] for d in dates])
        out_dates: tuple[str, ...] | None = tuple(dates)
    else:
        if len(returns) != len(vol):
            raise Misaligned("undated series must have equal length")
        r = returns.values
        v = vol.values
        out_dates = returns.dates or vol.dates
    if np.any(v <= 0.0):
        raise ZeroVol("volatility must be strictly positive where used")
    return ResidualSeries(r / v, out_dates, method)


def moments(series) -> MomentsReport:
    """Population skewness m3/m2^1.5 and kurtosis m4/m2^2 about the mean."""
    x = _values(series)
    if len(x) < 4:
        raise TooShort("need at least 4 observations")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 <= 0.0:
        raise DegenerateSample("zero variance")
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return MomentsReport(m3 / m2**1.5, m4 / (m2 * m2))


def qq_data(series) -> np.ndarray:
    """(theoretical normal quantile, empirical quantile) pairs, sorted.

    Theoretical quantiles at (k - 0.5)/n; empirical quantiles are the
    standardized order statistics.
    """
    x = _values(series)
    if len(x) < 4:
        raise TooShort("need at least 4 observations")
    sd = float(x.std())
    if sd <= 0.0:
        raise DegenerateSample("zero variance")
    n = len(x)
    theo = ndtri((np.arange(1, n + 1) - 0.5) / n)
    emp = np.sort((x - x.mean()) / sd)
    return np.column_stack([theo, emp])


def acf(series, max_lag: int | None = None) -> AcfResult:
    """Sample autocorrelations 1..max_lag (default floor(10*log10(N))).

    The denominator is the lag-0 sum, so every value lies in [-1, 1].
    """
    x = _values(series)
    n = len(x)
    if max_lag is None:
        max_lag = int(math.floor(10.0 * math.log10(n))) if n > 1 else 1
        max_lag = max(min(max_lag, n - 1), 1)
    if max_lag >= n:
        raise LagTooLarge(f"lag {max_lag} >= series length {n}")
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    d = x - x.mean()
    denom = float(np.dot(d, d))
    if denom <= 0.0:
        raise DegenerateSample("zero variance")
    vals = np.empty(max_lag)
    for lag in range(1, max_lag + 1):
        vals[lag - 1] = np.dot(d[:-lag], d[lag:]) / denom
    return AcfResult(np.arange(1, max_lag + 1), vals, n)


def ljung_box_from_acf(rho: np.ndarray, n_obs: int) -> LjungBoxResult:
    """Portmanteau statistic from autocorrelations at lags 1..h."""
    rho = np.asarray(rho, dtype=np.float64)
    h = len(rho)
    lags = np.arange(1, h + 1)
    q = float(n_obs * (n_obs + 2) * np.sum(rho * rho / (n_obs - lags)))
    return LjungBoxResult(q, h, chi2_sf(q, h), n_obs)


def ljung_box(series, h: int) -> LjungBoxResult:
    """Q = N(N+2) sum rho_i^2/(N-i); p from the chi-square(h) survival."""
    x = _values(series)
    if h < 1:
        raise ValueError("h must be >= 1")
    if h >= len(x):
        raise LagTooLarge(f"lag {h} >= series length {len(x)}")
    r = acf(x, max_lag=h)
    return ljung_box_from_acf(r.values, len(x))


def vol_of_vol(vol: VolSeries) -> float:
    """Population stdev of the log returns of the volatility series."""
    v = _values(vol)
    if len(v) < 3:
        raise TooShort("need at least 3 volatilities")
    if np.any(v <= 0.0):
        raise NonPositiveVol("volatilities must be strictly positive")
    lr = np.diff(np.log(v))
    return float(lr.std())


@dataclass(frozen=True, eq=False)
class MaLagScanEntry:
    window: int
    acf: AcfResult
    rho_at_window: float


def ma_window_lag_scan(returns: ReturnSeries, windows: list[int]) -> list[MaLagScanEntry]:
    """ACF of squared moving-average residuals, one entry per window.

    For each window w the vol in force on day t is the zero-mean standard
    deviation of the w returns through day t; residuals are ret_t/sigma_t
    and their squares are autocorrelated up to lag 2w.  The value at lag
    exactly w (the day a squared return drops out of the window) is
    surfaced separately.
    """
    r = returns.values
    n = len(r)
    out = []
    for w in windows:
        if w < 2 or w >= n / 2:
            raise LagTooLarge(f"window {w} must be in [2, N/2) for N={n}")
        csum = np.concatenate(([0.0], np.cumsum(r * r)))
        sig = np.sqrt((csum[w:] - csum[:-w]) / w)
        if np.any(sig <= 0.0):
            raise ZeroVol("flat stretch makes the moving-average vol zero")
        res = r[w - 1:] / sig
        sq = res * res
        result = acf(sq, max_lag=2 * w)
        out.append(MaLagScanEntry(w, result, float(result.values[w - 1])))
    return out
