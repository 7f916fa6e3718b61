"""Historical volatility estimators on daily OHLC bars.

All estimates are daily volatilities under the zero-mean-return
convention; annualize with :func:`volkit.marketdata.annualize`.
Close-linked estimators (close-to-close, GKYZ, Yang-Zhang) consume one
bar for the previous close, so they see one fewer observation than the
bar count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _rng
from .errors import DegenerateVariance, NegativeVarianceEstimate, TooShort, WindowTooLarge
from .marketdata import DAILY, OhlcSeries, VolSeries

LN2 = math.log(2.0)

# Cross-term weight on (ln c/o)^2 in the Garman-Klass family.  The classic
# construction uses 2*ln(2) - 1; with 2*ln(2) the estimator would be
# centered at zero on driftless data.
GK_CROSS = 2.0 * LN2 - 1.0

# Yang-Zhang open-to-close weight numerator.  Default kept at 10.34; the
# standard literature value is 0.34 (see ``yz_k_numerator`` arguments).
YZ_K_NUMERATOR = 10.34


class EstimatorKind(str, Enum):
    CLOSE_TO_CLOSE = "close-to-close"
    PARKINSON = "parkinson"
    GARMAN_KLASS = "garman-klass"
    ROGERS_SATCHELL = "rogers-satchell"
    GKYZ = "gkyz"
    YANG_ZHANG = "yang-zhang"
    MOVING_AVERAGE = "moving-average"
    CONSTANT_VOL = "constant-vol"


# kinds whose per-bar term needs the previous close
_NEEDS_PREV_CLOSE = {
    EstimatorKind.CLOSE_TO_CLOSE,
    EstimatorKind.GKYZ,
    EstimatorKind.YANG_ZHANG,
    EstimatorKind.MOVING_AVERAGE,
    EstimatorKind.CONSTANT_VOL,
}


@dataclass(frozen=True)
class EfficiencyReport:
    """Variance ratio of the close-to-close estimator to another kind."""

    kind: EstimatorKind
    efficiency: float
    estimator_variance: float
    reference_variance: float


def _mean_sq_returns(closes: np.ndarray) -> float:
    r = np.diff(np.log(closes))
    return float(np.mean(r * r))


def _parkinson_terms(h, l):
    x = np.log(h / l)
    return x * x / (4.0 * LN2)


def _gk_terms(o, h, l, c):
    hl = np.log(h / l)
    co = np.log(c / o)
    return 0.5 * hl * hl - GK_CROSS * co * co


def _rs_terms(o, h, l, c):
    return np.log(h / c) * np.log(h / o) + np.log(l / c) * np.log(l / o)


def _gkyz_terms(o, h, l, c, prev_c):
    oc = np.log(o / prev_c)
    return oc * oc + _gk_terms(o, h, l, c)


def _yang_zhang_var(o, h, l, c, prev_c, k_numerator: float) -> float:
    n = len(c)
    if n < 2:
        raise TooShort("Yang-Zhang needs at least 3 bars")
    overnight = np.log(o / prev_c)
    open_close = np.log(c / o)
    s2_on = float(np.sum((overnight - overnight.mean()) ** 2) / (n - 1))
    s2_oc = float(np.sum((open_close - open_close.mean()) ** 2) / (n - 1))
    s2_rs = float(np.mean(_rs_terms(o, h, l, c)))
    k = k_numerator / (1.34 + (n + 1) / (n - 1))
    return s2_on + k * s2_oc + (1.0 - k) * s2_rs


def _finish(var: float, kind: EstimatorKind) -> float:
    if var < 0.0:
        raise NegativeVarianceEstimate(
            f"{kind.value} variance came out negative ({var:.3e}); not clamping")
    return math.sqrt(var)


def estimate_vol(series: OhlcSeries, kind: EstimatorKind, window: int | None = None,
                 yz_k_numerator: float = YZ_K_NUMERATOR) -> float:
    """Single full-sample daily volatility estimate.

    ``window`` is only meaningful for MOVING_AVERAGE, where the estimate
    uses the last ``window`` bars.  ``yz_k_numerator`` switches the
    Yang-Zhang weight between the 10.34 default and the standard 0.34.
    """
    kind = EstimatorKind(kind)
    o, h, l, c = series.open, series.high, series.low, series.close
    n = len(series)
    if kind is EstimatorKind.PARKINSON:
        return _finish(float(np.mean(_parkinson_terms(h, l))), kind)
    if kind is EstimatorKind.GARMAN_KLASS:
        return _finish(float(np.mean(_gk_terms(o, h, l, c))), kind)
    if kind is EstimatorKind.ROGERS_SATCHELL:
        return _finish(float(np.mean(_rs_terms(o, h, l, c))), kind)
    if n < 2:
        raise TooShort(f"{kind.value} needs a previous close (>= 2 bars)")
    if kind in (EstimatorKind.CLOSE_TO_CLOSE, EstimatorKind.CONSTANT_VOL):
        return math.sqrt(_mean_sq_returns(c))
    if kind is EstimatorKind.GKYZ:
        return _finish(float(np.mean(_gkyz_terms(o[1:], h[1:], l[1:], c[1:], c[:-1]))), kind)
    if kind is EstimatorKind.YANG_ZHANG:
        if n < 3:
            raise TooShort("Yang-Zhang needs at least 3 bars")
        return _finish(_yang_zhang_var(o[1:], h[1:], l[1:], c[1:], c[:-1], yz_k_numerator), kind)
    if kind is EstimatorKind.MOVING_AVERAGE:
        if window is None:
            raise ValueError("moving-average needs a window")
        if window < 2:
            raise TooShort("window must be >= 2 bars")
        if window > n:
            raise WindowTooLarge(f"window {window} > series length {n}")
        return math.sqrt(_mean_sq_returns(c[n - window:]))
    raise ValueError(f"unhandled kind {kind}")


def rolling_vol(series: OhlcSeries, kind: EstimatorKind, window: int,
                yz_k_numerator: float = YZ_K_NUMERATOR) -> VolSeries:
    """Windowed daily-vol series; value at t uses bars t-window+1 .. t.

    The first window-1 dates are absent from the output.  CONSTANT_VOL
    repeats the full-sample estimate.  Close-linked kinds use only the
    window-1 in-window observations.
    """
    kind = EstimatorKind(kind)
    n = len(series)
    if window < 2:
        raise TooShort("window must be >= 2 bars")
    if window > n:
        raise WindowTooLarge(f"window {window} > series length {n}")
    out_dates = series.dates[window - 1:]
    if kind is EstimatorKind.CONSTANT_VOL:
        value = estimate_vol(series, EstimatorKind.CLOSE_TO_CLOSE)
        return VolSeries(np.full(n - window + 1, value), DAILY, out_dates)
    if kind in (EstimatorKind.CLOSE_TO_CLOSE, EstimatorKind.MOVING_AVERAGE):
        r = np.diff(np.log(series.close))
        var = _rolling_mean(r * r, window - 1)
        return VolSeries(np.sqrt(var), DAILY, out_dates)
    if kind is EstimatorKind.PARKINSON:
        terms = _parkinson_terms(series.high, series.low)
        return VolSeries(np.sqrt(_rolling_mean(terms, window)), DAILY, out_dates)
    if kind is EstimatorKind.ROGERS_SATCHELL:
        terms = _rs_terms(series.open, series.high, series.low, series.close)
        return VolSeries(np.sqrt(np.maximum(_rolling_mean(terms, window), 0.0)), DAILY, out_dates)
    if kind is EstimatorKind.GARMAN_KLASS:
        terms = _gk_terms(series.open, series.high, series.low, series.close)
        return VolSeries(np.sqrt(_guard_neg(_rolling_mean(terms, window), kind)), DAILY, out_dates)
    if kind is EstimatorKind.GKYZ:
        terms = _gkyz_terms(series.open[1:], series.high[1:], series.low[1:],
                            series.close[1:], series.close[:-1])
        return VolSeries(np.sqrt(_guard_neg(_rolling_mean(terms, window - 1), kind)),
                         DAILY, out_dates)
    if kind is EstimatorKind.YANG_ZHANG:
        if window < 3:
            raise TooShort("Yang-Zhang window must be >= 3 bars")
        o, h, l, c = series.open, series.high, series.low, series.close
        values = np.empty(n - window + 1)
        for i, t in enumerate(range(window - 1, n)):
            s = t - window + 1
            var = _yang_zhang_var(o[s + 1:t + 1], h[s + 1:t + 1], l[s + 1:t + 1],
                                  c[s + 1:t + 1], c[s:t], yz_k_numerator)
            values[i] = math.sqrt(_guard_neg(var, kind))
        return VolSeries(values, DAILY, out_dates)
    raise ValueError(f"unhandled kind {kind}")


def _guard_neg(var, kind):
    neg = np.min(var) if np.ndim(var) else var
    if neg < 0.0:
        raise NegativeVarianceEstimate(
            f"{kind.value} variance came out negative ({float(neg):.3e}); not clamping")
    return var


def _rolling_mean(x: np.ndarray, w: int) -> np.ndarray:
    c = np.concatenate(([0.0], np.cumsum(x)))
    return (c[w:] - c[:-w]) / w


def efficiency(kind: EstimatorKind, gbm_vol: float = 0.2, horizon_days: int = 252,
               trials: int = 2000, intrabar_steps: int = 390, seed: int = 0,
               window: int | None = None,
               yz_k_numerator: float = YZ_K_NUMERATOR) -> EfficiencyReport:
    """Monte-Carlo efficiency of ``kind`` against close-to-close.

    Each trial simulates one zero-drift GBM bar series (annualized vol
    ``gbm_vol``, no overnight gaps) and evaluates both estimators on it,
    so the comparison uses common random numbers.  Trial i draws from the
    substream (seed, i); results do not depend on VOLKIT_THREADS.
    """
    from . import simulate  # local import: simulate also feeds other modules

    kind = EstimatorKind(kind)
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if intrabar_steps < 100:
        raise ValueError("need at least 100 intrabar steps")

    def one_trial(i: int) -> tuple[float, float]:
        bars = simulate.gbm_bars_from_rng(_rng.substream(seed, i), gbm_vol,
                                          horizon_days, intrabar_steps)
        est = estimate_vol(bars, kind, window=window, yz_k_numerator=yz_k_numerator)
        ref = estimate_vol(bars, EstimatorKind.CLOSE_TO_CLOSE)
        return est, ref

    pairs = _rng.ordered_map(one_trial, range(trials))
    est = np.array([p[0] for p in pairs])
    ref = np.array([p[1] for p in pairs])
    est_var = float(est.var())
    ref_var = float(ref.var())
    if est_var == 0.0:
        raise DegenerateVariance("estimator variance is zero across trials")
    eff = 1.0 if kind is EstimatorKind.CLOSE_TO_CLOSE else ref_var / est_var
    return EfficiencyReport(kind, eff, est_var, ref_var)
