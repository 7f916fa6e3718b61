"""Mean-reversion analytics: AR(1), half-life, augmented Dickey-Fuller.

The ADF regression is fixed to constant + trend with
p = floor((N-1)^(1/3)) lagged differences; its p-value is interpolated
from the embedded Dickey-Fuller trend-case critical-value table
(Banerjee, Dolado, Galbraith & Hendry 1993, Table 4.2, the table used by
the common R implementation) and clamped to [0.01, 0.99].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSample,
    Misaligned,
    NonStationaryCoefficient,
    SingularRegression,
    TooShort,
)

REJECT_LEVEL = 0.05

# rows: sample sizes; columns: left-tail p levels
_ADF_TABLE_N = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 1e5])
_ADF_TABLE_P = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_TABLE = -np.array([
    [4.38, 3.95, 3.60, 3.24, 1.14, 0.80, 0.50, 0.15],
    [4.15, 3.80, 3.50, 3.18, 1.19, 0.87, 0.58, 0.24],
    [4.04, 3.73, 3.45, 3.15, 1.22, 0.90, 0.62, 0.28],
    [3.99, 3.69, 3.43, 3.13, 1.23, 0.92, 0.64, 0.31],
    [3.98, 3.68, 3.42, 3.13, 1.24, 0.93, 0.65, 0.32],
    [3.96, 3.66, 3.41, 3.12, 1.25, 0.94, 0.66, 0.33],
])


@dataclass(frozen=True)
class Ar1Fit:
    """Least-squares y_t - m = A (y_{t-1} - m) + eps with m the sample mean."""

    coefficient: float
    mean: float
    residual_variance: float

    @property
    def stationary(self) -> bool:
        return abs(self.coefficient) < 1.0


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lag_order: int
    p_value: float   # clamped to [0.01, 0.99]
    n_obs: int

    @property
    def reject(self) -> bool:
        return self.p_value < REJECT_LEVEL


@dataclass(frozen=True, eq=False)
class SpreadSeries:
    """Pointwise y1 - y2 with unit hedge ratio."""

    values: np.ndarray
    left_label: str = ""
    right_label: str = ""

    def __len__(self) -> int:
        return len(self.values)


def _arr(x) -> np.ndarray:
    values = getattr(x, "values", x)
    return np.asarray(values, dtype=np.float64)


def fit_ar1(series) -> Ar1Fit:
    y = _arr(series)
    if len(y) < 10:
        raise TooShort("need at least 10 observations")
    m = float(y.mean())
    d = y - m
    denom = float(np.dot(d[:-1], d[:-1]))
    if denom <= 0.0 or float(d.var()) <= 0.0:
        raise DegenerateSample("zero variance")
    a = float(np.dot(d[1:], d[:-1]) / denom)
    resid = d[1:] - a * d[:-1]
    return Ar1Fit(a, m, float(resid.var()))


def half_life(coefficient: float) -> float:
    """Days for an AR(1) deviation to halve: ln(1/2)/ln|A|.

    A = 0 collapses immediately and is reported as 0 days rather than
    raising.
    """
    a = abs(coefficient)
    if a >= 1.0:
        raise NonStationaryCoefficient(f"|A| = {a} >= 1 never halves")
    if a == 0.0:
        return 0.0
    return math.log(0.5) / math.log(a)


def adf_test(series) -> AdfResult:
    """Unit-root test; rejection (p < 0.05) supports stationarity."""
    y = _arr(series)
    n = len(y)
    if n < 30:
        raise TooShort("need at least 30 observations")
    p = int(math.floor((n - 1) ** (1.0 / 3.0)))
    dy = np.diff(y)
    nd = len(dy)
    rows = nd - p
    if rows <= p + 3:
        raise TooShort("too few observations for the lag order")
    X = np.empty((rows, 3 + p))
    X[:, 0] = 1.0
    X[:, 1] = np.arange(p, nd, dtype=np.float64)
    X[:, 2] = y[p:nd]
    for j in range(1, p + 1):
        X[:, 2 + j] = dy[p - j:nd - j]
    b = dy[p:nd]
    coef, _, rank, _ = np.linalg.lstsq(X, b, rcond=None)
    if rank < X.shape[1]:
        raise SingularRegression("collinear ADF regressors (constant series?)")
    resid = b - X @ coef
    dof = rows - X.shape[1]
    s2 = float(resid @ resid) / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    se = math.sqrt(s2 * xtx_inv[2, 2])
    if se == 0.0:
        raise SingularRegression("zero standard error on the level coefficient")
    stat = float(coef[2] / se)
    crit = np.array([np.interp(nd, _ADF_TABLE_N, _ADF_TABLE[:, i])
                     for i in range(_ADF_TABLE.shape[1])])
    p_value = float(np.interp(stat, crit, _ADF_TABLE_P))
    return AdfResult(stat, p, p_value, nd)


def spread(y1, y2, left_label: str = "", right_label: str = "") -> SpreadSeries:
    a = _arr(y1)
    b = _arr(y2)
    if len(a) != len(b):
        raise Misaligned(f"lengths differ: {len(a)} vs {len(b)}")
    return SpreadSeries(a - b, left_label, right_label)


def correlation(y1, y2) -> float:
    """Pearson correlation of two aligned series."""
    a = _arr(y1)
    b = _arr(y2)
    if len(a) != len(b):
        raise Misaligned(f"lengths differ: {len(a)} vs {len(b)}")
    if len(a) < 3:
        raise TooShort("need at least 3 observations")
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va <= 0.0 or vb <= 0.0:
        raise DegenerateSample("zero variance")
    return float(np.dot(da, db) / math.sqrt(va * vb))


@dataclass(frozen=True, eq=False)
class StationarityScan:
    """ADF results and half-lives for single series and all beta=1 spreads."""

    labels: tuple[str, ...]
    singles: tuple[AdfResult, ...]
    half_lives: tuple[float | None, ...]
    pairwise: tuple[tuple[AdfResult | None, ...], ...] | None = None


def stationarity_scan(series_list, labels=None, pairwise: bool = False) -> StationarityScan:
    """Run the ADF battery on each series and, optionally, each spread.

    Half-lives come from the AR(1) fit and are None when |A| >= 1.  The
    pairwise matrix is symmetric with a None diagonal (a self-spread is
    identically zero).
    """
    arrays = [_arr(s) for s in series_list]
    if labels is None:
        labels = tuple(f"series{i}" for i in range(len(arrays)))
    labels = tuple(labels)
    if len(labels) != len(arrays):
        raise Misaligned("labels/series lengths differ")
    singles = tuple(adf_test(a) for a in arrays)
    hl: list[float | None] = []
    for a in arrays:
        coeff = fit_ar1(a).coefficient
        hl.append(half_life(coeff) if 0.0 < abs(coeff) < 1.0 else None)
    matrix = None
    if pairwise:
        if len(arrays) < 2:
            raise TooShort("pairwise scan needs at least two series")
        k = len(arrays)
        rows = []
        for i in range(k):
            row: list[AdfResult | None] = []
            for j in range(k):
                if i == j:
                    row.append(None)
                elif j < i:
                    row.append(rows[j][i])
                else:
                    row.append(adf_test(spread(arrays[i], arrays[j]).values))
            rows.append(row)
        matrix = tuple(tuple(r) for r in rows)
    return StationarityScan(labels, singles, tuple(hl), matrix)
