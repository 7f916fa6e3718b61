"""Price/volatility series containers and CSV ingestion.

Dates are carried as opaque ISO-8601 labels in strictly increasing order;
positions in the arrays are the trading-day ordinals.  All containers are
immutable after construction and all operations are pure.
"""
from __future__ import annotations

import datetime
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlreadyAnnualized,
    EmptySeries,
    MalformedRow,
    MissingFile,
    OrderViolation,
    TooShort,
)

TRADING_DAYS_PER_YEAR = 252

OHLC_HEADER = ("date", "open", "high", "low", "close")
CLOSE_HEADER = ("date", "close")

DAILY = "daily"
ANNUALIZED = "annualized"


def _as_float_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a 1-d sequence")
    return np.ascontiguousarray(arr)


def synthetic_dates(n: int, start: int = 0) -> tuple[str, ...]:
    """Ordinal placeholder labels d000000, d000001, ... (sort like dates)."""
    return tuple(f"d{start + i:06d}" for i in range(n))


def _check_dates(dates: tuple[str, ...]) -> None:
    for i in range(1, len(dates)):
        if dates[i] <= dates[i - 1]:
            raise OrderViolation(i + 2, f"dates not strictly increasing at {dates[i]!r}")


@dataclass(frozen=True, eq=False)
class OhlcSeries:
    """Daily bars for one asset. Bar invariants are enforced at construction."""

    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    dates: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        for name in ("open", "high", "low", "close"):
            object.__setattr__(self, name, _as_float_array(getattr(self, name)))
        n = len(self.close)
        if n == 0:
            raise EmptySeries("series must contain at least one bar")
        if not (len(self.open) == len(self.high) == len(self.low) == n == len(self.dates)):
            raise ValueError("open/high/low/close/dates lengths differ")
        object.__setattr__(self, "dates", tuple(self.dates))
        _check_dates(self.dates)
        for i in range(n):
            _check_bar(self.open[i], self.high[i], self.low[i], self.close[i], line_no=i + 2)

    def __len__(self) -> int:
        return len(self.close)

    def slice(self, start: int, stop: int) -> "OhlcSeries":
        return OhlcSeries(self.open[start:stop], self.high[start:stop],
                          self.low[start:stop], self.close[start:stop],
                          self.dates[start:stop], self.label)


def _check_bar(o, h, l, c, line_no):
    if not all(math.isfinite(x) and x > 0.0 for x in (o, h, l, c)):
        raise OrderViolation(line_no, "prices must be finite and strictly positive")
    if l > min(o, c) or h < max(o, c):
        raise OrderViolation(line_no, f"need low <= min(open, close) <= max(open, close) <= high, "
                                      f"got o={o} h={h} l={l} c={c}")


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Natural-log close-to-close returns; one value per date label."""

    values: np.ndarray
    dates: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if self.dates is not None:
            object.__setattr__(self, "dates", tuple(self.dates))
            if len(self.dates) != len(self.values):
                raise ValueError("dates/values lengths differ")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class VolSeries:
    """Per-date volatilities with an explicit daily/annualized scale flag."""

    values: np.ndarray
    scale: str = DAILY
    dates: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if self.scale not in (DAILY, ANNUALIZED):
            raise ValueError(f"scale must be {DAILY!r} or {ANNUALIZED!r}")
        if np.any(self.values < 0.0) or not np.all(np.isfinite(self.values)):
            raise ValueError("volatilities must be finite and nonnegative")
        if self.dates is not None:
            object.__setattr__(self, "dates", tuple(self.dates))
            if len(self.dates) != len(self.values):
                raise ValueError("dates/values lengths differ")

    def __len__(self) -> int:
        return len(self.values)


def _parse_price(token: str, line_no: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedRow(line_no, f"cannot parse {column}={token!r} as a decimal") from None
    if not math.isfinite(value):
        raise MalformedRow(line_no, f"{column}={token!r} is not finite")
    return value


def _parse_date(token: str, line_no: int) -> str:
    try:
        datetime.date.fromisoformat(token)
    except ValueError:
        raise MalformedRow(line_no, f"cannot parse date {token!r} (want ISO-8601)") from None
    return token


def load_ohlc_csv(path: str | os.PathLike) -> OhlcSeries:
    """Read `date,open,high,low,close` (or `date,close`) rows into a series.

    Rows are sorted by date; any bar violating price ordering is rejected
    with its 1-based line number.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None
    return parse_ohlc_csv(text, label=os.path.splitext(os.path.basename(str(path)))[0])


def parse_ohlc_csv(text: str, label: str = "") -> OhlcSeries:
    lines = text.splitlines()
    if not lines:
        raise EmptySeries("file is empty")
    header = tuple(part.strip() for part in lines[0].split(","))
    if header == OHLC_HEADER:
        close_only = False
    elif header == CLOSE_HEADER:
        close_only = True
    else:
        raise MalformedRow(1, f"unexpected header {lines[0]!r}")
    rows = []
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        want = 2 if close_only else 5
        if len(parts) != want:
            raise MalformedRow(idx, f"expected {want} fields, got {len(parts)}")
        date = _parse_date(parts[0], idx)
        if close_only:
            c = _parse_price(parts[1], idx, "close")
            o = h = l = c
        else:
            o = _parse_price(parts[1], idx, "open")
            h = _parse_price(parts[2], idx, "high")
            l = _parse_price(parts[3], idx, "low")
            c = _parse_price(parts[4], idx, "close")
        _check_bar(o, h, l, c, line_no=idx)
        rows.append((date, o, h, l, c, idx))
    if not rows:
        raise EmptySeries("no data rows after header")
    rows.sort(key=lambda r: r[0])
    for i in range(1, len(rows)):
        if rows[i][0] == rows[i - 1][0]:
            raise OrderViolation(rows[i][5], f"duplicate date {rows[i][0]!r}")
    dates = tuple(r[0] for r in rows)
    cols = list(zip(*[r[1:5] for r in rows]))
    return OhlcSeries(np.array(cols[0]), np.array(cols[1]), np.array(cols[2]),
                      np.array(cols[3]), dates, label=label)


def serialize_ohlc_csv(series: OhlcSeries) -> str:
    """Canonical CSV text (LF, shortest round-trip decimals)."""
    buf = io.StringIO()
    buf.write(",".join(OHLC_HEADER) + "\n")
    for i in range(len(series)):
        buf.write(f"{series.dates[i]},{float(series.open[i])!r},{float(series.high[i])!r},"
                  f"{float(series.low[i])!r},{float(series.close[i])!r}\n")
    return buf.getvalue()


def save_ohlc_csv(series: OhlcSeries, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_ohlc_csv(series))


def serialize_value_csv(dates, values, value_name: str = "value") -> str:
    buf = io.StringIO()
    buf.write(f"date,{value_name}\n")
    if dates is None:
        dates = synthetic_dates(len(values))
    for d, v in zip(dates, values):
        buf.write(f"{d},{float(v)!r}\n")
    return buf.getvalue()


def load_value_csv(path: str | os.PathLike) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a two-column `date,<name>` CSV back into (dates, values)."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None
    if not lines:
        raise EmptySeries("file is empty")
    dates = []
    values = []
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise MalformedRow(idx, f"expected 2 fields, got {len(parts)}")
        dates.append(parts[0])
        values.append(_parse_price(parts[1], idx, "value"))
    if not values:
        raise EmptySeries("no data rows after header")
    return tuple(dates), np.array(values)


def log_returns(series) -> ReturnSeries:
    """ln(c_t / c_{t-1}) for t = 1..N-1.

    Accepts an OhlcSeries (closes are used, dates kept) or any positive
    price sequence.
    """
    if isinstance(series, OhlcSeries):
        closes = series.close
        dates = series.dates[1:]
    else:
        closes = _as_float_array(series)
        dates = None
    if len(closes) < 2:
        raise TooShort("need at least two prices for a return")
    if np.any(closes <= 0.0):
        raise ValueError("prices must be strictly positive")
    return ReturnSeries(np.diff(np.log(closes)), dates)


def annualize(vol: VolSeries, periods_per_year: int = TRADING_DAYS_PER_YEAR) -> VolSeries:
    """Scale a daily series by sqrt(periods_per_year)."""
    if vol.scale == ANNUALIZED:
        raise AlreadyAnnualized("series is already annualized")
    return VolSeries(vol.values * math.sqrt(periods_per_year), ANNUALIZED, vol.dates)
