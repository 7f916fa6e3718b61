"""Rolling long-variance strategy: monthly entries held to maturity.

A month is 21 trading days (synthetic calendar), so an m-month contract
spans 21*m bars and at most m contracts are ever alive.  Each contract is
marked daily with the scaled MtM of :func:`volkit.varswap.mtm_path`;
expired contracts bank their settle value (realized - K)/K, so the
cumulative curve at the end equals the sum of settle payoffs.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    CalendarGap,
    DegenerateSeries,
    MalformedRow,
    MissingFile,
    MissingStrikeData,
    TooShort,
)
from .marketdata import TRADING_DAYS_PER_YEAR, OhlcSeries
from .varswap import VarSwapTerms, _sabr_strike, mtm_path

DAYS_PER_MONTH = 21
MATURITY_MONTHS = (1, 3, 6, 12)


@dataclass(frozen=True)
class StrategyConfig:
    maturity_months: int
    start_index: int = 0
    entry_step_days: int = DAYS_PER_MONTH
    points: bool = False

    def __post_init__(self):
        if self.maturity_months not in MATURITY_MONTHS:
            raise ValueError(f"maturity must be one of {MATURITY_MONTHS} months")
        if self.start_index < 0 or self.entry_step_days < 1:
            raise ValueError("bad start index or entry step")

    @property
    def maturity_days(self) -> int:
        return DAYS_PER_MONTH * self.maturity_months

    @property
    def maturity_years(self) -> float:
        return self.maturity_days / TRADING_DAYS_PER_YEAR


@dataclass(frozen=True)
class EntryTerms:
    """Strike and inception SABR parameters for one entry date."""

    k_var: float
    alpha: float
    nu: float


@dataclass(frozen=True)
class ContractRecord:
    entry_index: int
    entry_date: str
    expiry_date: str
    k_var: float
    settle: float


@dataclass(frozen=True, eq=False)
class PnlReport:
    dates: tuple[str, ...]
    cum_mtm: np.ndarray
    ret_mtm: np.ndarray
    sharpe: float | None
    degenerate: bool
    contracts: tuple[ContractRecord, ...]
    max_simultaneous: int


def sharpe(ret_mtm) -> float:
    """Mean over standard deviation of the increments, no annualization."""
    x = np.asarray(getattr(ret_mtm, "values", ret_mtm), dtype=np.float64)
    if len(x) < 2:
        raise DegenerateSeries("need at least 2 increments")
    sd = float(x.std())
    if sd == 0.0:
        raise DegenerateSeries("zero standard deviation")
    return float(x.mean()) / sd


def run_long_strategy(closes: OhlcSeries, strikes: dict[str, EntryTerms],
                      config: StrategyConfig) -> PnlReport:
    """Enter a contract every entry step, hold each to maturity.

    ``strikes`` maps entry date labels to their terms; a missing entry
    date aborts.  Only contracts whose maturity fits inside the data are
    entered.  The report covers start_index .. end of data.
    """
    n = len(closes)
    mat = config.maturity_days
    if config.start_index >= n:
        raise CalendarGap(f"start index {config.start_index} beyond data ({n} bars)")
    if config.start_index + mat >= n:
        raise CalendarGap("data too short for a single contract")
    entries = list(range(config.start_index, n - mat, config.entry_step_days))
    report_dates = closes.dates[config.start_index:]
    horizon = len(report_dates)
    cum = np.zeros(horizon)
    live = np.zeros(horizon, dtype=np.int64)
    contracts = []
    for e in entries:
        date = closes.dates[e]
        if date not in strikes:
            raise MissingStrikeData(f"no strike for entry date {date}")
        terms = strikes[date]
        contract = VarSwapTerms(terms.k_var, config.maturity_years)
        path = mtm_path(contract, closes.close[e:e + mat + 1], terms.alpha, terms.nu)
        lo = e - config.start_index
        cum[lo:lo + mat + 1] += path.mtm
        cum[lo + mat + 1:] += path.mtm[-1]
        live[lo:lo + mat] += 1
        contracts.append(ContractRecord(e, date, closes.dates[e + mat],
                                        terms.k_var, float(path.mtm[-1])))
    ret = np.diff(cum)
    degenerate = len(ret) < 2 or float(ret.std()) == 0.0
    return PnlReport(report_dates, cum, ret,
                     None if degenerate else sharpe(ret), degenerate,
                     tuple(contracts), int(live.max()) if len(live) else 0)


def synthetic_strike_source(closes: OhlcSeries, config: StrategyConfig,
                            nu: float = 0.5, alpha_window: int = DAYS_PER_MONTH,
                            ) -> dict[str, EntryTerms]:
    """Fair-at-inception entries for self-contained tests.

    alpha is the trailing annualized close-to-close vol over
    ``alpha_window`` returns before the entry; the strike is the SABR
    value for (alpha, nu), so each contract marks to zero at entry.  A
    positive nu prices the strike above realized variance in a
    constant-vol world.
    """
    if config.start_index < alpha_window + 1:
        raise TooShort("start index must leave room for the trailing vol window")
    out = {}
    n = len(closes)
    for e in range(config.start_index, n - config.maturity_days, config.entry_step_days):
        window = closes.close[e - alpha_window - 1:e + 1]
        r = np.diff(np.log(window))
        alpha = math.sqrt(float(np.mean(r * r)) * TRADING_DAYS_PER_YEAR)
        if alpha <= 0.0:
            alpha = 1e-8
        k_var = _sabr_strike(alpha, nu, config.maturity_years)
        out[closes.dates[e]] = EntryTerms(k_var, alpha, nu)
    return out


def load_strike_csv(path: str | os.PathLike) -> dict[str, EntryTerms]:
    """Read `date,k_var,alpha,nu` rows (natural variance units)."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None
    if not lines or tuple(p.strip() for p in lines[0].split(",")) != ("date", "k_var", "alpha", "nu"):
        raise MalformedRow(1, "expected header date,k_var,alpha,nu")
    out = {}
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise MalformedRow(idx, f"expected 4 fields, got {len(parts)}")
        try:
            out[parts[0]] = EntryTerms(float(parts[1]), float(parts[2]), float(parts[3]))
        except ValueError:
            raise MalformedRow(idx, f"cannot parse {line!r}") from None
    return out
