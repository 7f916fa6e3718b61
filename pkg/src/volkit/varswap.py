"""Variance-swap pricing: replication, closed forms, volvol inversion, MtM.

Conventions
-----------
* Option prices are undiscounted and normalized by the forward, strikes in
  fraction-of-forward; with these units the discount factors in the
  replication identity cancel and no spot prefactor is needed.
* Strikes and internal variances are in natural units (0.04 = 20% vol);
  the 100x variance-points convention is applied only by
  :func:`realized_variance` and at reporting boundaries.
* Closed-form strikes never depend on rho or beta; both are carried on
  the parameter types for simulation use.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    EmptyChain,
    MalformedRow,
    MissingFile,
    NoRoot,
    SingularParameters,
    TimeOutOfRange,
    TooShort,
    UnsortedStrikes,
)
from .marketdata import TRADING_DAYS_PER_YEAR, OhlcSeries

VARIANCE_POINTS = 100.0
_TAYLOR_CUT = 1e-6

PUT = "put"
CALL = "call"


# --- parameter/type bundles --------------------------------------------------

@dataclass(frozen=True)
class VarSwapTerms:
    """Contract terms; the strike is in natural variance units."""

    k_var: float
    maturity_years: float
    notional: float = 1.0

    def __post_init__(self):
        if self.k_var < 0.0:
            raise ValueError("k_var must be nonnegative")
        if self.maturity_years <= 0.0:
            raise ValueError("maturity must be positive")


@dataclass(frozen=True)
class OptionQuote:
    """Out-of-the-money quote: strike in fraction of forward, price
    undiscounted and forward-normalized."""

    strike_pct: float
    side: str
    price: float

    def __post_init__(self):
        if self.side not in (PUT, CALL):
            raise ValueError(f"side must be '{PUT}' or '{CALL}'")
        if self.strike_pct <= 0.0:
            raise ValueError("strike must be positive")
        if self.side == PUT and self.strike_pct > 1.0:
            raise ValueError("puts must have strike <= forward")
        if self.side == CALL and self.strike_pct < 1.0:
            raise ValueError("calls must have strike >= forward")
        if self.price < 0.0:
            raise ValueError("price must be nonnegative")


@dataclass(frozen=True)
class OptionChain:
    spot: float
    rate: float
    maturity_years: float
    puts: tuple[OptionQuote, ...]
    calls: tuple[OptionQuote, ...]

    def __post_init__(self):
        if self.spot <= 0.0 or self.maturity_years <= 0.0:
            raise ValueError("spot and maturity must be positive")

    @property
    def forward(self) -> float:
        return self.spot * math.exp(self.rate * self.maturity_years)


@dataclass(frozen=True)
class SabrParams:
    alpha: float
    nu: float
    rho: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        _check(self.alpha > 0, "alpha must be positive")
        _check(self.nu >= 0, "nu must be nonnegative")
        _check(-1.0 <= self.rho <= 1.0, "rho must be in [-1, 1]")
        _check(0.0 <= self.beta <= 1.0, "beta must be in [0, 1]")


@dataclass(frozen=True)
class HestonParams:
    v0: float          # initial variance
    kappa: float
    theta: float       # long-term variance
    nu: float
    rho: float = 0.0

    def __post_init__(self):
        _check(self.v0 > 0, "v0 must be positive")
        _check(self.kappa > 0, "kappa must be positive")
        _check(self.theta > 0, "theta must be positive")
        _check(self.nu >= 0, "nu must be nonnegative")
        _check(-1.0 <= self.rho <= 1.0, "rho must be in [-1, 1]")


@dataclass(frozen=True)
class SteinParams:
    sigma0: float
    kappa: float
    theta: float       # long-term volatility
    nu: float
    rho: float = 0.0

    def __post_init__(self):
        _check(self.sigma0 > 0, "sigma0 must be positive")
        _check(self.kappa > 0, "kappa must be positive")
        _check(self.theta > 0, "theta must be positive")
        _check(self.nu >= 0, "nu must be nonnegative")
        _check(-1.0 <= self.rho <= 1.0, "rho must be in [-1, 1]")


@dataclass(frozen=True)
class LambdaSabrParams:
    alpha: float
    kappa: float
    theta: float       # long-term volatility
    nu: float
    rho: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        _check(self.alpha > 0, "alpha must be positive")
        _check(self.kappa > 0, "kappa must be positive")
        _check(self.theta > 0, "theta must be positive")
        _check(self.nu >= 0, "nu must be nonnegative")
        _check(-1.0 <= self.rho <= 1.0, "rho must be in [-1, 1]")
        _check(0.0 <= self.beta <= 1.0, "beta must be in [0, 1]")


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


# --- realized variance --------------------------------------------------------

def _closes(x) -> np.ndarray:
    if isinstance(x, OhlcSeries):
        return x.close
    return np.asarray(x, dtype=np.float64)


def realized_variance_natural(closes) -> float:
    """(252/N) * sum of squared log returns, natural units."""
    c = _closes(closes)
    if len(c) < 2:
        raise TooShort("need at least two prices")
    r = np.diff(np.log(c))
    return float(TRADING_DAYS_PER_YEAR / len(r) * np.sum(r * r))


def realized_variance(closes) -> float:
    """Annualized realized variance in variance points (the 100x convention)."""
    return VARIANCE_POINTS * realized_variance_natural(closes)


# --- Black-Scholes plumbing ----------------------------------------------------

def _ndtr(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def black_scholes_price(forward: float, strike: float, vol: float, maturity: float,
                        side: str) -> float:
    """Undiscounted lognormal option premium; vol -> 0 falls back to intrinsic."""
    if forward <= 0.0 or strike <= 0.0 or maturity < 0.0 or vol < 0.0:
        raise ValueError("forward/strike must be positive, vol/maturity nonnegative")
    if side not in (PUT, CALL):
        raise ValueError(f"side must be '{PUT}' or '{CALL}'")
    st = vol * math.sqrt(maturity)
    if st == 0.0:
        intrinsic = forward - strike if side == CALL else strike - forward
        return max(intrinsic, 0.0)
    d1 = (math.log(forward / strike) + 0.5 * st * st) / st
    d2 = d1 - st
    if side == CALL:
        return forward * _ndtr(d1) - strike * _ndtr(d2)
    return strike * _ndtr(-d2) - forward * _ndtr(-d1)


# --- replication ----------------------------------------------------------------

def _side_sum(quotes: tuple[OptionQuote, ...], keep) -> float:
    # rectangle rule: the lowest strike is the integration edge k_0 whose
    # price is never used; each later quote contributes price/k^2 * dk.
    ks = [q.strike_pct for q in quotes]
    for i in range(1, len(ks)):
        if ks[i] <= ks[i - 1]:
            raise UnsortedStrikes(f"strikes not strictly increasing near {ks[i]}")
    total = 0.0
    for i in range(1, len(quotes)):
        q = quotes[i]
        if keep(q.strike_pct):
            total += q.price / (q.strike_pct * q.strike_pct) * (ks[i] - ks[i - 1])
    return total


def replication_strike(chain: OptionChain,
                       corridor: tuple[float, float] | None = None) -> float:
    """Static-replication strike from the out-of-the-money chain.

    Natural units.  With ``corridor=(lo, hi)`` only puts with strike >= lo
    and calls with strike <= hi enter the sums (spacing still read from
    the full chain), which prices the corridor contract.
    """
    if not chain.puts and not chain.calls:
        raise EmptyChain("chain carries no quotes")
    if corridor is not None:
        lo, hi = corridor
        if lo > hi:
            raise ValueError("corridor bounds out of order")
        strikes = [q.strike_pct for q in chain.puts + chain.calls]
        if lo < min(strikes) or hi > max(strikes):
            raise ValueError("corridor exceeds quoted strike coverage")
        keep_put = lambda k: k >= lo
        keep_call = lambda k: k <= hi
    else:
        keep_put = keep_call = lambda k: True
    total = _side_sum(chain.puts, keep_put) + _side_sum(chain.calls, keep_call)
    return 2.0 / chain.maturity_years * total


def chain_from_smile(spot: float, rate: float, maturity: float, strikes, vols) -> OptionChain:
    """Price a strike grid under the given implied vols (puts below the
    forward, calls above, both at the money)."""
    puts = []
    calls = []
    for k, v in zip(strikes, vols):
        price_put = black_scholes_price(1.0, k, v, maturity, PUT)
        price_call = black_scholes_price(1.0, k, v, maturity, CALL)
        if k <= 1.0:
            puts.append(OptionQuote(k, PUT, price_put))
        if k >= 1.0:
            calls.append(OptionQuote(k, CALL, price_call))
    return OptionChain(spot, rate, maturity, tuple(puts), tuple(calls))


def flat_wing_smile(strikes, vols, grid) -> np.ndarray:
    """Extend corridor vols onto a wider grid, flat beyond the quoted ends."""
    strikes = np.asarray(strikes, dtype=np.float64)
    vols = np.asarray(vols, dtype=np.float64)
    if np.any(np.diff(strikes) <= 0.0):
        raise UnsortedStrikes("corridor strikes must be strictly increasing")
    return np.interp(np.asarray(grid, dtype=np.float64), strikes, vols)


# --- closed-form strikes ---------------------------------------------------------

def _phi(y: float) -> float:
    """(1 - exp(-y))/y with a second-order Taylor branch near zero."""
    if abs(y) < _TAYLOR_CUT:
        return 1.0 - y / 2.0 + y * y / 6.0
    return -math.expm1(-y) / y


def _grow(x: float) -> float:
    """(exp(x) - 1)/x with a second-order Taylor branch near zero."""
    if abs(x) < _TAYLOR_CUT:
        return 1.0 + x / 2.0 + x * x / 6.0
    return math.expm1(x) / x


def _sabr_strike(alpha: float, nu: float, maturity: float) -> float:
    return alpha * alpha * _grow(nu * nu * maturity)


def strike_sabr(p: SabrParams, maturity: float) -> float:
    """alpha^2 (e^{nu^2 T} - 1)/(nu^2 T); the nu -> 0 limit is alpha^2."""
    if maturity < 0.0:
        raise ValueError("maturity must be nonnegative")
    return _sabr_strike(p.alpha, p.nu, maturity)


def strike_heston(p: HestonParams, maturity: float) -> float:
    """theta + (v0 - theta)(1 - e^{-kT})/(kT)."""
    if maturity < 0.0:
        raise ValueError("maturity must be nonnegative")
    return p.theta + (p.v0 - p.theta) * _phi(p.kappa * maturity)


def strike_stein(p: SteinParams, maturity: float) -> float:
    """Four-term Ornstein-Uhlenbeck mean of integrated variance."""
    if maturity < 0.0:
        raise ValueError("maturity must be nonnegative")
    d = p.sigma0 - p.theta
    half_nu2 = p.nu * p.nu / (2.0 * p.kappa)
    return (p.theta * p.theta + half_nu2
            + 2.0 * p.theta * d * _phi(p.kappa * maturity)
            + (d * d - half_nu2) * _phi(2.0 * p.kappa * maturity))


def strike_lambda_sabr(p: LambdaSabrParams, maturity: float) -> float:
    """Five-term mean-reverting-SABR strike, implemented exactly as printed.

    The source formula mixes nu/2 and nu^2/2 denominators and is not
    dimensionally homogeneous; it is reproduced verbatim and should always
    be reported next to a Monte-Carlo estimate (see
    ``volkit.simulate.mc_variance_strike``), never asserted against it.
    """
    if maturity <= 0.0:
        raise ValueError("maturity must be positive")
    a, k, th, nu = p.alpha, p.kappa, p.theta, p.nu
    if 2.0 * k == nu * nu:
        raise SingularParameters("2*kappa == nu^2 makes the printed formula singular")
    h = nu * nu / 2.0
    # each (1 - e^{-yT})/(...T) factor is written as phi(yT) with the
    # denominator constants cancelled; the first term keeps nu/2 unsquared
    t1 = (k * th / (k + nu / 2.0)) ** 2
    t2 = a * a * _phi((2.0 * k - nu * nu) * maturity)
    t3 = (k * th / (k + h)) ** 2 * _phi(2.0 * (k + h) * maturity)
    t4 = 2.0 * a * th / (k + h) * _phi(k * maturity)
    t5 = 2.0 * a * k * th / (k + h) * _phi((2.0 * k + h) * maturity)
    return t1 + t2 + t3 + t4 + t5


def implied_volvol(k_var: float, alpha: float, maturity: float) -> float:
    """Invert the SABR strike for nu >= 0 (bracketed root to 1e-10 relative)."""
    if alpha <= 0.0 or maturity <= 0.0:
        raise ValueError("alpha and maturity must be positive")
    base = alpha * alpha
    if k_var < base:
        raise NoRoot(f"k_var {k_var} below alpha^2 {base}; no nonnegative volvol")
    if k_var == base:
        return 0.0
    f = lambda nu: _sabr_strike(alpha, nu, maturity) - k_var
    hi = 1.0
    cap = math.sqrt(700.0 / maturity)  # exp overflow guard
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > cap:
            hi = cap
            break
    return float(brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-10))


# --- mark to market ---------------------------------------------------------------

def mark_to_market(terms: VarSwapTerms, closes_to_date, imp_strike: float,
                   t_years: float) -> float:
    """Value of a live contract at time t, scaled by 1/K_var.

    Convex combination (t/T) * accrued realized variance plus
    ((T-t)/T) * imp_strike, minus the strike; all three in the same
    natural units.  The sum over zero elapsed returns is zero.
    """
    T = terms.maturity_years
    if not 0.0 <= t_years <= T:
        raise TimeOutOfRange(f"t={t_years} outside [0, {T}]")
    if terms.k_var <= 0.0:
        raise ValueError("k_var must be positive to scale by 1/k_var")
    c = _closes(closes_to_date)
    accrued = realized_variance_natural(c) if len(c) >= 2 else 0.0
    value = (t_years / T) * accrued + ((T - t_years) / T) * imp_strike - terms.k_var
    return terms.notional * value / terms.k_var


@dataclass(frozen=True, eq=False)
class MtmPath:
    """Daily scaled MtM of one contract plus its building blocks."""

    t_years: np.ndarray
    mtm: np.ndarray
    realized_to_date: np.ndarray   # accrued annualized variance, natural units
    imp: np.ndarray                # remaining-maturity synthetic strike
    dates: tuple[str, ...] | None = None


def mtm_path(terms: VarSwapTerms, closes, alpha: float, nu: float,
             dates: tuple[str, ...] | None = None) -> MtmPath:
    """Full MtM path using inception SABR parameters for the synthetic leg.

    closes[0] is the inception fixing; day d maps to t = d/252 years,
    which must not exceed the maturity.
    """
    c = _closes(closes)
    if isinstance(closes, OhlcSeries) and dates is None:
        dates = closes.dates
    n_days = len(c) - 1
    if n_days < 0:
        raise TooShort("need the inception close")
    T = terms.maturity_years
    t = np.arange(n_days + 1) / TRADING_DAYS_PER_YEAR
    if t[-1] > T + 1e-12:
        raise TimeOutOfRange("closes run past the contract maturity")
    r = np.diff(np.log(c))
    sq = np.concatenate(([0.0], np.cumsum(r * r)))
    realized = np.zeros(n_days + 1)
    if n_days > 0:
        d = np.arange(1, n_days + 1, dtype=np.float64)
        realized[1:] = TRADING_DAYS_PER_YEAR / d * sq[1:]
    imp = np.array([_sabr_strike(alpha, nu, max(T - ti, 0.0)) for ti in t])
    mtm = ((t / T) * realized + ((T - t) / T) * imp - terms.k_var) / terms.k_var
    mtm *= terms.notional
    return MtmPath(t, mtm, realized, imp, dates)


# --- chain CSV ---------------------------------------------------------------------

def load_option_chain(path: str | os.PathLike) -> OptionChain:
    """Read `side,strike_pct,price` or `side,strike_pct,implied_vol` quotes.

    Metadata lines `#forward=`, `#rate=`, `#maturity_years=` must precede
    the header.  Strikes are fractions of the forward; implied vols are
    converted to undiscounted forward-normalized prices.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise MissingFile(f"no such file: {path}") from None
    meta = {}
    body = []
    for idx, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if "=" not in s:
                raise MalformedRow(idx, f"bad metadata line {s!r}")
            key, _, val = s[1:].partition("=")
            try:
                meta[key.strip()] = float(val)
            except ValueError:
                raise MalformedRow(idx, f"bad metadata value in {s!r}") from None
        else:
            body.append((idx, s))
    for key in ("forward", "rate", "maturity_years"):
        if key not in meta:
            raise MalformedRow(1, f"missing metadata #{key}=")
    if not body:
        raise EmptyChain("no quote rows")
    header = tuple(p.strip() for p in body[0][1].split(","))
    if header == ("side", "strike_pct", "price"):
        is_vol = False
    elif header == ("side", "strike_pct", "implied_vol"):
        is_vol = True
    else:
        raise MalformedRow(body[0][0], f"unexpected header {body[0][1]!r}")
    T = meta["maturity_years"]
    puts = []
    calls = []
    for idx, row in body[1:]:
        parts = [p.strip() for p in row.split(",")]
        if len(parts) != 3:
            raise MalformedRow(idx, f"expected 3 fields, got {len(parts)}")
        side = parts[0]
        try:
            k = float(parts[1])
            x = float(parts[2])
        except ValueError:
            raise MalformedRow(idx, f"cannot parse {row!r}") from None
        price = black_scholes_price(1.0, k, x, T, side) if is_vol else x
        try:
            quote = OptionQuote(k, side, price)
        except ValueError as exc:
            raise MalformedRow(idx, str(exc)) from None
        (puts if side == PUT else calls).append(quote)
    puts.sort(key=lambda q: q.strike_pct)
    calls.sort(key=lambda q: q.strike_pct)
    spot = meta["forward"] * math.exp(-meta["rate"] * T)
    return OptionChain(spot, meta["rate"], T, tuple(puts), tuple(calls))
