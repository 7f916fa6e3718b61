"""Conditional-heteroscedasticity models: filtering, simulation, MLE.

Five recursions are supported (ARCH, GARCH(1,1), GJR, EGARCH, EWMA), all
driven by Gaussian innovations.  The mean return is fixed to the sample
mean before estimation rather than jointly estimated.  The EGARCH
recursion ships in two flavours selected by ``egarch_form``:

* ``"printed"`` (default): ln s2_t = a0 + (a1*a^2 + g1*|a|)/sigma + b1*ln s2
* ``"nelson"``: the standard specification on standardized shocks.

The GJR down-move indicator fires on a negative residual return.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from . import _rng
from ._kernels import kernels
from .errors import (
    DidNotConverge,
    InvalidParams,
    NonPositiveVariance,
    NonStationary,
    TooShort,
    Unsupported,
)
from .marketdata import DAILY, ReturnSeries, VolSeries

PRINTED = "printed"
NELSON = "nelson"

# simplex stops when the log-likelihood spread falls below this
LOGLIK_TOL = 1e-8
MAX_ITER = 2000
MIN_OBS = 50


class GarchModelKind(str, Enum):
    ARCH = "arch"
    GARCH11 = "garch11"
    GJR_GARCH = "gjr-garch"
    EGARCH = "egarch"
    EWMA = "ewma"


@dataclass(frozen=True)
class GarchParams:
    """Parameter bundle; which fields matter depends on the model kind."""

    mu: float = 0.0
    alpha0: float = 0.0
    alpha1: float = 0.0
    beta1: float = 0.0
    gamma1: float = 0.0
    lam: float = 0.0
    sigma0: float = 0.01


@dataclass(frozen=True)
class GarchFit:
    kind: GarchModelKind
    params: GarchParams
    loglik: float
    vol: VolSeries
    residuals: np.ndarray
    converged: bool


def validate_params(kind: GarchModelKind, p: GarchParams) -> None:
    kind = GarchModelKind(kind)
    values = (p.mu, p.alpha0, p.alpha1, p.beta1, p.gamma1, p.lam, p.sigma0)
    if not all(math.isfinite(v) for v in values):
        raise InvalidParams("parameters must be finite")
    if p.sigma0 <= 0.0:
        raise InvalidParams("sigma0 must be positive")
    if kind is GarchModelKind.ARCH:
        if p.alpha0 < 0.0 or not 0.0 <= p.alpha1 < 1.0:
            raise InvalidParams("ARCH needs alpha0 >= 0 and 0 <= alpha1 < 1")
    elif kind is GarchModelKind.GARCH11:
        if p.alpha0 < 0.0 or p.alpha1 < 0.0 or p.beta1 < 0.0:
            raise InvalidParams("GARCH(1,1) needs nonnegative alpha0, alpha1, beta1")
        if p.alpha1 + p.beta1 >= 1.0:
            raise InvalidParams("GARCH(1,1) needs alpha1 + beta1 < 1")
    elif kind is GarchModelKind.GJR_GARCH:
        if p.alpha0 < 0.0 or p.alpha1 < 0.0 or p.beta1 < 0.0:
            raise InvalidParams("GJR needs nonnegative alpha0, alpha1, beta1")
        if p.alpha1 + p.gamma1 < 0.0:
            raise InvalidParams("GJR needs alpha1 + gamma1 >= 0 for positive variance")
    elif kind is GarchModelKind.EWMA:
        if not 0.0 <= p.lam <= 1.0:
            raise InvalidParams("EWMA needs lambda in [0, 1]")
    # EGARCH: the exponential form keeps variance positive for any reals


def _run_filter(kind: GarchModelKind, p: GarchParams, a: np.ndarray,
                egarch_form: str) -> np.ndarray:
    k = kernels()
    s0sq = p.sigma0 * p.sigma0
    if kind is GarchModelKind.ARCH:
        return k.arch_filter(a, p.alpha0, p.alpha1, s0sq)
    if kind is GarchModelKind.GARCH11:
        return k.garch11_filter(a, p.alpha0, p.alpha1, p.beta1, s0sq)
    if kind is GarchModelKind.GJR_GARCH:
        return k.gjr_filter(a, p.alpha0, p.alpha1, p.gamma1, p.beta1, s0sq)
    if kind is GarchModelKind.EGARCH:
        return k.egarch_filter(a, p.alpha0, p.alpha1, p.gamma1, p.beta1, s0sq,
                               egarch_form == PRINTED)
    if kind is GarchModelKind.EWMA:
        return k.ewma_filter(a, p.lam, s0sq)
    raise ValueError(f"unhandled kind {kind}")


def filter_vol(kind: GarchModelKind, params: GarchParams, returns: ReturnSeries,
               egarch_form: str = PRINTED) -> VolSeries:
    """Conditional daily vol sigma_t in force when return t is observed."""
    kind = GarchModelKind(kind)
    validate_params(kind, params)
    if len(returns) < 1:
        raise TooShort("need at least one return")
    a = np.ascontiguousarray(returns.values - params.mu)
    sig2 = _run_filter(kind, params, a, egarch_form)
    if not np.all(np.isfinite(sig2)) or np.any(sig2 <= 0.0):
        raise NonPositiveVariance("filtered variance left the positive range")
    return VolSeries(np.sqrt(sig2), DAILY, returns.dates)


def unconditional_variance(kind: GarchModelKind, params: GarchParams) -> float:
    """Stationary variance: alpha0/(1-alpha1) or alpha0/(1-alpha1-beta1)."""
    kind = GarchModelKind(kind)
    if kind is GarchModelKind.ARCH:
        persistence = params.alpha1
    elif kind is GarchModelKind.GARCH11:
        persistence = params.alpha1 + params.beta1
    else:
        raise Unsupported(f"no closed-form unconditional variance for {kind.value}")
    if params.alpha0 < 0.0 or params.alpha1 < 0.0 or params.beta1 < 0.0:
        raise InvalidParams("coefficients must be nonnegative")
    if persistence >= 1.0:
        raise NonStationary(f"persistence {persistence} >= 1")
    return params.alpha0 / (1.0 - persistence)


def simulate(kind: GarchModelKind, params: GarchParams, n: int, seed: int,
             egarch_form: str = PRINTED) -> tuple[ReturnSeries, VolSeries]:
    """Draw r_t = mu + sigma_t * eps_t; returns the true vol path too."""
    kind = GarchModelKind(kind)
    validate_params(kind, params)
    if n < 1:
        raise InvalidParams("n must be >= 1")
    eps = _rng.substream(seed).standard_normal(n)
    k = kernels()
    s0sq = params.sigma0 * params.sigma0
    if kind is GarchModelKind.ARCH:
        a, sig2 = k.arch_sim(eps, params.alpha0, params.alpha1, s0sq)
    elif kind is GarchModelKind.GARCH11:
        a, sig2 = k.garch11_sim(eps, params.alpha0, params.alpha1, params.beta1, s0sq)
    elif kind is GarchModelKind.GJR_GARCH:
        a, sig2 = k.gjr_sim(eps, params.alpha0, params.alpha1, params.gamma1,
                            params.beta1, s0sq)
    elif kind is GarchModelKind.EGARCH:
        a, sig2 = k.egarch_sim(eps, params.alpha0, params.alpha1, params.gamma1,
                               params.beta1, s0sq, egarch_form == PRINTED)
    else:
        a, sig2 = k.ewma_sim(eps, params.lam, s0sq)
    if not np.all(np.isfinite(sig2)) or np.any(sig2 < 0.0):
        raise NonPositiveVariance("simulated variance left the valid range")
    return ReturnSeries(params.mu + a), VolSeries(np.sqrt(sig2), DAILY)


def log_likelihood(kind: GarchModelKind, params: GarchParams, returns: ReturnSeries,
                   egarch_form: str = PRINTED) -> float:
    """Gaussian log-likelihood of the filtered recursion."""
    kind = GarchModelKind(kind)
    validate_params(kind, params)
    a = np.ascontiguousarray(returns.values - params.mu)
    sig2 = _run_filter(kind, params, a, egarch_form)
    return _gaussian_loglik(a, sig2)


def _gaussian_loglik(a: np.ndarray, sig2: np.ndarray) -> float:
    if not np.all(np.isfinite(sig2)) or np.any(sig2 <= 0.0):
        return -np.inf
    return float(-0.5 * np.sum(np.log(2.0 * np.pi * sig2) + a * a / sig2))


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _sigmoid_open(x: float) -> float:
    # strictly inside (0, 1): saturation would break strict stationarity
    return min(max(_sigmoid(x), 1e-12), 1.0 - 1e-12)


def _logit(u: float) -> float:
    u = min(max(u, 1e-9), 1.0 - 1e-9)
    return math.log(u / (1.0 - u))


def _safe_log(u: float) -> float:
    return math.log(max(u, 1e-300))


class _Problem:
    """Unconstrained reparameterization of one model kind."""

    def __init__(self, kind: GarchModelKind, sig0sq: float, egarch_form: str):
        self.kind = kind
        self.sig0sq = sig0sq
        self.egarch_form = egarch_form

    def unpack(self, x: np.ndarray) -> GarchParams:
        k = self.kind
        sigma0 = math.sqrt(self.sig0sq)
        if k is GarchModelKind.ARCH:
            return GarchParams(alpha0=math.exp(x[0]), alpha1=_sigmoid_open(x[1]),
                               sigma0=sigma0)
        if k is GarchModelKind.GARCH11:
            p = _sigmoid_open(x[1])
            f = _sigmoid(x[2])
            return GarchParams(alpha0=math.exp(x[0]), alpha1=p * f, beta1=p * (1.0 - f),
                               sigma0=sigma0)
        if k is GarchModelKind.GJR_GARCH:
            alpha1 = math.exp(x[1])
            down = math.exp(x[2])  # alpha1 + gamma1, kept positive
            return GarchParams(alpha0=math.exp(x[0]), alpha1=alpha1,
                               gamma1=down - alpha1, beta1=_sigmoid(x[3]), sigma0=sigma0)
        if k is GarchModelKind.EGARCH:
            alpha1 = math.exp(x[1]) if self.egarch_form == PRINTED else x[1]
            return GarchParams(alpha0=x[0], alpha1=alpha1, gamma1=x[2],
                               beta1=_sigmoid(x[3]), sigma0=sigma0)
        return GarchParams(lam=_sigmoid(x[0]), sigma0=sigma0)

    def pack(self, p: GarchParams) -> np.ndarray:
        k = self.kind
        if k is GarchModelKind.ARCH:
            return np.array([_safe_log(p.alpha0), _logit(p.alpha1)])
        if k is GarchModelKind.GARCH11:
            pers = p.alpha1 + p.beta1
            frac = p.alpha1 / pers if pers > 0 else 0.5
            return np.array([_safe_log(p.alpha0), _logit(pers), _logit(frac)])
        if k is GarchModelKind.GJR_GARCH:
            return np.array([_safe_log(p.alpha0), _safe_log(p.alpha1),
                             _safe_log(p.alpha1 + p.gamma1), _logit(p.beta1)])
        if k is GarchModelKind.EGARCH:
            a1 = _safe_log(p.alpha1) if self.egarch_form == PRINTED else p.alpha1
            return np.array([p.alpha0, a1, p.gamma1, _logit(p.beta1)])
        return np.array([_logit(p.lam)])

    def starts(self) -> list[GarchParams]:
        k = self.kind
        v = self.sig0sq
        sigma0 = math.sqrt(v)
        out = []
        if k is GarchModelKind.ARCH:
            for a1 in (0.1, 0.3, 0.5, 0.7, 0.9):
                out.append(GarchParams(alpha0=v * (1 - a1), alpha1=a1, sigma0=sigma0))
        elif k is GarchModelKind.GARCH11:
            for a1 in (0.03, 0.1, 0.2):
                for pers in (0.90, 0.97):
                    out.append(GarchParams(alpha0=v * (1 - pers), alpha1=a1,
                                           beta1=pers - a1, sigma0=sigma0))
        elif k is GarchModelKind.GJR_GARCH:
            for a1, g1 in ((0.05, 0.05), (0.1, 1e-6), (0.03, 0.1)):
                for b1 in (0.85, 0.90):
                    lvl = max(v * (1 - a1 - g1 / 2 - b1), 1e-4 * v)
                    out.append(GarchParams(alpha0=lvl, alpha1=a1, gamma1=g1,
                                           beta1=b1, sigma0=sigma0))
        elif k is GarchModelKind.EGARCH:
            lnv = math.log(v)
            sd = sigma0
            if self.egarch_form == PRINTED:
                combos = [(0.05 / sd, 0.0), (0.2 / sd, -0.05), (0.02 / sd, 0.05)]
            else:
                combos = [(0.1, -0.05), (0.2, 0.0), (0.05, 0.05)]
            for b1 in (0.90, 0.97):
                for a1, g1 in combos:
                    if self.egarch_form == PRINTED:
                        level = (1 - b1) * lnv - (a1 * v / sd + g1 * 0.8)
                    else:
                        level = (1 - b1) * lnv
                    out.append(GarchParams(alpha0=level, alpha1=a1, gamma1=g1,
                                           beta1=b1, sigma0=sigma0))
        else:
            for lam in (0.80, 0.90, 0.94, 0.97, 0.99):
                out.append(GarchParams(lam=lam, sigma0=sigma0))
        return out


def fit(kind: GarchModelKind, returns: ReturnSeries, egarch_form: str = PRINTED,
        extra_starts: list[GarchParams] | None = None) -> GarchFit:
    """Maximum-likelihood fit by multi-start Nelder-Mead.

    mu is fixed to the sample mean and the variance seed sigma0^2 to the
    sample variance; the simplex runs in transformed coordinates that
    enforce each kind's constraints.  The best point is returned even when
    no start converged (``converged`` flags it).
    """
    kind = GarchModelKind(kind)
    if len(returns) < MIN_OBS:
        raise TooShort(f"need at least {MIN_OBS} returns to fit")
    mu = float(returns.values.mean())
    a = np.ascontiguousarray(returns.values - mu)
    sig0sq = float(a.var())
    if sig0sq <= 0.0:
        raise DidNotConverge("zero-variance returns, nothing to fit")
    problem = _Problem(kind, sig0sq, egarch_form)

    def objective(x: np.ndarray) -> float:
        p = problem.unpack(x)
        try:
            sig2 = _run_filter(kind, p, a, egarch_form)
        except (OverflowError, ValueError):
            return np.inf
        ll = _gaussian_loglik(a, sig2)
        return np.inf if ll == -np.inf else -ll

    starts = problem.starts()
    if extra_starts:
        starts = starts + list(extra_starts)
    best = None
    best_converged = False
    for p0 in starts:
        res = minimize(objective, problem.pack(p0), method="Nelder-Mead",
                       options=dict(fatol=LOGLIK_TOL, xatol=np.inf,
                                    maxiter=MAX_ITER, maxfev=4 * MAX_ITER))
        if best is None or res.fun < best.fun:
            best = res
            best_converged = bool(res.success)
    fitted = replace(problem.unpack(best.x), mu=mu)
    sig2 = _run_filter(kind, fitted, a, egarch_form)
    vol = VolSeries(np.sqrt(sig2), DAILY, returns.dates)
    residuals = a / vol.values
    return GarchFit(kind, fitted, -float(best.fun), vol, residuals, best_converged)


@dataclass(frozen=True)
class RefitRecord:
    """One increasing-window calibration: fit on returns[0..index)."""

    index: int
    date: str | None
    params: GarchParams | None
    last_vol: float | None
    loglik: float | None
    converged: bool
    error: str | None = None


def refit_increasing_window(kind: GarchModelKind, returns: ReturnSeries,
                            start: int, step: int,
                            egarch_form: str = PRINTED) -> list[RefitRecord]:
    """Refit on growing windows; keep the final filtered vol of each.

    Windows end at start, start+step, ... and always at the full sample.
    Failed windows produce an error record instead of aborting the scan.
    The previous window's parameters seed one extra start of the next fit.
    """
    kind = GarchModelKind(kind)
    if start < MIN_OBS:
        raise TooShort(f"start must be >= {MIN_OBS}")
    if step < 1:
        raise ValueError("step must be >= 1")
    n = len(returns)
    if start > n:
        return [RefitRecord(start, None, None, None, None, False,
                            error=f"start {start} beyond series length {n}")]
    ends = sorted(set(range(start, n + 1, step)) | {n})
    records: list[RefitRecord] = []
    prev_params: GarchParams | None = None
    for end in ends:
        window = ReturnSeries(returns.values[:end],
                              returns.dates[:end] if returns.dates else None)
        date = returns.dates[end - 1] if returns.dates else None
        try:
            extra = [prev_params] if prev_params is not None else None
            f = fit(kind, window, egarch_form=egarch_form, extra_starts=extra)
        except Exception as exc:  # per-window failures are recorded, not fatal
            records.append(RefitRecord(end, date, None, None, None, False, str(exc)))
            continue
        prev_params = f.params
        records.append(RefitRecord(end, date, f.params, float(f.vol.values[-1]),
                                   f.loglik, f.converged))
    return records


def refit_vol_series(records: list[RefitRecord]) -> VolSeries:
    """Concatenate the last filtered vols of successful refits."""
    good = [r for r in records if r.last_vol is not None]
    if not good:
        raise DidNotConverge("no successful refit windows")
    dates = tuple(r.date for r in good) if all(r.date for r in good) else None
    return VolSeries(np.array([r.last_vol for r in good]), DAILY, dates)
