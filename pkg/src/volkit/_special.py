"""Regularized incomplete gamma and the chi-square survival function.

Series representation below x = a + 1, Lentz continued fraction above,
following the classic Numerical Recipes split.  Absolute tolerance 1e-12.
"""
from __future__ import annotations

import math

_TOL = 1e-15  # relative truncation; keeps absolute error within 1e-12
_MAX_ITER = 1000
_TINY = 1e-300


def _gamma_p_series(a: float, x: float) -> float:
    # P(a, x) by series: x^a e^-x / Gamma(a) * sum x^n / (a)_(n+1)
    if x == 0.0:
        return 0.0
    gln = math.lgamma(a)
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _TOL:
            break
    return total * math.exp(-x + a * math.log(x) - gln)


def _gamma_q_contfrac(a: float, x: float) -> float:
    # Q(a, x) by continued fraction, modified Lentz
    gln = math.lgamma(a)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _TOL:
            break
    return math.exp(-x + a * math.log(x) - gln) * h


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def chi2_sf(x: float, df: int) -> float:
    """Survival function of the chi-square distribution with df degrees."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if x <= 0.0:
        return 1.0
    return gamma_q(0.5 * df, 0.5 * x)
