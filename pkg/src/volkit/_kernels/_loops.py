"""Scalar loop kernels shared by both backends.

Every function here is written in nopython-compatible style: the numba
backend jit-compiles these exact functions, the numpy backend runs them
as-is (or substitutes a vectorized equivalent with identical arithmetic
order, so results agree bit for bit).
"""
import math

import numpy as np


# --- conditional-variance filters -------------------------------------------
# sig2[t] is the variance in force when residual a[t] is observed;
# sig2[0] = sig0sq.

def arch_filter(a, alpha0, alpha1, sig0sq):
    n = a.shape[0]
    sig2 = np.empty(n)
    sig2[0] = sig0sq
    for t in range(1, n):
        sig2[t] = alpha0 + alpha1 * a[t - 1] * a[t - 1]
    return sig2


def garch11_filter(a, alpha0, alpha1, beta1, sig0sq):
    n = a.shape[0]
    sig2 = np.empty(n)
    sig2[0] = sig0sq
    for t in range(1, n):
        sig2[t] = alpha0 + alpha1 * a[t - 1] * a[t - 1] + beta1 * sig2[t - 1]
    return sig2


def gjr_filter(a, alpha0, alpha1, gamma1, beta1, sig0sq):
    n = a.shape[0]
    sig2 = np.empty(n)
    sig2[0] = sig0sq
    for t in range(1, n):
        arch = alpha1
        if a[t - 1] < 0.0:
            arch = alpha1 + gamma1
        sig2[t] = alpha0 + arch * a[t - 1] * a[t - 1] + beta1 * sig2[t - 1]
    return sig2


def egarch_filter(a, alpha0, alpha1, gamma1, beta1, sig0sq, printed):
    # printed form divides (alpha1*a^2 + gamma1*|a|) by sigma; the
    # alternate form is the Nelson specification on standardized shocks.
    n = a.shape[0]
    sig2 = np.empty(n)
    sig2[0] = sig0sq
    root_2_over_pi = 0.7978845608028654
    for t in range(1, n):
        prev = sig2[t - 1]
        if prev <= 0.0 or not math.isfinite(prev):
            sig2[t] = np.nan
            continue
        sd = math.sqrt(prev)
        if printed:
            ln_s2 = alpha0 + (alpha1 * a[t - 1] * a[t - 1] + gamma1 * abs(a[t - 1])) / sd + beta1 * math.log(prev)
        else:
            eps = a[t - 1] / sd
            ln_s2 = alpha0 + alpha1 * (abs(eps) - root_2_over_pi) + gamma1 * eps + beta1 * math.log(prev)
        if ln_s2 > 700.0:
            sig2[t] = np.inf
        else:
            sig2[t] = math.exp(ln_s2)
    return sig2


def ewma_filter(a, lam, sig0sq):
    n = a.shape[0]
    sig2 = np.empty(n)
    sig2[0] = sig0sq
    for t in range(1, n):
        sig2[t] = lam * sig2[t - 1] + (1.0 - lam) * a[t - 1] * a[t - 1]
    return sig2


# --- model simulation (residuals a[t] = sig[t] * eps[t]) ---------------------

def arch_sim(eps, alpha0, alpha1, sig0sq):
    n = eps.shape[0]
    a = np.empty(n)
    sig2 = np.empty(n)
    s2 = sig0sq
    for t in range(n):
        if t > 0:
            s2 = alpha0 + alpha1 * a[t - 1] * a[t - 1]
        sig2[t] = s2
        a[t] = math.sqrt(s2) * eps[t]
    return a, sig2


def garch11_sim(eps, alpha0, alpha1, beta1, sig0sq):
    n = eps.shape[0]
    a = np.empty(n)
    sig2 = np.empty(n)
    s2 = sig0sq
    for t in range(n):
        if t > 0:
            s2 = alpha0 + alpha1 * a[t - 1] * a[t - 1] + beta1 * s2
        sig2[t] = s2
        a[t] = math.sqrt(s2) * eps[t]
    return a, sig2


def gjr_sim(eps, alpha0, alpha1, gamma1, beta1, sig0sq):
    n = eps.shape[0]
    a = np.empty(n)
    sig2 = np.empty(n)
    s2 = sig0sq
    for t in range(n):
        if t > 0:
            arch = alpha1
            if a[t - 1] < 0.0:
                arch = alpha1 + gamma1
            s2 = alpha0 + arch * a[t - 1] * a[t - 1] + beta1 * s2
        sig2[t] = s2
        a[t] = math.sqrt(s2) * eps[t]
    return a, sig2


def egarch_sim(eps, alpha0, alpha1, gamma1, beta1, sig0sq, printed):
    n = eps.shape[0]
    a = np.empty(n)
    sig2 = np.empty(n)
    root_2_over_pi = 0.7978845608028654
    s2 = sig0sq
    for t in range(n):
        if t > 0:
            sd = math.sqrt(s2)
            if printed:
                ln_s2 = alpha0 + (alpha1 * a[t - 1] * a[t - 1] + gamma1 * abs(a[t - 1])) / sd + beta1 * math.log(s2)
            else:
                e = a[t - 1] / sd
                ln_s2 = alpha0 + alpha1 * (abs(e) - root_2_over_pi) + gamma1 * e + beta1 * math.log(s2)
            if ln_s2 > 700.0:
                s2 = np.inf
            else:
                s2 = math.exp(ln_s2)
        sig2[t] = s2
        a[t] = math.sqrt(s2) * eps[t]
    return a, sig2


def ewma_sim(eps, lam, sig0sq):
    n = eps.shape[0]
    a = np.empty(n)
    sig2 = np.empty(n)
    s2 = sig0sq
    for t in range(n):
        if t > 0:
            s2 = lam * s2 + (1.0 - lam) * a[t - 1] * a[t - 1]
        sig2[t] = s2
        a[t] = math.sqrt(s2) * eps[t]
    return a, sig2


# --- daily bars carved out of a fine intrabar log walk -----------------------

def gbm_log_bars(inc, gap_inc):
    """Log o/h/l/c (relative to log spot) from per-step log increments.

    inc: (days, steps) intrabar log increments; gap_inc: (days,) overnight
    log jumps, gap_inc[0] ignored.  Open of day d+1 = close of day d plus
    its gap.  Highs and lows monitor the open plus every intrabar point.
    """
    days, m = inc.shape
    o = np.empty(days)
    h = np.empty(days)
    l = np.empty(days)
    c = np.empty(days)
    open_log = 0.0
    for d in range(days):
        o[d] = open_log
        run = 0.0
        mx = 0.0
        mn = 0.0
        for j in range(m):
            run = run + inc[d, j]
            if run > mx:
                mx = run
            if run < mn:
                mn = run
        h[d] = open_log + mx
        l[d] = open_log + mn
        c[d] = open_log + run
        if d + 1 < days:
            open_log = open_log + (run + gap_inc[d + 1])
    return o, h, l, c


# --- integrated variance along Euler paths -----------------------------------
# acc[i] = trapezoidal integral of sigma_t^2 over [0, T] for path i.
# z1 drives the spot Brownian motion, the volatility one is
# rho * z1 + sqrt(1 - rho^2) * z2.

def sabr_varint(z1, z2, alpha, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    for i in range(n_paths):
        sig = alpha
        s = 0.0
        for j in range(n_steps):
            dw2 = sqdt * (rho * z1[i, j] + srho * z2[i, j])
            sig_new = sig + nu * sig * dw2
            s += 0.5 * (sig * sig + sig_new * sig_new) * dt
            sig = sig_new
        acc[i] = s
    return acc


def heston_varint(z1, z2, v0, kappa, theta, nu, rho, dt):
    # full truncation: negative variance clipped only inside coefficients
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    for i in range(n_paths):
        v = v0
        s = 0.0
        for j in range(n_steps):
            dw2 = sqdt * (rho * z1[i, j] + srho * z2[i, j])
            vp = v if v > 0.0 else 0.0
            v_new = v + kappa * (theta - vp) * dt + nu * math.sqrt(vp) * dw2
            vpn = v_new if v_new > 0.0 else 0.0
            s += 0.5 * (vp + vpn) * dt
            v = v_new
        acc[i] = s
    return acc


def stein_varint(z1, z2, sig0, kappa, theta, nu, rho, dt):
    # OU volatility may go negative; the variance is the signed value squared
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    for i in range(n_paths):
        sg = sig0
        s = 0.0
        for j in range(n_steps):
            dw2 = sqdt * (rho * z1[i, j] + srho * z2[i, j])
            sg_new = sg + kappa * (theta - sg) * dt + nu * dw2
            s += 0.5 * (sg * sg + sg_new * sg_new) * dt
            sg = sg_new
        acc[i] = s
    return acc


def lambda_sabr_varint(z1, z2, alpha, kappa, theta, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    for i in range(n_paths):
        sig = alpha
        s = 0.0
        for j in range(n_steps):
            dw2 = sqdt * (rho * z1[i, j] + srho * z2[i, j])
            sig_new = sig + kappa * (theta - sig) * dt + nu * sig * dw2
            s += 0.5 * (sig * sig + sig_new * sig_new) * dt
            sig = sig_new
        acc[i] = s
    return acc


ALL_KERNELS = [
    "arch_filter", "garch11_filter", "gjr_filter", "egarch_filter", "ewma_filter",
    "arch_sim", "garch11_sim", "gjr_sim", "egarch_sim", "ewma_sim",
    "gbm_log_bars",
    "sabr_varint", "heston_varint", "stein_varint", "lambda_sabr_varint",
]
