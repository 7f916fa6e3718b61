"""Pure-numpy kernels.

Conditional-variance recursions are inherently serial, so those run the
shared scalar loops at Python speed.  Path-parallel kernels (bar carving,
Euler integrators) are vectorized across paths with the same per-element
arithmetic order as the loop versions, so both backends agree bitwise.
"""
import math

import numpy as np

from ._loops import (  # noqa: F401  (re-exported as-is)
    arch_filter,
    arch_sim,
    egarch_filter,
    egarch_sim,
    ewma_filter,
    ewma_sim,
    garch11_filter,
    garch11_sim,
    gjr_filter,
    gjr_sim,
)

BACKEND_NAME = "numpy"


def gbm_log_bars(inc, gap_inc):
    within = np.cumsum(inc, axis=1)
    day_end = within[:, -1]
    days = inc.shape[0]
    o = np.empty(days)
    o[0] = 0.0
    if days > 1:
        o[1:] = np.cumsum(day_end[:-1] + gap_inc[1:])
    h = o + np.maximum(within.max(axis=1), 0.0)
    l = o + np.minimum(within.min(axis=1), 0.0)
    c = o + day_end
    return o, h, l, c


def sabr_varint(z1, z2, alpha, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    sig = np.full(n_paths, alpha)
    for j in range(n_steps):
        dw2 = sqdt * (rho * z1[:, j] + srho * z2[:, j])
        sig_new = sig + nu * sig * dw2
        acc += 0.5 * (sig * sig + sig_new * sig_new) * dt
        sig = sig_new
    return acc


def heston_varint(z1, z2, v0, kappa, theta, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    v = np.full(n_paths, v0)
    for j in range(n_steps):
        dw2 = sqdt * (rho * z1[:, j] + srho * z2[:, j])
        vp = np.maximum(v, 0.0)
        v_new = v + kappa * (theta - vp) * dt + nu * np.sqrt(vp) * dw2
        acc += 0.5 * (vp + np.maximum(v_new, 0.0)) * dt
        v = v_new
    return acc


def stein_varint(z1, z2, sig0, kappa, theta, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    sg = np.full(n_paths, sig0)
    for j in range(n_steps):
        dw2 = sqdt * (rho * z1[:, j] + srho * z2[:, j])
        sg_new = sg + kappa * (theta - sg) * dt + nu * dw2
        acc += 0.5 * (sg * sg + sg_new * sg_new) * dt
        sg = sg_new
    return acc


def lambda_sabr_varint(z1, z2, alpha, kappa, theta, nu, rho, dt):
    n_paths, n_steps = z1.shape
    acc = np.zeros(n_paths)
    srho = math.sqrt(1.0 - rho * rho)
    sqdt = math.sqrt(dt)
    sig = np.full(n_paths, alpha)
    for j in range(n_steps):
        dw2 = sqdt * (rho * z1[:, j] + srho * z2[:, j])
        sig_new = sig + kappa * (theta - sig) * dt + nu * sig * dw2
        acc += 0.5 * (sig * sig + sig_new * sig_new) * dt
        sig = sig_new
    return acc
