"""volkit: historical-volatility estimation, GARCH calibration, residual
diagnostics, variance-swap pricing and backtesting, and mean-reversion
analytics, validated against analytic limits and an internal Monte-Carlo
oracle."""

from . import (  # noqa: F401
    backtest,
    diagnostics,
    errors,
    estimators,
    garch,
    marketdata,
    simulate,
    stationarity,
    varswap,
)
from ._kernels import backend_name  # noqa: F401

__version__ = "0.1.0"
