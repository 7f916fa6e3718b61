"""Exception types raised across the library.

Every error carries a ``domain`` attribute naming the subsystem it belongs
to; the CLI uses it to emit module-qualified diagnostics.
"""


class VolkitError(Exception):
    """Base class for all library errors."""

    domain = "volkit"


# --- market data -----------------------------------------------------------

class MissingFile(VolkitError, FileNotFoundError):
    domain = "marketdata"


class MalformedRow(VolkitError):
    """A CSV row that does not parse. Carries the 1-based line number."""

    domain = "marketdata"

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class OrderViolation(VolkitError):
    """A bar violating price ordering (h < l, nonpositive price, dup date)."""

    domain = "marketdata"

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptySeries(VolkitError):
    domain = "marketdata"


class TooShort(VolkitError):
    domain = "marketdata"


class AlreadyAnnualized(VolkitError):
    domain = "marketdata"


# --- estimators ------------------------------------------------------------

class WindowTooLarge(VolkitError):
    domain = "estimators"


class NegativeVarianceEstimate(VolkitError):
    domain = "estimators"


class DegenerateVariance(VolkitError):
    domain = "estimators"


# --- garch -----------------------------------------------------------------

class InvalidParams(VolkitError):
    domain = "garch"


class NonPositiveVariance(VolkitError):
    domain = "garch"


class Unsupported(VolkitError):
    domain = "garch"


class NonStationary(VolkitError):
    domain = "garch"


class DidNotConverge(VolkitError):
    domain = "garch"


# --- diagnostics -----------------------------------------------------------

class ZeroVol(VolkitError):
    domain = "diagnostics"


class Misaligned(VolkitError):
    domain = "diagnostics"


class DegenerateSample(VolkitError):
    domain = "diagnostics"


class LagTooLarge(VolkitError):
    domain = "diagnostics"


class NonPositiveVol(VolkitError):
    domain = "diagnostics"


# --- varswap ---------------------------------------------------------------

class EmptyChain(VolkitError):
    domain = "varswap"


class UnsortedStrikes(VolkitError):
    domain = "varswap"


class SingularParameters(VolkitError):
    domain = "varswap"


class NoRoot(VolkitError):
    domain = "varswap"


class TimeOutOfRange(VolkitError):
    domain = "varswap"


# --- stationarity ----------------------------------------------------------

class NonStationaryCoefficient(VolkitError):
    domain = "stationarity"


class SingularRegression(VolkitError):
    domain = "stationarity"


# --- backtest --------------------------------------------------------------

class MissingStrikeData(VolkitError):
    domain = "backtest"


class CalendarGap(VolkitError):
    domain = "backtest"


class DegenerateSeries(VolkitError):
    domain = "backtest"


# --- cli -------------------------------------------------------------------

class UsageError(VolkitError):
    domain = "cli"


class SerializationError(VolkitError):
    domain = "cli"
