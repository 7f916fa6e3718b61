"""volkit command-line front-end.

Exit codes: 0 success, 1 usage error, 2 data/numeric error (diagnostic
names the originating module error).  JSON reports are deterministic:
keys sorted, floats printed with 17 significant digits, NaN/Inf rejected.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import backtest as bt
from . import diagnostics as diag
from . import estimators as est
from . import garch
from . import marketdata as md
from . import simulate as sim
from . import stationarity as st
from . import varswap as vs
from .errors import SerializationError, UsageError, VolkitError

_POINTS = vs.VARIANCE_POINTS


# --- deterministic serialization ---------------------------------------------

def _fmt_float(x: float, path: str) -> str:
    if not math.isfinite(x):
        raise SerializationError(f"non-finite value at {path}")
    return format(x, ".17g")


def _write_json(obj, out: list[str], path: str) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj), path))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise SerializationError(f"non-string key at {path}")
            out.append(json.dumps(key) + ": ")
            _write_json(obj[key], out, f"{path}.{key}")
            if i + 1 < len(keys):
                out.append(", ")
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        seq = list(obj)
        for i, item in enumerate(seq):
            _write_json(item, out, f"{path}[{i}]")
            if i + 1 < len(seq):
                out.append(", ")
        out.append("]")
    else:
        raise SerializationError(f"unserializable {type(obj).__name__} at {path}")


def emit_report(result, fmt: str = "json") -> str:
    """Serialize a report dict (stable key order) or tidy rows to CSV."""
    if fmt == "json":
        out: list[str] = []
        _write_json(result, out, "$")
        return "".join(out) + "\n"
    if fmt == "csv":
        lines = ["date,value,series"]
        for date, value, series in result:
            lines.append(f"{date},{_fmt_float(float(value), series)},{series}")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unknown format {fmt!r}")


# --- shared argument helpers ---------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; we reserve 2 for data errors
        raise UsageError(message)


_ESTIMATOR_NAMES = [k.value for k in est.EstimatorKind]
_GARCH_NAMES = [k.value for k in garch.GarchModelKind]


def _estimator_kind(name: str) -> est.EstimatorKind:
    try:
        return est.EstimatorKind(name)
    except ValueError:
        raise UsageError(f"unknown method {name!r}; valid: {', '.join(_ESTIMATOR_NAMES)}") from None


def _garch_kind(name: str) -> garch.GarchModelKind:
    try:
        return garch.GarchModelKind(name)
    except ValueError:
        raise UsageError(f"unknown model {name!r}; valid: {', '.join(_GARCH_NAMES)}") from None


def _load_params(path: str, model: str):
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    fields = {
        "gbm": (("sigma",), ()),
        "sabr": (("alpha", "nu"), ("rho", "beta")),
        "heston": (("v0", "kappa", "theta", "nu"), ("rho",)),
        "stein": (("sigma0", "kappa", "theta", "nu"), ("rho",)),
        "lambda-sabr": (("alpha", "kappa", "theta", "nu"), ("rho", "beta")),
    }
    if model not in fields:
        raise UsageError(f"unknown model {model!r}; valid: {', '.join(fields)}")
    required, optional = fields[model]
    missing = [f for f in required if f not in raw]
    extra = [f for f in raw if f not in required + optional]
    if missing or extra:
        raise UsageError(f"params for {model}: missing {missing}, unexpected {extra}")
    cls = {"gbm": sim.GbmParams, "sabr": vs.SabrParams, "heston": vs.HestonParams,
           "stein": vs.SteinParams, "lambda-sabr": vs.LambdaSabrParams}[model]
    try:
        return cls(**{k: float(v) for k, v in raw.items()})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad params for {model}: {exc}") from None


def _params_dict(p) -> dict:
    return {k: float(v) for k, v in vars(p).items()}


# --- subcommand handlers --------------------------------------------------------

def _cmd_estimate(args) -> dict:
    kind = _estimator_kind(args.method)
    series = md.load_ohlc_csv(args.input)
    vol = est.estimate_vol(series, kind, window=args.window, yz_k_numerator=args.yz_k)
    if args.annualize:
        vol *= math.sqrt(args.periods_per_year)
    report = {"method": kind.value, "vol": vol,
              "scale": "annualized" if args.annualize else "daily",
              "n_bars": len(series)}
    if args.window is not None:
        report["window"] = args.window
    return report


def _cmd_efficiency(args) -> dict:
    kind = _estimator_kind(args.method)
    rep = est.efficiency(kind, gbm_vol=args.vol, horizon_days=args.days,
                         trials=args.trials, intrabar_steps=args.steps,
                         seed=args.seed, window=args.window, yz_k_numerator=args.yz_k)
    return {"method": kind.value, "efficiency": rep.efficiency,
            "estimator_variance": rep.estimator_variance,
            "reference_variance": rep.reference_variance,
            "trials": args.trials, "intrabar_steps": args.steps, "seed": args.seed}


def _cmd_fit_garch(args) -> dict:
    kind = _garch_kind(args.model)
    series = md.load_ohlc_csv(args.input)
    returns = md.log_returns(series)
    report: dict = {"model": kind.value}
    if args.refit_step is not None:
        records = garch.refit_increasing_window(kind, returns, args.refit_start,
                                                args.refit_step, args.egarch_form)
        vols = garch.refit_vol_series(records)
        report["refits"] = [
            {"index": r.index, "date": r.date, "converged": r.converged,
             "loglik": r.loglik, "last_vol": r.last_vol, "error": r.error,
             "params": _params_dict(r.params) if r.params else None}
            for r in records]
        dates, values = vols.dates, vols.values
    else:
        fit = garch.fit(kind, returns, egarch_form=args.egarch_form)
        report.update({"params": _params_dict(fit.params), "loglik": fit.loglik,
                       "converged": fit.converged})
        dates, values = fit.vol.dates, fit.vol.values
    if args.series_out:
        with open(args.series_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(md.serialize_value_csv(dates, values, "vol"))
        report["vol_series_path"] = args.series_out
    else:
        report["vol_series"] = list(values)
    return report


_DIAGNOSE_METHODS = ["constvol", "parkinson", "garman-klass", "rogers-satchell",
                     "gkyz", "yang-zhang", "ma21", "ma63", "garch", "gjr-garch",
                     "egarch", "ewma"]


def _diagnose_vol(method: str, series, returns, yz_window: int):
    """Vol series for one diagnose method, aligned to return dates."""
    per_bar = {"parkinson": est.EstimatorKind.PARKINSON,
               "garman-klass": est.EstimatorKind.GARMAN_KLASS,
               "rogers-satchell": est.EstimatorKind.ROGERS_SATCHELL}
    if method == "constvol":
        level = est.estimate_vol(series, est.EstimatorKind.CLOSE_TO_CLOSE)
        return md.VolSeries(np.full(len(returns), level), md.DAILY, returns.dates)
    if method in per_bar:
        kind = per_bar[method]
        terms = {"parkinson": est._parkinson_terms(series.high, series.low),
                 "garman-klass": est._gk_terms(series.open, series.high, series.low, series.close),
                 "rogers-satchell": est._rs_terms(series.open, series.high, series.low, series.close)}[method]
        vals = np.sqrt(np.maximum(terms, 0.0))
        return md.VolSeries(vals, md.DAILY, series.dates)
    if method == "gkyz":
        terms = est._gkyz_terms(series.open[1:], series.high[1:], series.low[1:],
                                series.close[1:], series.close[:-1])
        return md.VolSeries(np.sqrt(np.maximum(terms, 0.0)), md.DAILY, series.dates[1:])
    if method == "yang-zhang":
        return est.rolling_vol(series, est.EstimatorKind.YANG_ZHANG, max(yz_window, 3))
    if method in ("ma21", "ma63"):
        window = 21 if method == "ma21" else 63
        return est.rolling_vol(series, est.EstimatorKind.MOVING_AVERAGE, window)
    kind = {"garch": garch.GarchModelKind.GARCH11,
            "gjr-garch": garch.GarchModelKind.GJR_GARCH,
            "egarch": garch.GarchModelKind.EGARCH,
            "ewma": garch.GarchModelKind.EWMA}[method]
    return garch.fit(kind, returns).vol


def _cmd_diagnose(args) -> dict:
    series = md.load_ohlc_csv(args.input)
    returns = md.log_returns(series)
    lags = [int(x) for x in args.lags.split(",") if x]
    methods = _DIAGNOSE_METHODS if args.methods == "all" else args.methods.split(",")
    for m in methods:
        if m not in _DIAGNOSE_METHODS:
            raise UsageError(f"unknown diagnose method {m!r}; valid: all, "
                             f"{', '.join(_DIAGNOSE_METHODS)}")
    table: dict = {}
    plot_rows = []
    for method in methods:
        vol = _diagnose_vol(method, series, returns, args.yz_window)
        res = diag.residuals(returns, vol, method)
        sq = res.values * res.values
        entry: dict = {"ljung_box_squared": {}}
        for h in lags:
            lb = diag.ljung_box(sq, h)
            entry["ljung_box_squared"][str(h)] = {"q": lb.q_stat, "p": lb.p_value,
                                                  "reject": lb.reject}
        mom = diag.moments(res.values)
        entry["skewness"] = mom.skewness
        entry["kurtosis"] = mom.kurtosis
        entry["vol_of_vol"] = diag.vol_of_vol(vol)
        table[method] = entry
        if args.plot_data:
            acf_res = diag.acf(sq)
            for lag, value in zip(acf_res.lags, acf_res.values):
                plot_rows.append((int(lag), value, f"acf_sq:{method}"))
            for theo, emp in diag.qq_data(res.values):
                plot_rows.append((theo, emp, f"qq:{method}"))
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit_report(plot_rows, "csv"))
    return {"lags": lags, "methods": table, "n_bars": len(series)}


def _cmd_price_varswap(args) -> dict:
    points = _POINTS if args.points else 1.0
    if args.model == "replication":
        if not args.chain:
            raise UsageError("replication pricing needs --chain")
        chain = vs.load_option_chain(args.chain)
        corridor = None
        if args.corridor:
            lo, hi = (float(x) for x in args.corridor.split(","))
            corridor = (lo, hi)
        strike = vs.replication_strike(chain, corridor)
        report = {"model": "replication", "strike": strike * points,
                  "maturity_years": chain.maturity_years,
                  "n_puts": len(chain.puts), "n_calls": len(chain.calls)}
        if corridor:
            report["corridor"] = [corridor[0], corridor[1]]
        return report
    if not args.params:
        raise UsageError(f"{args.model} pricing needs --params")
    params = _load_params(args.params, args.model)
    T = args.maturity
    if args.model == "sabr":
        strike = vs.strike_sabr(params, T)
    elif args.model == "heston":
        strike = vs.strike_heston(params, T)
    elif args.model == "stein":
        strike = vs.strike_stein(params, T)
    elif args.model == "lambda-sabr":
        strike = vs.strike_lambda_sabr(params, T)
    else:
        raise UsageError(f"unknown model {args.model!r}")
    report = {"model": args.model, "strike": strike * points, "maturity_years": T,
              "params": _params_dict(params)}
    if args.model == "lambda-sabr":
        # the printed formula is reported next to the MC oracle, never asserted
        if args.seed is None:
            raise UsageError("lambda-sabr pricing needs --seed for its MC comparison")
        mc = sim.mc_variance_strike(sim.SdeSpec(params, T),
                                    sim.PathConfig(args.mc_paths, args.mc_steps, args.seed))
        report["mc_strike"] = mc.mean * points
        report["mc_stderr"] = mc.stderr * points
        report["mc_paths"] = mc.n_paths
        report["formula_minus_mc"] = (strike - mc.mean) * points
        report["relative_gap"] = (strike - mc.mean) / mc.mean if mc.mean else None
    return report


def _cmd_simulate(args) -> dict:
    params = _load_params(args.params, args.model)
    spec = sim.SdeSpec(params, args.horizon)
    mc = sim.mc_variance_strike(spec, sim.PathConfig(args.paths, args.steps, args.seed))
    points = _POINTS if args.points else 1.0
    return {"model": args.model, "mean": mc.mean * points, "stderr": mc.stderr * points,
            "n_paths": mc.n_paths, "n_steps": args.steps, "seed": args.seed,
            "horizon_years": args.horizon}


def _cmd_stationarity(args) -> dict:
    paths = [p for p in args.inputs.split(",") if p]
    if not paths:
        raise UsageError("need at least one input file")
    series = []
    labels = []
    for p in paths:
        s = md.load_ohlc_csv(p)
        series.append(s.close)
        labels.append(s.label)
    scan = st.stationarity_scan(series, labels, pairwise=args.pairwise)
    singles = {}
    for label, res, hl in zip(scan.labels, scan.singles, scan.half_lives):
        singles[label] = {"statistic": res.statistic, "p_value": res.p_value,
                          "lag_order": res.lag_order, "reject": res.reject,
                          "half_life_days": hl}
    report: dict = {"singles": singles}
    if scan.pairwise is not None:
        matrix = {}
        for i, row_label in enumerate(scan.labels):
            row = {}
            for j, col_label in enumerate(scan.labels):
                cell = scan.pairwise[i][j]
                row[col_label] = None if cell is None else {
                    "statistic": cell.statistic, "p_value": cell.p_value,
                    "reject": cell.reject}
            matrix[row_label] = row
        report["spread_matrix"] = matrix
    if args.matrix_out and scan.pairwise is not None:
        rows = []
        for i, row_label in enumerate(scan.labels):
            for j, col_label in enumerate(scan.labels):
                cell = scan.pairwise[i][j]
                if cell is not None:
                    rows.append((f"{row_label}-{col_label}", cell.p_value, "adf_p"))
        with open(args.matrix_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit_report(rows, "csv"))
        report["matrix_path"] = args.matrix_out
    return report


def _cmd_backtest(args) -> dict:
    series = md.load_ohlc_csv(args.input)
    months = {"1m": 1, "3m": 3, "6m": 6, "12m": 12}.get(args.maturity)
    if months is None:
        raise UsageError("maturity must be one of 1m, 3m, 6m, 12m")
    config = bt.StrategyConfig(months, start_index=args.start, points=args.points)
    if args.strikes:
        strikes = bt.load_strike_csv(args.strikes)
    elif args.synthetic_nu is not None:
        strikes = bt.synthetic_strike_source(series, config, nu=args.synthetic_nu)
    else:
        raise UsageError("need --strikes FILE or --synthetic-nu NU")
    report = bt.run_long_strategy(series, strikes, config)
    points = _POINTS if args.points else 1.0
    out = {"maturity_months": months, "sharpe": report.sharpe,
           "degenerate": report.degenerate,
           "max_simultaneous": report.max_simultaneous,
           "final_cum_mtm": float(report.cum_mtm[-1]),
           "contracts": [{"entry_date": c.entry_date, "expiry_date": c.expiry_date,
                          "k_var": c.k_var * points, "settle": c.settle}
                         for c in report.contracts]}
    if args.series_out:
        with open(args.series_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit_report(
                [(d, v, "cum_mtm") for d, v in zip(report.dates, report.cum_mtm)], "csv"))
        out["cum_mtm_path"] = args.series_out
    return out


# --- parser -----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="volkit", description="historical-volatility and "
                     "variance-swap toolkit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("estimate", help="full-sample volatility estimate", parents=[])
    p.add_argument("--method", required=True, help=f"one of: {', '.join(_ESTIMATOR_NAMES)}")
    p.add_argument("--input", required=True, help="OHLC csv (date,open,high,low,close)")
    p.add_argument("--window", type=int, default=None, help="moving-average window (bars)")
    p.add_argument("--annualize", action="store_true")
    p.add_argument("--periods-per-year", type=int, default=252)
    p.add_argument("--yz-k", type=float, default=est.YZ_K_NUMERATOR,
                   help="Yang-Zhang weight numerator (10.34 default, 0.34 standard)")
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("efficiency", help="Monte-Carlo estimator efficiency")
    p.add_argument("--method", required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--steps", type=int, default=390, help="intrabar steps per day")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--days", type=int, default=252)
    p.add_argument("--vol", type=float, default=0.2, help="annualized GBM vol")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--yz-k", type=float, default=est.YZ_K_NUMERATOR)
    p.set_defaults(handler=_cmd_efficiency)

    p = sub.add_parser("fit-garch", help="maximum-likelihood GARCH-family fit")
    p.add_argument("--model", required=True, help=f"one of: {', '.join(_GARCH_NAMES)}")
    p.add_argument("--input", required=True)
    p.add_argument("--refit-step", type=int, default=None,
                   help="increasing-window refit every N days")
    p.add_argument("--refit-start", type=int, default=250)
    p.add_argument("--egarch-form", choices=[garch.PRINTED, garch.NELSON],
                   default=garch.PRINTED)
    p.add_argument("--series-out", default=None, help="write the vol series csv here")
    p.set_defaults(handler=_cmd_fit_garch)

    p = sub.add_parser("diagnose", help="residual diagnostics for the estimator suite")
    p.add_argument("--input", required=True)
    p.add_argument("--methods", default="all")
    p.add_argument("--lags", default="10,15,20")
    p.add_argument("--yz-window", type=int, default=5)
    p.add_argument("--plot-data", default=None, help="tidy csv of ACF/QQ data")
    p.set_defaults(handler=_cmd_diagnose)

    p = sub.add_parser("price-varswap", help="variance-swap strike")
    p.add_argument("--model", required=True,
                   help="sabr | heston | stein | lambda-sabr | replication")
    p.add_argument("--params", default=None, help="JSON parameter file")
    p.add_argument("--maturity", type=float, default=1.0, help="years")
    p.add_argument("--chain", default=None, help="option chain csv (replication)")
    p.add_argument("--corridor", default=None, help="lo,hi strike band")
    p.add_argument("--points", action="store_true", help="report in variance points")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mc-paths", type=int, default=100_000)
    p.add_argument("--mc-steps", type=int, default=500)
    p.set_defaults(handler=_cmd_price_varswap)

    p = sub.add_parser("simulate", help="Monte-Carlo integrated-variance strike")
    p.add_argument("--model", required=True, help="gbm | sabr | heston | stein | lambda-sabr")
    p.add_argument("--params", required=True)
    p.add_argument("--horizon", type=float, default=1.0, help="years")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--points", action="store_true")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("stationarity", help="ADF battery on series and spreads")
    p.add_argument("--inputs", required=True, help="comma-separated csv paths")
    p.add_argument("--pairwise", action="store_true")
    p.add_argument("--matrix-out", default=None)
    p.set_defaults(handler=_cmd_stationarity)

    p = sub.add_parser("backtest", help="rolling long-variance strategy")
    p.add_argument("--input", required=True)
    p.add_argument("--strikes", default=None, help="csv date,k_var,alpha,nu")
    p.add_argument("--synthetic-nu", type=float, default=None,
                   help="build fair strikes from trailing vol with this volvol")
    p.add_argument("--maturity", required=True, help="1m | 3m | 6m | 12m")
    p.add_argument("--start", type=int, default=22)
    p.add_argument("--points", action="store_true")
    p.add_argument("--series-out", default=None)
    p.set_defaults(handler=_cmd_backtest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("missing subcommand (see --help)")
        report = args.handler(args)
        sys.stdout.write(emit_report(report, "json"))
        return 0
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except VolkitError as exc:
        sys.stderr.write(f"error: {exc.domain}.{type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
