import math

import numpy as np
import pytest

from volkit import marketdata as md
from volkit.errors import (
    AlreadyAnnualized,
    EmptySeries,
    MalformedRow,
    MissingFile,
    OrderViolation,
    TooShort,
)

from conftest import seeded


class TestLoadOhlcCsv:
    def test_two_bar_file(self, two_bar_csv):
        series = md.load_ohlc_csv(two_bar_csv)
        assert len(series) == 2
        assert series.dates == ("2020-01-02", "2020-01-03")
        assert series.close[1] == 101.0
        assert series.low[0] == 99.0

    def test_high_below_low_rejected_with_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("date,open,high,low,close\n"
                        "2020-01-02,100,101,99,100.5\n"
                        "2020-01-03,100,99,100,100\n")
        with pytest.raises(OrderViolation) as err:
            md.load_ohlc_csv(path)
        assert err.value.line_no == 3

    def test_empty_after_header(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("date,open,high,low,close\n")
        with pytest.raises(EmptySeries):
            md.load_ohlc_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            md.load_ohlc_csv(tmp_path / "nope.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("time,open,high,low,close\n2020-01-02,1,1,1,1\n")
        with pytest.raises(MalformedRow) as err:
            md.load_ohlc_csv(path)
        assert err.value.line_no == 1

    def test_unparseable_price(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("date,open,high,low,close\n2020-01-02,100,oops,99,100\n")
        with pytest.raises(MalformedRow) as err:
            md.load_ohlc_csv(path)
        assert err.value.line_no == 2

    def test_nonpositive_price(self, tmp_path):
        path = tmp_path / "np.csv"
        path.write_text("date,open,high,low,close\n2020-01-02,100,101,-1,100\n")
        with pytest.raises(OrderViolation):
            md.load_ohlc_csv(path)

    def test_duplicate_date(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("date,open,high,low,close\n"
                        "2020-01-02,100,101,99,100\n"
                        "2020-01-02,100,101,99,100\n")
        with pytest.raises(OrderViolation):
            md.load_ohlc_csv(path)

    def test_rows_sorted_by_date(self, tmp_path):
        path = tmp_path / "rev.csv"
        path.write_text("date,open,high,low,close\n"
                        "2020-01-03,101,102,100,101\n"
                        "2020-01-02,100,101,99,100\n")
        series = md.load_ohlc_csv(path)
        assert series.dates == ("2020-01-02", "2020-01-03")
        assert series.close[0] == 100.0

    def test_close_only_header(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("date,close\n2020-01-02,100.5\n2020-01-03,101.0\n")
        series = md.load_ohlc_csv(path)
        assert np.array_equal(series.open, series.close)
        assert np.array_equal(series.high, series.low)

    def test_round_trip_bit_exact(self, tmp_path):
        text = ("date,open,high,low,close\n"
                "2020-01-02,100.0,101.5,99.25,100.5\n"
                "2020-01-03,100.5,102.0,100.0,101.0\n")
        path = tmp_path / "rt.csv"
        path.write_text(text)
        assert md.serialize_ohlc_csv(md.load_ohlc_csv(path)) == text

    def test_save_load_round_trip(self, tmp_path):
        bars = md.OhlcSeries([100.0, 101.0], [102.0, 103.0], [99.5, 100.5],
                             [101.0, 102.0], ("2021-03-01", "2021-03-02"))
        path = tmp_path / "out.csv"
        md.save_ohlc_csv(bars, path)
        again = md.load_ohlc_csv(path)
        assert np.array_equal(again.close, bars.close)
        assert again.dates == bars.dates


class TestLogReturns:
    def test_constant_prices_give_zero(self):
        r = md.log_returns([100.0, 100.0, 100.0])
        assert np.array_equal(r.values, np.zeros(2))

    def test_hand_value(self):
        r = md.log_returns([100.0, 101.0])
        assert abs(r.values[0] - math.log(1.01)) < 1e-15

    def test_too_short(self):
        with pytest.raises(TooShort):
            md.log_returns([100.0])

    def test_keeps_later_dates_from_ohlc(self, two_bar_csv):
        series = md.load_ohlc_csv(two_bar_csv)
        r = md.log_returns(series)
        assert r.dates == ("2020-01-03",)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            md.log_returns([100.0, -1.0])


class TestAnnualize:
    def test_hand_value(self):
        v = md.annualize(md.VolSeries([0.01], md.DAILY))
        assert abs(v.values[0] - 0.01 * math.sqrt(252)) < 1e-15
        assert v.scale == md.ANNUALIZED

    def test_zero_stays_zero(self):
        assert md.annualize(md.VolSeries([0.0], md.DAILY)).values[0] == 0.0

    def test_already_annualized(self):
        with pytest.raises(AlreadyAnnualized):
            md.annualize(md.VolSeries([0.1], md.ANNUALIZED))

    def test_linearity(self):
        rng = seeded("annualize")
        base = rng.uniform(0.0, 0.1, 50)
        for k in (0.0, 0.5, 2.0, 17.25):
            lhs = md.annualize(md.VolSeries(k * base, md.DAILY)).values
            rhs = k * md.annualize(md.VolSeries(base, md.DAILY)).values
            assert np.allclose(lhs, rhs, rtol=1e-14, atol=0.0)

    def test_custom_calendar(self):
        v = md.annualize(md.VolSeries([0.01], md.DAILY), periods_per_year=260)
        assert abs(v.values[0] - 0.01 * math.sqrt(260)) < 1e-15


class TestContainers:
    def test_vol_series_rejects_negative(self):
        with pytest.raises(ValueError):
            md.VolSeries([-0.1], md.DAILY)

    def test_vol_series_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            md.VolSeries([0.1], "weekly")

    def test_bar_invariant_enforced(self):
        with pytest.raises(OrderViolation):
            md.OhlcSeries([100], [99], [98], [100], ("2020-01-02",))

    def test_dates_strictly_increasing(self):
        with pytest.raises(OrderViolation):
            md.OhlcSeries([100, 100], [101, 101], [99, 99], [100, 100],
                          ("2020-01-03", "2020-01-02"))

    def test_value_csv_round_trip(self, tmp_path):
        dates = ("2020-01-02", "2020-01-03")
        values = np.array([0.123456, 0.2])
        path = tmp_path / "v.csv"
        path.write_text(md.serialize_value_csv(dates, values, "vol"))
        got_dates, got_values = md.load_value_csv(path)
        assert got_dates == dates
        assert np.array_equal(got_values, values)
