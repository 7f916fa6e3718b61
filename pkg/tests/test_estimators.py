import math

import numpy as np
import pytest

from volkit import estimators as est
from volkit import marketdata as md
from volkit.errors import (
    DegenerateVariance,
    NegativeVarianceEstimate,
    TooShort,
    WindowTooLarge,
)
from volkit.estimators import EstimatorKind as EK

from conftest import make_bars, seeded

LN2 = math.log(2.0)


def bar(o, h, l, c, date="2020-01-02"):
    return md.OhlcSeries([o], [h], [l], [c], (date,))


def gbm_bars(key, days, sigma=0.2, steps=100):
    # realistic bars: ranges commensurate with open-close moves
    from volkit import simulate as sim

    return sim.gbm_bars_from_rng(seeded("gbm-bars", key), sigma, days, steps)


def flat_bars(n, level=100.0):
    x = np.full(n, level)
    return md.OhlcSeries(x, x, x, x, md.synthetic_dates(n))


class TestHandFixtures:
    def test_parkinson_single_bar(self):
        got = est.estimate_vol(bar(100, 102, 100, 100), EK.PARKINSON)
        want = math.log(1.02) / math.sqrt(4.0 * LN2)
        assert abs(got - want) < 1e-12

    def test_close_to_close_two_bars(self):
        series = md.OhlcSeries([100, 100], [100, 101], [100, 100], [100, 101],
                               md.synthetic_dates(2))
        got = est.estimate_vol(series, EK.CLOSE_TO_CLOSE)
        assert abs(got - math.log(1.01)) < 1e-12

    def test_rogers_satchell_symmetric_bar(self):
        got = est.estimate_vol(bar(100, 101, 99, 100), EK.ROGERS_SATCHELL)
        want = math.sqrt(math.log(1.01) ** 2 + math.log(0.99) ** 2)
        assert abs(got - want) < 1e-12

    def test_garman_klass_single_bar(self):
        got = est.estimate_vol(bar(100, 103, 99, 101), EK.GARMAN_KLASS)
        hl = math.log(103 / 99)
        co = math.log(101 / 100)
        want = math.sqrt(0.5 * hl * hl - (2 * LN2 - 1) * co * co)
        assert abs(got - want) < 1e-12

    def test_gkyz_two_bars(self):
        series = md.OhlcSeries([100, 102], [101, 104], [99, 101.5], [100.5, 103],
                               md.synthetic_dates(2))
        got = est.estimate_vol(series, EK.GKYZ)
        oc = math.log(102 / 100.5)
        hl = math.log(104 / 101.5)
        co = math.log(103 / 102)
        want = math.sqrt(oc * oc + 0.5 * hl * hl - (2 * LN2 - 1) * co * co)
        assert abs(got - want) < 1e-12

    def test_yang_zhang_matches_definition(self):
        bars = gbm_bars(1, 40)
        got = est.estimate_vol(bars, EK.YANG_ZHANG)
        o, h, l, c = bars.open[1:], bars.high[1:], bars.low[1:], bars.close[1:]
        prev = bars.close[:-1]
        n = len(c)
        on = np.log(o / prev)
        oc = np.log(c / o)
        rs = np.mean(np.log(h / c) * np.log(h / o) + np.log(l / c) * np.log(l / o))
        k = 10.34 / (1.34 + (n + 1) / (n - 1))
        want = math.sqrt(np.sum((on - on.mean()) ** 2) / (n - 1)
                         + k * np.sum((oc - oc.mean()) ** 2) / (n - 1)
                         + (1 - k) * rs)
        assert abs(got - want) < 1e-12

    def test_yang_zhang_standard_weight_override(self):
        bars = gbm_bars(2, 40)
        default = est.estimate_vol(bars, EK.YANG_ZHANG)
        standard = est.estimate_vol(bars, EK.YANG_ZHANG, yz_k_numerator=0.34)
        assert default != standard

    def test_yang_zhang_default_weight_can_go_negative(self):
        # with the 10.34 numerator the range component carries weight ~-3.4,
        # so bars with ranges wide relative to open-close moves break it;
        # the standard 0.34 weight keeps every component nonnegative
        bars = make_bars(seeded("yz-neg"), 40)
        with pytest.raises(NegativeVarianceEstimate):
            est.estimate_vol(bars, EK.YANG_ZHANG)
        assert est.estimate_vol(bars, EK.YANG_ZHANG, yz_k_numerator=0.34) > 0.0


class TestDegenerateInputs:
    @pytest.mark.parametrize("kind", [EK.CLOSE_TO_CLOSE, EK.PARKINSON, EK.GARMAN_KLASS,
                                      EK.ROGERS_SATCHELL, EK.GKYZ, EK.YANG_ZHANG,
                                      EK.CONSTANT_VOL])
    def test_flat_bars_give_zero(self, kind):
        assert est.estimate_vol(flat_bars(10), kind) == 0.0

    def test_flat_moving_average(self):
        assert est.estimate_vol(flat_bars(10), EK.MOVING_AVERAGE, window=5) == 0.0

    def test_close_linked_need_two_bars(self):
        for kind in (EK.CLOSE_TO_CLOSE, EK.GKYZ):
            with pytest.raises(TooShort):
                est.estimate_vol(flat_bars(1), kind)

    def test_yang_zhang_needs_three_bars(self):
        with pytest.raises(TooShort):
            est.estimate_vol(flat_bars(2), EK.YANG_ZHANG)

    def test_negative_variance_guard(self):
        with pytest.raises(NegativeVarianceEstimate):
            est._finish(-1e-9, EK.GARMAN_KLASS)
        with pytest.raises(NegativeVarianceEstimate):
            est._guard_neg(np.array([0.1, -1e-9]), EK.GKYZ)


class TestProperties:
    @pytest.mark.parametrize("kind", [EK.CLOSE_TO_CLOSE, EK.PARKINSON, EK.GARMAN_KLASS,
                                      EK.ROGERS_SATCHELL, EK.GKYZ, EK.YANG_ZHANG])
    def test_scale_invariance(self, kind):
        bars = gbm_bars(3, 60)
        scaled = md.OhlcSeries(7.5 * bars.open, 7.5 * bars.high, 7.5 * bars.low,
                               7.5 * bars.close, bars.dates)
        a = est.estimate_vol(bars, kind)
        b = est.estimate_vol(scaled, kind)
        assert abs(a - b) < 1e-12

    @pytest.mark.parametrize("kind", [EK.PARKINSON, EK.GARMAN_KLASS, EK.ROGERS_SATCHELL])
    def test_monotone_dispersion(self, kind):
        bars = make_bars(seeded("disperse"), 40)
        wider = md.OhlcSeries(bars.open, bars.high * 1.01, bars.low * 0.99,
                              bars.close, bars.dates)
        assert est.estimate_vol(wider, kind) >= est.estimate_vol(bars, kind)

    def test_gkyz_equals_gk_without_gaps(self):
        rng = seeded("nogap")
        n = 50
        r = rng.normal(0, 0.01, n)
        c = 100 * np.exp(np.cumsum(r))
        o = np.concatenate(([100.0], c[:-1]))  # open = previous close
        spread = np.abs(rng.normal(0, 0.01, n)) + 1e-4
        h = np.maximum(o, c) * np.exp(spread)
        l = np.minimum(o, c) * np.exp(-spread)
        bars = md.OhlcSeries(o, h, l, c, md.synthetic_dates(n))
        gk_tail = est.estimate_vol(bars.slice(1, n), EK.GARMAN_KLASS)
        gkyz = est.estimate_vol(bars, EK.GKYZ)
        assert abs(gk_tail - gkyz) < 1e-12

    def test_rogers_satchell_zero_without_excursion(self):
        # high/low pinned to open/close leaves no intra-bar range terms
        rng = seeded("rs0")
        c = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 30)))
        o = np.concatenate(([100.0], c[:-1]))
        h = np.maximum(o, c)
        l = np.minimum(o, c)
        bars = md.OhlcSeries(o, h, l, c, md.synthetic_dates(30))
        assert est.estimate_vol(bars, EK.ROGERS_SATCHELL) == 0.0


class TestRollingVol:
    def test_window_equals_length_reduces_to_full_sample(self):
        bars = make_bars(seeded("roll", 0), 30)
        rolled = est.rolling_vol(bars, EK.MOVING_AVERAGE, window=30)
        assert len(rolled) == 1
        assert abs(rolled.values[0] - est.estimate_vol(bars, EK.CLOSE_TO_CLOSE)) < 1e-14

    def test_constant_closes_all_zero(self):
        rolled = est.rolling_vol(flat_bars(25), EK.MOVING_AVERAGE, window=5)
        assert np.array_equal(rolled.values, np.zeros(21))

    def test_window_too_large(self):
        with pytest.raises(WindowTooLarge):
            est.rolling_vol(flat_bars(20), EK.MOVING_AVERAGE, window=21)

    def test_window_too_small(self):
        with pytest.raises(TooShort):
            est.rolling_vol(flat_bars(20), EK.PARKINSON, window=1)

    def test_constant_vol_kind_repeats_full_sample(self):
        bars = make_bars(seeded("roll", 1), 30)
        rolled = est.rolling_vol(bars, EK.CONSTANT_VOL, window=10)
        assert np.all(rolled.values == rolled.values[0])
        assert abs(rolled.values[0] - est.estimate_vol(bars, EK.CLOSE_TO_CLOSE)) < 1e-14

    @pytest.mark.parametrize("kind", [EK.PARKINSON, EK.GARMAN_KLASS, EK.ROGERS_SATCHELL,
                                      EK.GKYZ, EK.YANG_ZHANG, EK.MOVING_AVERAGE])
    def test_rolling_agrees_with_windowed_estimate(self, kind):
        bars = gbm_bars(4, 40)
        w = 12
        rolled = est.rolling_vol(bars, kind, window=w)
        assert len(rolled) == 40 - w + 1
        assert rolled.dates == bars.dates[w - 1:]
        for i, t in enumerate(range(w - 1, 40)):
            window = bars.slice(t - w + 1, t + 1)
            if kind is EK.MOVING_AVERAGE:
                want = est.estimate_vol(window, kind, window=w)
            else:
                want = est.estimate_vol(window, kind)
            assert abs(rolled.values[i] - want) < 1e-12

    def test_dates_drop_first_windowm1(self):
        bars = make_bars(seeded("roll", 3), 15)
        rolled = est.rolling_vol(bars, EK.PARKINSON, window=4)
        assert rolled.dates == bars.dates[3:]


class TestEfficiency:
    def test_close_to_close_is_exactly_one(self):
        rep = est.efficiency(EK.CLOSE_TO_CLOSE, trials=100, horizon_days=30,
                             intrabar_steps=100, seed=3)
        assert rep.efficiency == 1.0
        assert rep.estimator_variance == rep.reference_variance

    def test_parkinson_beats_close_to_close(self):
        rep = est.efficiency(EK.PARKINSON, trials=200, horizon_days=60,
                             intrabar_steps=150, seed=5)
        assert rep.efficiency > 2.0

    def test_degenerate_variance(self):
        with pytest.raises(DegenerateVariance):
            est.efficiency(EK.PARKINSON, gbm_vol=0.0, trials=100, horizon_days=10,
                           intrabar_steps=100, seed=1)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            est.efficiency(EK.PARKINSON, trials=99, seed=0)
        with pytest.raises(ValueError):
            est.efficiency(EK.PARKINSON, trials=100, intrabar_steps=99, seed=0)

    def test_bias_shrinks_with_intrabar_steps(self):
        # discrete monitoring under-measures the range; finer grids less so
        from volkit import simulate as sim

        def mean_estimate(steps):
            vals = [est.estimate_vol(
                sim.gbm_bars_from_rng(seeded("bias", steps, i), 0.2, 40, steps),
                EK.PARKINSON) for i in range(300)]
            return float(np.mean(vals))

        true_daily = 0.2 / math.sqrt(252)
        coarse = mean_estimate(100)
        fine = mean_estimate(800)
        assert coarse < fine < true_daily
        assert abs(fine - true_daily) / true_daily < 0.03
