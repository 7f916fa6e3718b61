import zlib

import numpy as np
import pytest

from volkit import marketdata as md


def seeded(*key) -> np.random.Generator:
    """Independent generator for in-test oracles (not the library's streams)."""
    ints = tuple(zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(ints))


@pytest.fixture
def two_bar_csv(tmp_path):
    path = tmp_path / "bars.csv"
    path.write_text("date,open,high,low,close\n"
                    "2020-01-02,100,101,99,100.5\n"
                    "2020-01-03,100.5,102,100,101\n")
    return path


@pytest.fixture
def flat_csv(tmp_path):
    path = tmp_path / "flat.csv"
    rows = ["date,open,high,low,close"]
    for i in range(30):
        rows.append(f"2020-01-{i + 1:02d},100,100,100,100")
    path.write_text("\n".join(rows) + "\n")
    return path


def make_bars(rng, n, sigma_daily=0.01, s0=100.0) -> md.OhlcSeries:
    """Random valid bars: lognormal closes with highs/lows bracketing."""
    r = rng.normal(0.0, sigma_daily, n)
    c = s0 * np.exp(np.cumsum(r))
    o = np.concatenate(([s0], c[:-1]))
    spread = np.abs(rng.normal(0.0, sigma_daily, n)) + 1e-4
    h = np.maximum(o, c) * np.exp(spread)
    l = np.minimum(o, c) * np.exp(-spread)
    return md.OhlcSeries(o, h, l, c, md.synthetic_dates(n))
