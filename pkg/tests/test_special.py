"""The in-house incomplete gamma against scipy as the independent oracle."""
import numpy as np
import pytest
from scipy import special as sp
from scipy import stats

from volkit._special import chi2_sf, gamma_p, gamma_q


A_GRID = [0.5, 1.0, 2.5, 5.0, 10.0, 50.0, 200.0]
X_GRID = [0.0, 1e-8, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 250.0]


@pytest.mark.parametrize("a", A_GRID)
@pytest.mark.parametrize("x", X_GRID)
def test_gamma_p_matches_scipy(a, x):
    assert abs(gamma_p(a, x) - sp.gammainc(a, x)) < 1e-12


@pytest.mark.parametrize("a", A_GRID)
@pytest.mark.parametrize("x", X_GRID)
def test_gamma_q_matches_scipy(a, x):
    assert abs(gamma_q(a, x) - sp.gammaincc(a, x)) < 1e-12


def test_p_plus_q_is_one():
    for a in A_GRID:
        for x in X_GRID:
            assert abs(gamma_p(a, x) + gamma_q(a, x) - 1.0) < 1e-12


@pytest.mark.parametrize("df", [1, 2, 3, 10, 20, 100])
def test_chi2_sf_matches_scipy(df):
    for x in np.linspace(0.0, 8.0 * df, 25):
        assert abs(chi2_sf(float(x), df) - stats.chi2.sf(x, df)) < 1e-12


def test_chi2_sf_edges():
    assert chi2_sf(0.0, 5) == 1.0
    assert chi2_sf(-3.0, 5) == 1.0
    with pytest.raises(ValueError):
        chi2_sf(1.0, 0)
    with pytest.raises(ValueError):
        gamma_p(-1.0, 1.0)
    with pytest.raises(ValueError):
        gamma_q(1.0, -1.0)
