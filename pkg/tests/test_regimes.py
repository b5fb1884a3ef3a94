import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from conftest import count_oracle
from switchtemp.errors import DivergentMGF, DomainError, NegativeProbability
from switchtemp.regimes import (CountTruncation, RegimeRates, coeff_C, coeff_D, count_mgf, count_prob, count_probs,
                                expected_count, expected_half_count, odd_count_prob, tau_cdf, tau_cdf_table, tau_pdf,
                                tilted_count_prob, tilted_count_probs)

RATES = RegimeRates(10.0, 20.0)

# frozen from the matrix-exponential oracle at t = 1/4
P_QUARTER = [0.0820849986238988, 0.0753470516248133, 0.259730889869867, 0.142726521615668,
             0.221147659827664, 0.0854790156161585]


def test_rates_validation():
    with pytest.raises(DomainError):
        RegimeRates(20, 10)
    with pytest.raises(DomainError):
        RegimeRates(0, 10)
    assert RATES.tilted(2.0) == RegimeRates(8.0, 18.0)
    with pytest.raises(DomainError):
        RATES.tilted(10.0)


def test_truncation_validation():
    with pytest.raises(DomainError):
        CountTruncation(max_switches=5)
    with pytest.raises(DomainError):
        CountTruncation(series_terms=0)


def test_coefficients():
    assert coeff_D(2, 1, 0, RATES) == 0.0
    assert coeff_D(2, 1, 3, RATES) == pytest.approx(100 / (20 * 2))
    assert coeff_D(2, 1, 3, RATES, theta=1.0) == pytest.approx(81 / (19 * 2))
    assert coeff_C(2, 3, 0, RATES) == 1.0
    assert coeff_C(2, 3, 2, RATES) == pytest.approx(2 * 3 / (3 * 4) * 0.5 ** 2 / 2)


def test_tau_pdf_first_switch_is_exponential():
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(tau_pdf(1, x, RATES), 10 * np.exp(-10 * x), rtol=1e-12)


def test_tau_pdf_two_switches_is_hypoexponential():
    x = 0.3
    exact = 10 * 20 / (20 - 10) * (math.exp(-10 * x) - math.exp(-20 * x))
    assert tau_pdf(2, x, RATES) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 8])
def test_tau_pdf_normalised(k):
    val, _ = integrate.quad(lambda x: tau_pdf(k, x, RATES), 0, 10.0, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("k,t", [(2, 0.1), (3, 0.25), (5, 0.5), (6, 1.0)])
def test_tau_cdf_is_integral_of_pdf(k, t):
    val, _ = integrate.quad(lambda x: tau_pdf(k, x, RATES), 0, t)
    assert tau_cdf(k, t, RATES) == pytest.approx(val, rel=1e-10)


def test_tau_cdf_edges():
    assert tau_cdf(0, 0.4, RATES) == 1.0
    assert tau_cdf(3, 0.0, RATES) == 0.0
    assert tau_cdf(1, 0.3, RATES) == pytest.approx(1 - math.exp(-3), abs=1e-14)
    with pytest.raises(DomainError):
        tau_cdf(-1, 0.3, RATES)
    table = tau_cdf_table(0.25, RATES)
    assert table.shape == (42,) and not table.flags.writeable


@given(st.integers(1, 30), st.floats(0.01, 1.0))
def test_tau_cdf_ordered_in_k(k, t):
    assert tau_cdf(k + 1, t, RATES) <= tau_cdf(k, t, RATES) + 1e-15


def test_count_probs_match_oracle():
    for t in (1 / 12, 0.25, 1.0):
        np.testing.assert_allclose(count_probs(t, RATES), count_oracle(t, 10, 20)[:41], atol=1e-12)
    np.testing.assert_allclose(count_probs(0.25, RATES)[:6], P_QUARTER, rtol=1e-11)


def test_count_prob_examples():
    assert count_prob(0, 1 / 12, RATES) == pytest.approx(math.exp(-10 / 12), rel=1e-13)
    assert count_prob(0, 1 / 12, RATES) == pytest.approx(0.4346, abs=5e-5)
    assert count_prob(45, 0.25, RATES) < 1e-20
    with pytest.raises(DomainError):
        count_prob(-1, 0.25, RATES)


def test_negative_probability_rule(monkeypatch):
    import switchtemp.regimes as regimes

    table = np.zeros(42)
    table[:3] = [1.0, 0.5, 0.5 + 5e-11]
    monkeypatch.setattr(regimes, "tau_cdf_table", lambda *a, **k: table)
    assert regimes.count_probs(1.0, RATES)[1] == 0.0
    table[2] = 0.5 + 1e-9
    with pytest.raises(NegativeProbability):
        regimes.count_probs(1.0, RATES)


def test_mgf_and_tilt():
    assert count_mgf(0.0, 0.5, RATES) == 1.0
    p = count_probs(0.25, RATES)
    assert count_mgf(0.3, 0.25, RATES) == pytest.approx(float(np.dot(np.exp(0.3 * np.arange(41)), p)))
    q = tilted_count_probs(0.25, -0.5, RATES)
    assert q.sum() == pytest.approx(1.0, abs=1e-14)
    assert tilted_count_prob(0, 0.25, -0.5, RATES) > p[0]
    with pytest.raises(DivergentMGF):
        count_mgf(5.0, 1.0, RATES)


def test_expectations():
    p = count_probs(0.25, RATES)
    k = np.arange(p.size)
    assert expected_count(0.25, 0.0, RATES) == pytest.approx(float(k @ p))
    assert expected_half_count(0.25, 0.0, RATES) == pytest.approx(float((k // 2) @ p))
    assert odd_count_prob(0.25, 0.0, RATES) == pytest.approx(float(p[1::2].sum()))
