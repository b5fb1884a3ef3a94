import math
import warnings

import numpy as np
import pytest

from switchtemp.errors import DomainError, NonFiniteIntegrand, TruncationWarning
from switchtemp.numerics import (QuadratureConfig, halfline_cutoff, halfline_integral, panel_count, tail_sum,
                                 trapezoid)
from switchtemp.regimes import RegimeRates, count_probs
from switchtemp.specfun import SeriesControl

DENSE = QuadratureConfig(nodes_per_unit=4096)


def test_trapezoid_exact_cases():
    assert trapezoid(lambda x: np.full_like(x, 2.5), 0.0, 1.0) == pytest.approx(2.5, abs=1e-15)
    assert trapezoid(lambda x: x, 0.0, 2.0) == pytest.approx(2.0, abs=1e-14)
    assert trapezoid(lambda x: x, 1.0, 1.0) == 0.0


def test_trapezoid_exponential_dense():
    assert trapezoid(lambda x: np.exp(-x), 0.0, 10.0, DENSE) == pytest.approx(1 - math.exp(-10), abs=1e-8)


def test_trapezoid_complex_and_errors():
    val = trapezoid(lambda x: np.exp(1j * x), 0.0, math.pi, DENSE)
    assert val == pytest.approx(2j, abs=1e-6)
    with pytest.raises(NonFiniteIntegrand), np.errstate(divide="ignore"):
        trapezoid(lambda x: 1.0 / x, 0.0, 1.0)
    with pytest.raises(DomainError):
        trapezoid(lambda x: x, 1.0, 0.0)


def test_trapezoid_second_order():
    exact = 1 - math.exp(-1)
    errs = [abs(trapezoid(lambda x: np.exp(-x), 0, 1, QuadratureConfig(n, 16)) - exact) for n in (64, 128, 256)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_panel_count_minimum():
    cfg = QuadratureConfig()
    assert panel_count(0, 0.01, cfg) == cfg.min_nodes
    assert panel_count(0, 2, cfg) == 512


def test_halfline_examples():
    assert halfline_integral(lambda x: np.exp(-2 * x), 2.0) == pytest.approx(0.5, abs=1e-5)
    assert halfline_integral(lambda x: np.exp(-2 * x), 2.0, DENSE) == pytest.approx(0.5, abs=1e-7)
    assert halfline_integral(lambda x: x * np.exp(-x), 1.0, DENSE) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        halfline_integral(lambda x: x, 0.0)
    assert halfline_cutoff(10.0) == pytest.approx(-math.log(1e-12) / 10)


def test_halfline_monotone_in_tolerance():
    f = lambda x: np.exp(-x)  # noqa: E731
    vals = [halfline_integral(f, 1.0, QuadratureConfig(4096, 64, tol)) for tol in (1e-6, 1e-9, 1e-12)]
    assert vals[0] <= vals[1] <= vals[2]


def test_halfline_cap_warns():
    cfg = QuadratureConfig(nodes_per_unit=64, max_halfline_nodes=128)
    with pytest.warns(TruncationWarning):
        halfline_integral(lambda x: np.exp(-1e-3 * x), 1e-3, cfg)


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(nodes_per_unit=4)
    with pytest.raises(DomainError):
        QuadratureConfig(min_nodes=8)
    with pytest.raises(DomainError):
        QuadratureConfig(halfline_envelope_tol=1e-3)


def test_tail_sum_examples():
    assert tail_sum(lambda k: 0.5 ** k) == pytest.approx(2.0, abs=1e-10)
    assert tail_sum(lambda k: 0.0) == 0.0
    p = count_probs(1.0, RegimeRates(10, 20))
    assert tail_sum(lambda k: p[k], SeriesControl(max_terms=p.size), warn=False) == pytest.approx(1.0, abs=1e-6)


def test_tail_sum_truncation_warning():
    with pytest.warns(TruncationWarning):
        tail_sum(lambda k: 1.0 / (k + 1), SeriesControl(max_terms=20))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tail_sum(lambda k: 1.0 / (k + 1), SeriesControl(max_terms=20), warn=False)
