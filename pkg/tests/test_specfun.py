import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from switchtemp.errors import DomainError, NonConvergence
from switchtemp.specfun import (SeriesControl, kummer_m, log_lower_incomplete_gamma, log_pochhammer,
                                lower_incomplete_gamma, pochhammer)


def test_pochhammer_values():
    assert pochhammer(3.0, 0) == 1.0
    assert pochhammer(3.0, 4) == 3 * 4 * 5 * 6
    assert pochhammer(0.5, 2) == pytest.approx(0.75)
    assert log_pochhammer(2.0, 5) == pytest.approx(math.log(720.0))


def test_kummer_trivial_cases():
    assert kummer_m(1.3, 2.7, 0.0) == 1.0
    assert kummer_m(2.0, 2.0, 1.5) == pytest.approx(math.exp(1.5), rel=1e-13)
    # M(1, 2, z) = (e^z - 1) / z
    assert kummer_m(1.0, 2.0, 0.7) == pytest.approx(math.expm1(0.7) / 0.7, rel=1e-13)


@pytest.mark.parametrize("a,b,z", [(1, 3, 2.5), (4, 7, 10.0), (10, 21, 50.0), (0.5, 1.5, -3.0)])
def test_kummer_matches_scipy(a, b, z):
    assert kummer_m(a, b, z) == pytest.approx(special.hyp1f1(a, b, z), rel=1e-11)


def test_kummer_vectorised_and_terms():
    z = np.linspace(0, 20, 11)
    np.testing.assert_allclose(kummer_m(3, 5, z), special.hyp1f1(3, 5, z), rtol=1e-11)
    val, n = kummer_m(2, 3, 1.0, return_terms=True)
    assert n > 1 and val == pytest.approx(special.hyp1f1(2, 3, 1.0))


def test_kummer_nonconvergence():
    with pytest.raises(NonConvergence):
        kummer_m(1, 2, 500.0, SeriesControl(max_terms=10))


@pytest.mark.parametrize("a,z", [(0.5, 0.1), (1, 1), (5, 2), (5, 20), (40, 10), (40, 60), (3.3, 100)])
def test_lower_gamma_matches_scipy(a, z):
    ref = special.gammainc(a, z) * special.gamma(a)
    assert lower_incomplete_gamma(a, z) == pytest.approx(ref, rel=1e-12)


def test_lower_gamma_edges():
    assert lower_incomplete_gamma(2.0, 0.0) == 0.0
    assert log_lower_incomplete_gamma(2.0, 0.0) == -math.inf
    # gamma(1, z) = 1 - e^{-z}
    assert lower_incomplete_gamma(1.0, 0.3) == pytest.approx(-math.expm1(-0.3), rel=1e-14)
    with pytest.raises(DomainError):
        lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        lower_incomplete_gamma(1.0, -1.0)


def test_series_control_validation():
    with pytest.raises(DomainError):
        SeriesControl(max_terms=0)
    with pytest.raises(DomainError):
        SeriesControl(rel_tol=0)


@given(st.floats(0.1, 20), st.floats(0.2, 30), st.floats(-5, 30))
def test_kummer_contiguous_relation(a, b, z):
    # b(b-1) M(a,b-1) + b(1-b-z) M(a,b) + z(b-a) M(a,b+1) = 0, checked for b > 1
    b = b + 1.0
    lhs = b * (b - 1) * kummer_m(a, b - 1, z) + b * (1 - b - z) * kummer_m(a, b, z) \
        + z * (b - a) * kummer_m(a, b + 1, z)
    scale = abs(b * (b - 1) * kummer_m(a, b - 1, z)) + abs(b * (1 - b - z) * kummer_m(a, b, z)) + 1.0
    assert abs(lhs) <= 1e-9 * scale
