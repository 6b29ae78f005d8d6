import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from slitcyl.special import (MAX_ORDER, BesselDomainError, bessel_j, bessel_y, cylinder_table,
                             deriv_h1, deriv_j, deriv_y, hankel1, hankel_rows)

mpmath.mp.dps = 30


def mp_j(n, x):
    return float(mpmath.besselj(n, x))


def mp_y(n, x):
    return float(mpmath.bessely(n, x))


class TestAgainstMpmath:
    @pytest.mark.parametrize("n", [-7, -1, 0, 1, 2, 5, 12, 35])
    @pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 4.7, 18.3, 60.0])
    def test_values(self, n, x):
        assert_allclose(bessel_j(n, x), mp_j(n, x), rtol=1e-12, atol=1e-300)
        assert_allclose(bessel_y(n, x), mp_y(n, x), rtol=1e-12)

    @pytest.mark.parametrize("n", [-3, 0, 4, 20])
    @pytest.mark.parametrize("x", [0.05, 2.0, 30.0])
    def test_derivatives(self, n, x):
        dj = float(mpmath.diff(lambda t: mpmath.besselj(n, t), x))
        dy = float(mpmath.diff(lambda t: mpmath.bessely(n, t), x))
        assert_allclose(deriv_j(n, x), dj, rtol=1e-11, atol=1e-300)
        assert_allclose(deriv_y(n, x), dy, rtol=1e-11)
        assert_allclose(deriv_h1(n, x), dj + 1j * dy, rtol=1e-11)

    def test_table_matches_pointwise(self):
        t = cylinder_table(40, 3.3)
        n = np.arange(-40, 41)
        assert_allclose(t.j, bessel_j(n, 3.3), rtol=1e-14, atol=1e-300)
        assert_allclose(t.y, bessel_y(n, 3.3), rtol=1e-14)
        assert_allclose(t.dh, deriv_h1(n, 3.3), rtol=1e-13)
        assert_allclose(t.h, hankel1(n, 3.3), rtol=1e-14)

    def test_hankel_rows(self):
        x = np.array([0.2, 1.7, 9.0])
        rows = hankel_rows(10, x)
        for i, xi in enumerate(x):
            assert_allclose(rows[i], cylinder_table(10, xi).h, rtol=1e-14)


class TestIdentities:
    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(-40, 40), x=st.floats(0.05, 80.0))
    def test_wronskian(self, n, x):
        w = bessel_j(n, x) * deriv_y(n, x) - deriv_j(n, x) * bessel_y(n, x)
        # cancellation grows with |Y_n|; bound the error by the product scale
        scale = abs(bessel_j(n, x) * deriv_y(n, x)) + abs(deriv_j(n, x) * bessel_y(n, x))
        assert abs(w - 2 / (math.pi * x)) <= 1e-12 * max(scale, 2 / (math.pi * x))

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(-30, 30), x=st.floats(0.1, 50.0))
    def test_three_term_recurrence(self, n, x):
        for f in (bessel_j, bessel_y):
            lhs = f(n - 1, x) + f(n + 1, x)
            rhs = 2 * n / x * f(n, x)
            scale = abs(f(n - 1, x)) + abs(f(n + 1, x)) + 1e-300
            assert abs(lhs - rhs) <= 1e-12 * scale

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(0, 50), x=st.floats(0.01, 60.0))
    def test_parity(self, n, x):
        s = (-1) ** n
        assert bessel_j(-n, x) == s * bessel_j(n, x)
        assert bessel_y(-n, x) == s * bessel_y(n, x)

    def test_small_argument_limits(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(3, 0.0) == 0.0
        assert_allclose(bessel_y(0, 1e-8), 2 / math.pi * (math.log(5e-9) + np.euler_gamma), rtol=1e-10)


class TestDomain:
    def test_negative_argument(self):
        with pytest.raises(BesselDomainError):
            bessel_j(0, -1.0)

    def test_zero_argument_for_y(self):
        with pytest.raises(BesselDomainError):
            bessel_y(1, 0.0)
        with pytest.raises(BesselDomainError):
            hankel1(0, 0.0)

    def test_order_limit(self):
        with pytest.raises(BesselDomainError):
            bessel_j(MAX_ORDER + 1, 1.0)

    def test_non_integer_order(self):
        with pytest.raises(BesselDomainError):
            bessel_j(0.5, 1.0)

    def test_non_finite(self):
        with pytest.raises(BesselDomainError):
            bessel_y(0, float("nan"))
