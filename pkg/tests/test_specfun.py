import math

import numpy as np
import pytest
from scipy import integrate

from ios_noma.specfun import (Tolerance, bessel_i0, bessel_i1,
                              bessel_ratio_i1_i0, elliptic_e, elliptic_k)


def quad_k(m):
    val, _ = integrate.quad(lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2),
                            0.0, math.pi / 2, epsabs=1e-13, limit=200)
    return val


def quad_e(m):
    val, _ = integrate.quad(lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2),
                            0.0, math.pi / 2, epsabs=1e-13, limit=200)
    return val


def quad_i(x, order):
    val, _ = integrate.quad(lambda t: math.exp(x * math.cos(t)) * math.cos(order * t),
                            0.0, math.pi, epsabs=1e-13, limit=200)
    return val / math.pi


class TestElliptic:
    def test_endpoints(self):
        assert elliptic_k(0.0) == pytest.approx(math.pi / 2, abs=1e-12)
        assert elliptic_e(0.0) == pytest.approx(math.pi / 2, abs=1e-12)
        assert elliptic_e(1.0) == pytest.approx(1.0, abs=1e-12)

    def test_frozen_midpoint_values(self):
        # reference values from quadrature of the defining integrals
        assert elliptic_k(0.5) == pytest.approx(1.854074677301372, abs=1e-12)
        assert elliptic_e(0.5) == pytest.approx(1.350643881047676, abs=1e-12)

    @pytest.mark.parametrize("m", [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999999])
    def test_against_quadrature(self, m):
        assert elliptic_k(m) == pytest.approx(quad_k(m), abs=1e-10)
        assert elliptic_e(m) == pytest.approx(quad_e(m), abs=1e-10)

    def test_divergence_toward_one(self):
        assert elliptic_k(1.0 - 1e-12) > 14.0

    def test_monotone_on_grid(self):
        m = np.linspace(0.0, 1.0, 1001)[:-1]
        k = elliptic_k(m)
        e = elliptic_e(m)
        assert np.all(np.diff(k) > 0)
        assert np.all(np.diff(e) < 0)

    def test_legendre_relation(self):
        m = np.linspace(0.001, 0.999, 999)
        lhs = (elliptic_e(m) * elliptic_k(1 - m) + elliptic_e(1 - m) * elliptic_k(m)
               - elliptic_k(m) * elliptic_k(1 - m))
        assert np.max(np.abs(lhs - math.pi / 2)) < 1e-9

    def test_array_round_trip(self):
        m = np.array([[0.1, 0.2], [0.3, 0.4]])
        assert elliptic_k(m).shape == (2, 2)
        assert isinstance(elliptic_k(0.25), float)

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5])
    def test_k_domain(self, bad):
        with pytest.raises(ValueError):
            elliptic_k(bad)

    @pytest.mark.parametrize("bad", [-1e-9, 1.0 + 1e-9])
    def test_e_domain(self, bad):
        with pytest.raises(ValueError):
            elliptic_e(bad)


class TestBessel:
    def test_at_zero(self):
        assert bessel_i0(0.0) == pytest.approx(1.0, abs=1e-15)
        assert bessel_i1(0.0) == pytest.approx(0.0, abs=1e-15)

    def test_frozen_ratio(self):
        assert bessel_i1(2.0) / bessel_i0(2.0) == pytest.approx(
            0.697774657964008, rel=1e-10)

    @pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 14.9, 15.1, 30.0, 50.0])
    def test_against_quadrature(self, x):
        assert bessel_i0(x) == pytest.approx(quad_i(x, 0), rel=1e-10)
        assert bessel_i1(x) == pytest.approx(quad_i(x, 1), rel=1e-10)

    def test_ratio_bounded_and_increasing(self):
        xs = np.linspace(0.0, 50.0, 2000)
        ratios = np.array([bessel_ratio_i1_i0(x) for x in xs])
        assert np.all(ratios >= 0.0)
        assert np.all(ratios < 1.0)
        assert np.all(np.diff(ratios) > 0)

    def test_ratio_large_argument(self):
        assert bessel_ratio_i1_i0(200.0) > 0.997
        assert bessel_ratio_i1_i0(1000.0) < 1.0

    def test_domain_errors(self):
        for fn in (bessel_i0, bessel_i1, bessel_ratio_i1_i0):
            with pytest.raises(ValueError):
                fn(-1e-9)


class TestTolerance:
    def test_validation(self):
        with pytest.raises(ValueError):
            Tolerance(abs_tol=0.0)
        with pytest.raises(ValueError):
            Tolerance(max_iterations=0)

    def test_loose_tolerance_still_converges(self):
        tol = Tolerance(abs_tol=1e-6, max_iterations=6)
        assert elliptic_k(0.5, tol) == pytest.approx(1.854074677301372, abs=1e-6)
