import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from spherequal.errors import DomainError
from spherequal.special import (area_ratio, cap_measure, check_dimension, distance_constant,
                                log_beta, log_gamma, mean_distance, regularized_incomplete_beta)


def gamma_formula_mean_distance(d):
    # closed form of the distance integral, used here only as an oracle
    return math.exp(d * math.log(2) + 2 * math.lgamma((d + 1) / 2)
                    - 0.5 * math.log(math.pi) - math.lgamma(d + 0.5))


class TestLogGamma:
    def test_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), abs=1e-14)
        assert log_gamma(0.5) == pytest.approx(float(mpmath.log(mpmath.sqrt(mpmath.pi))), abs=1e-15)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)

    @given(st.floats(1e-3, 1e4))
    def test_against_mpmath(self, x):
        assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-13)


class TestLogBeta:
    @pytest.mark.parametrize("a,b", [(0.5, 1.0), (2.0, 3.5), (40.0, 0.5), (1e3, 1e3), (0.5, 5e5)])
    def test_against_mpmath(self, a, b):
        ref = float(mpmath.log(mpmath.beta(a, b)))
        assert log_beta(a, b) == pytest.approx(ref, rel=1e-13, abs=1e-12)


class TestIncompleteBeta:
    def test_endpoints(self):
        for a, b in [(0.5, 1.0), (3.0, 2.0), (0.5, 200.0)]:
            assert regularized_incomplete_beta(0.0, a, b) == 0.0
            assert regularized_incomplete_beta(1.0, a, b) == 1.0

    @pytest.mark.parametrize("z", [1e-8, 0.01, 0.25, 0.5, 0.81, 0.999])
    def test_sqrt_identity(self, z):
        assert regularized_incomplete_beta(z, 0.5, 1.0) == pytest.approx(math.sqrt(z), abs=1e-14)

    @pytest.mark.parametrize("z,a,b", [(-0.1, 1, 1), (1.1, 1, 1), (0.5, 0, 1), (0.5, 1, -2),
                                       (math.nan, 1, 1)])
    def test_domain(self, z, a, b):
        with pytest.raises(DomainError):
            regularized_incomplete_beta(z, a, b)

    def test_vectorised(self):
        z = np.linspace(0, 1, 11)
        got = regularized_incomplete_beta(z, 1.5, 2.5)
        assert got.shape == z.shape
        np.testing.assert_allclose(got, sc.betainc(1.5, 2.5, z), rtol=0, atol=1e-14)

    @settings(max_examples=200)
    @given(st.floats(0.0, 1.0), st.floats(0.05, 60.0), st.floats(0.05, 60.0))
    def test_against_scipy(self, z, a, b):
        assert regularized_incomplete_beta(z, a, b) == pytest.approx(sc.betainc(a, b, z), abs=2e-14)

    @pytest.mark.parametrize("z,a,b", [(0.3, 0.5, 0.5), (0.7, 2.5, 7.0), (0.05, 0.5, 400.0),
                                       (0.999, 30.0, 0.5)])
    def test_against_mpmath(self, z, a, b):
        ref = float(mpmath.betainc(a, b, 0, z, regularized=True))
        assert regularized_incomplete_beta(z, a, b) == pytest.approx(ref, abs=1e-14)

    def test_both_parameters_large(self):
        for a, b in [(59.0, 59.0), (15.0, 40.0), (200.0, 300.0)]:
            for z in np.linspace(0.02, 0.98, 25):
                ref = float(mpmath.betainc(a, b, 0, z, regularized=True))
                assert regularized_incomplete_beta(z, a, b) == pytest.approx(ref, abs=2e-14)
        # mpmath.betainc does not converge here; integrate the density at 40 digits
        a = b = 2500
        with mpmath.workdps(40):
            lb = mpmath.log(mpmath.beta(a, b))
            dens = lambda t: mpmath.exp((a - 1) * mpmath.log(t) + (b - 1) * mpmath.log(1 - t) - lb)
            for z in (0.47, 0.49, 0.495, 0.5, 0.505, 0.52):
                ref = 0.5 + mpmath.quad(dens, [0.5, z]) if z != 0.5 else mpmath.mpf(0.5)
                assert regularized_incomplete_beta(z, a, b) == pytest.approx(float(ref), abs=1e-14)

    @given(st.floats(0.0, 1.0), st.floats(15.0, 200.0), st.floats(15.0, 200.0))
    def test_large_parameters_against_scipy(self, z, a, b):
        assert regularized_incomplete_beta(z, a, b) == pytest.approx(sc.betainc(a, b, z), abs=3e-14)

    @pytest.mark.parametrize("b,tol", [(500.0, 1e-14), (5000.0, 5e-14), (5e5, 1e-11)])
    def test_large_parameter(self, b, tol):
        # the cap-measure regime of high dimensions: a = 1/2, b = d/2, small z
        for z in (1.0 / b, 4.0 / b, 16.0 / b):
            assert regularized_incomplete_beta(z, 0.5, b) == pytest.approx(
                sc.betainc(0.5, b, z), abs=tol)

    @given(st.floats(0.0, 1.0), st.floats(0.1, 20.0), st.floats(0.1, 20.0))
    def test_reflection(self, z, a, b):
        # make z and 1 - z both exact so the identity is meaningful in floating point
        z = 1.0 - (1.0 - z)
        lhs = regularized_incomplete_beta(z, a, b) + regularized_incomplete_beta(1.0 - z, b, a)
        assert lhs == pytest.approx(1.0, abs=5e-14)

    @given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
    def test_monotone(self, a, b):
        values = regularized_incomplete_beta(np.linspace(0, 1, 64), a, b)
        assert np.all(np.diff(values) >= -1e-15)
        assert np.all((values >= 0) & (values <= 1))


class TestConstants:
    def test_check_dimension(self):
        assert check_dimension(3) == 3
        for bad in (0, -1, 2.5, "2"):
            with pytest.raises(DomainError):
                check_dimension(bad)

    def test_area_ratio(self):
        assert area_ratio(2) == pytest.approx(0.5, abs=1e-15)
        assert area_ratio(1) == pytest.approx(1 / math.pi, abs=1e-15)
        # area_ratio(d) = d C_d
        for d in range(1, 40):
            assert area_ratio(d) == pytest.approx(d * distance_constant(d), rel=1e-14)

    def test_distance_constant(self):
        assert distance_constant(2) == pytest.approx(0.25, abs=1e-13)
        assert distance_constant(3) == pytest.approx(2 / (3 * math.pi), abs=1e-15)
        d = 10 ** 4
        assert 0.99 <= distance_constant(d) * math.sqrt(2 * math.pi * d) <= 1.01

    def test_distance_constant_large_d_continuity(self):
        # the switch to log-gamma must not introduce a jump
        for d in (298, 299, 300, 301):
            ref = mpmath.gamma((d + 1) / mpmath.mpf(2)) / (d * mpmath.sqrt(mpmath.pi)
                                                           * mpmath.gamma(d / mpmath.mpf(2)))
            assert distance_constant(d) == pytest.approx(float(ref), rel=1e-12)

    def test_distance_constant_as_zonal_integral(self):
        # C_d = (1/2) int |<p, z>| dsigma(z), by mpmath quadrature in the polar angle
        for d in (1, 2, 3, 5, 8):
            w = lambda s: mpmath.sin(s) ** (d - 1)
            norm = mpmath.quad(w, [0, mpmath.pi])
            ref = 0.5 * mpmath.quad(lambda s: abs(mpmath.cos(s)) * w(s),
                                    [0, mpmath.pi / 2, mpmath.pi]) / norm
            assert distance_constant(d) == pytest.approx(float(ref), rel=1e-12)


class TestCapMeasure:
    @pytest.mark.parametrize("d", [1, 2, 3, 7, 50])
    def test_endpoints(self, d):
        assert cap_measure(d, -1.0) == pytest.approx(1.0, abs=1e-15)
        assert cap_measure(d, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert cap_measure(d, 0.0) == pytest.approx(0.5, abs=1e-15)

    @given(st.floats(-1.0, 1.0))
    def test_d2_is_linear(self, t):
        assert cap_measure(2, t) == pytest.approx((1 - t) / 2, abs=1e-15)

    def test_d1_arc_length(self):
        t = np.linspace(-1, 1, 21)
        np.testing.assert_allclose(cap_measure(1, t), np.arccos(t) / math.pi, atol=1e-14)

    @given(st.integers(1, 30), st.floats(-1.0, 1.0))
    def test_symmetry(self, d, t):
        assert cap_measure(d, t) + cap_measure(d, -t) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("t", [-1.5, 1.0000001, math.nan])
    def test_domain(self, t):
        with pytest.raises(DomainError):
            cap_measure(2, t)


class TestMeanDistance:
    def test_known_values(self):
        assert mean_distance(2) == pytest.approx(4 / 3, abs=1e-14)
        assert mean_distance(1) == pytest.approx(4 / math.pi, abs=1e-14)

    @pytest.mark.parametrize("d", range(1, 17))
    def test_gamma_oracle(self, d):
        assert mean_distance(d) == pytest.approx(gamma_formula_mean_distance(d), rel=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_node_doubling(self, d):
        assert abs(mean_distance(d, 64) - mean_distance(d, 128)) < 1e-14

    def test_increases_towards_sqrt2(self):
        values = [mean_distance(d) for d in range(1, 30)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[-1] < math.sqrt(2)
