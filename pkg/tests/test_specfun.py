import math

import mpmath
import numpy as np
import pytest

from modbath.specfun import (ModulationParams, bessel_j, j0_zero,
                             jacobi_anger_order, phase)

# Frozen oracle values, computed with mpmath at 30 digits:
#   besseljzero(0, k) and besselj(1, z)
J0_ZERO_1 = 2.4048255576957728
J0_ZERO_5 = 14.930917708487786
J1_AT_ZERO_5 = 0.20654643307799826


class TestBesselJ:
    def test_series_identities_at_origin(self):
        assert bessel_j(0, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert bessel_j(1, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_vanishes_at_first_j0_zero(self):
        assert abs(bessel_j(0, 2.4048256)) < 1e-6

    def test_j1_magnitude_at_fifth_zero(self):
        assert bessel_j(1, J0_ZERO_5) == pytest.approx(J1_AT_ZERO_5, abs=1e-12)

    def test_against_mpmath_oracle(self):
        mpmath.mp.dps = 25
        for n in (0, 1, 2, 5, 17, 60):
            for x in (0.1, 1.0, 2.5, 14.93, 99.5, 450.0):
                expected = float(mpmath.besselj(n, x))
                assert bessel_j(n, x) == pytest.approx(expected, abs=1e-12)

    def test_reflection(self):
        n = np.arange(-50, 51)
        for x in (0.3, 7.7, 120.0):
            lhs = bessel_j(-n, x)
            rhs = (-1.0) ** n * bessel_j(n, x)
            assert np.max(np.abs(lhs - rhs)) < 1e-13

    def test_three_term_recurrence(self):
        x = np.linspace(0.5, 100.0, 57)
        for n in range(1, 51):
            resid = (bessel_j(n - 1, x) + bessel_j(n + 1, x)
                     - (2.0 * n / x) * bessel_j(n, x))
            assert np.max(np.abs(resid)) < 1e-10

    def test_range_errors(self):
        with pytest.raises(ValueError):
            bessel_j(201, 1.0)
        with pytest.raises(ValueError):
            bessel_j(0, 500.5)
        with pytest.raises(ValueError):
            bessel_j(0.5, 1.0)


class TestJ0Zero:
    def test_first_and_fifth_zero(self):
        assert j0_zero(1) == pytest.approx(J0_ZERO_1, abs=1e-10)
        assert j0_zero(5) == pytest.approx(J0_ZERO_5, abs=1e-10)

    def test_against_mpmath_oracle(self):
        mpmath.mp.dps = 25
        for k in (2, 3, 10, 25, 50):
            assert j0_zero(k) == pytest.approx(float(mpmath.besseljzero(0, k)),
                                               abs=1e-10)

    def test_residuals_all_k(self):
        for k in range(1, 51):
            assert abs(bessel_j(0, j0_zero(k))) < 1e-10

    def test_range_errors(self):
        with pytest.raises(ValueError):
            j0_zero(0)
        with pytest.raises(ValueError):
            j0_zero(51)


class TestJacobiAngerOrder:
    def test_m_zero(self):
        assert jacobi_anger_order(0.0, 1e-12) == 0

    def test_fifth_zero_index(self):
        n = jacobi_anger_order(J0_ZERO_5, 1e-10)
        assert 20 <= n <= 40

    def test_head_captures_weight(self):
        for m in (0.5, 3.0, 14.93):
            for tol in (1e-4, 1e-8):
                n = jacobi_anger_order(m, tol)
                l = np.arange(-n, n + 1)
                head = (bessel_j(l, m) ** 2).sum()
                # 1e-13 allowance: the head itself is summed in doubles
                assert head >= 1.0 - tol**2 - 1e-13

    def test_sum_rule_over_m_grid(self):
        for m in np.linspace(0.0, 20.0, 11):
            n = jacobi_anger_order(m, 1e-6)
            l = np.arange(-n, n + 1)
            assert abs((bessel_j(l, m) ** 2).sum() - 1.0) < 1e-10

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            jacobi_anger_order(-1.0, 1e-6)
        with pytest.raises(ValueError):
            jacobi_anger_order(1.0, 2.0)


class TestPhase:
    def test_values(self):
        mod = ModulationParams(m=2.0, nu=3.0)
        assert phase(mod, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert phase(mod, math.pi / 6.0) == pytest.approx(2.0, abs=1e-12)

    def test_periodicity(self):
        mod = ModulationParams(m=1.7, nu=4.0)
        t = np.linspace(0.0, 5.0, 100)
        assert np.allclose(phase(mod, t + mod.period), phase(mod, t), atol=1e-12)

    def test_jacobi_anger_identity(self):
        for m in (1.0, J0_ZERO_5):
            mod = ModulationParams(m=m, nu=2.0)
            n = jacobi_anger_order(m, 1e-9)
            l = np.arange(-n, n + 1)
            coef = bessel_j(l, m)
            t = np.linspace(0.0, mod.period, 1000, endpoint=False)
            lhs = np.exp(-1j * phase(mod, t))
            rhs = (coef[:, None] * np.exp(-1j * np.outer(l, mod.nu * t))).sum(axis=0)
            assert np.max(np.abs(lhs - rhs)) < 1e-8


class TestModulationParams:
    def test_suppression_flag(self):
        assert ModulationParams(m=j0_zero(1), nu=1.0).suppression_tuned
        assert not ModulationParams(m=2.0, nu=1.0).suppression_tuned
        assert not ModulationParams(m=0.0, nu=1.0).suppression_tuned

    def test_validation(self):
        with pytest.raises(ValueError):
            ModulationParams(m=-0.1, nu=1.0)
        with pytest.raises(ValueError):
            ModulationParams(m=1.0, nu=0.0)
        # nu is irrelevant without modulation
        ModulationParams(m=0.0, nu=0.0)
