import math

import numpy as np
import pytest

from casimir.dielectric import C_LIGHT, HBAR, K_B
from casimir.matsubara import (
    ConvergenceError,
    MatsubaraGrid,
    QuadratureSpec,
    matsubara_frequency,
    thermal_sum,
    thermal_sum_info,
    zero_t_integral,
)


class TestFrequencies:
    def test_zeroth_is_zero(self):
        assert matsubara_frequency(300.0, 0) == 0.0

    def test_room_temperature_first_frequency(self):
        # oracle: 2 pi k_B T / hbar with the CODATA constants
        expected = 2.0 * math.pi * K_B * 300.0 / HBAR
        assert matsubara_frequency(300.0, 1) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(2.468e14, rel=1e-3)

    def test_linear_in_temperature(self):
        assert matsubara_frequency(600.0, 7) == 2.0 * matsubara_frequency(300.0, 7)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            matsubara_frequency(0.0, 1)
        with pytest.raises(ValueError):
            matsubara_frequency(300.0, -1)

    def test_grid(self):
        grid = MatsubaraGrid(T=300.0, m_max=5)
        xs = grid.xi
        assert xs[0] == 0.0
        assert np.all(np.diff(xs) > 0)
        assert xs[3] == pytest.approx(3 * matsubara_frequency(300.0, 1))
        with pytest.raises(ValueError):
            MatsubaraGrid(T=300.0, m_max=0)


class TestThermalSum:
    def test_zero_function(self):
        assert thermal_sum(lambda xi: 0.0, 300.0) == 0.0

    def test_geometric_closed_form(self):
        # oracle: f = exp(-xi/xi1) sums to k_B T (1/2 + q/(1-q)),
        # q = exp(-2 pi k_B T / (hbar xi1))
        T, xi1 = 300.0, 5e14
        q = math.exp(-2.0 * math.pi * K_B * T / (HBAR * xi1))
        expected = K_B * T * (0.5 + q / (1.0 - q))
        got = thermal_sum(lambda xi: np.exp(-xi / xi1), T)
        assert got == pytest.approx(expected, rel=1e-10)

    def test_nonfinite_zero_term_rejected(self):
        with pytest.raises(ValueError):
            thermal_sum(lambda xi: math.inf if xi == 0.0 else 1.0, 300.0)

    def test_tail_estimate_bounds_true_remainder(self):
        # geometric decay: the reported tail must dominate the true remainder
        T, xi1 = 300.0, 3e14
        q = math.exp(-2.0 * math.pi * K_B * T / (HBAR * xi1))
        info = thermal_sum_info(lambda xi: np.exp(-xi / xi1), T)
        true_remainder = K_B * T * (q ** (info.terms + 1)) / (1.0 - q)
        assert info.tail >= true_remainder * (1.0 - 1e-12)

    def test_determinism(self):
        f = lambda xi: np.exp(-xi / 4.2e14) * np.cos(xi / 9e14) ** 2
        a = thermal_sum(f, 115.0)
        b = thermal_sum(f, 115.0)
        assert a == b


class TestZeroTIntegral:
    def test_zero_function(self):
        assert zero_t_integral(lambda xi: 0.0) == 0.0

    def test_exponential_integrand(self):
        # oracle: hbar/(2 pi) * c/(2L) for f = exp(-2 xi L / c)
        L = 1e-6
        expected = HBAR * C_LIGHT / (4.0 * math.pi * L)
        got = zero_t_integral(lambda xi: math.exp(-2.0 * xi * L / C_LIGHT),
                              scale=C_LIGHT / (2 * L))
        assert got == pytest.approx(expected, rel=1e-10)

    def test_scale_invariance(self):
        L = 3e-7
        f = lambda xi: math.exp(-2.0 * xi * L / C_LIGHT)
        a = zero_t_integral(f, scale=C_LIGHT / (2 * L))
        b = zero_t_integral(f, scale=C_LIGHT / L)
        assert a == pytest.approx(b, rel=1e-9)


class TestTContinuity:
    def test_thermal_sum_approaches_integral_monotonically(self):
        # fixed exponentially decaying integrand; T-sequence 10, 1, 0.1 mK
        xi1 = 1e12
        f = lambda xi: np.exp(-xi / xi1)
        reference = zero_t_integral(f, scale=xi1)
        errors = []
        for T in (1e-2, 1e-3, 1e-4):
            errors.append(abs(thermal_sum(f, T) - reference) / abs(reference))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-6


class TestQuadratureSpec:
    def test_tolerance_window(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.5)
        spec = QuadratureSpec(rel_tol=1e-2)
        assert spec.rel_tol == 1e-2

    def test_convergence_error_carries_partial(self):
        # an integrand that decays too slowly for the subdivision budget
        spec = QuadratureSpec(rel_tol=1e-10, max_subdivisions=3)
        with pytest.raises(ConvergenceError) as err:
            zero_t_integral(lambda xi: 1.0 / (1.0 + xi) ** 1.02, spec)
        assert math.isfinite(err.value.partial) or math.isnan(err.value.partial)
