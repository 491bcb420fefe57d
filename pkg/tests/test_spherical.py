import math

import numpy as np
import pytest
from scipy import integrate, special

from casimir.dielectric import C_LIGHT, Perfect, Plasma, gold_plasma
from casimir.planesphere import mie_coefficients
from casimir.spherical import (
    angular_logs,
    legendre_hat_logs,
    mie_signed_logs,
    riccati_chi_logs,
    riccati_psi_logs,
)


class TestRiccatiBessel:
    @pytest.mark.parametrize("x", [1e-2, 0.5, 3.0, 25.0, 120.0])
    def test_against_scipy(self, x):
        lmax = 40
        lp, _ = riccati_psi_logs(lmax, x)
        lc, _ = riccati_chi_logs(lmax, x)
        ells = np.arange(lmax + 1)
        with np.errstate(over="ignore"):
            i_ref = special.spherical_in(ells, x)
            k_ref = special.spherical_kn(ells, x)
        ok = np.isfinite(np.log(i_ref)) & np.isfinite(np.log(k_ref))
        assert np.max(np.abs(lp[ok] - (np.log(i_ref[ok]) + math.log(x)))) < 1e-12
        assert np.max(np.abs(lc[ok] - (np.log(k_ref[ok])
                                       + math.log(2 * x / math.pi)))) < 1e-12

    @pytest.mark.parametrize("x", [1e-3, 1.0, 1e2, 1e3, 1e4])
    def test_wronskian_identity(self, x):
        # psi' chi - psi chi' = 1 exactly, at any order and argument
        lp, ldp = riccati_psi_logs(70, x)
        lc, ldc = riccati_chi_logs(70, x)
        w = np.exp(ldp + lc) + np.exp(lp + ldc)
        assert np.max(np.abs(w - 1.0)) < 1e-10


class TestMieCoefficients:
    def test_perfect_dipole_against_closed_forms(self):
        # oracle: the l = 1 radial functions in elementary closed form,
        # psi_1 = cosh y - sinh y / y, chi_1 = e^-y (1 + 1/y), implemented
        # here independently of the recurrence code
        R = 1e-6
        for y in (1e-2, 0.3, 2.0):
            xi = y * C_LIGHT / R
            psi = math.cosh(y) - math.sinh(y) / y
            dpsi = math.sinh(y) - math.cosh(y) / y + math.sinh(y) / y**2
            chi = math.exp(-y) * (1.0 + 1.0 / y)
            dchi = -math.exp(-y) * (1.0 + 1.0 / y + 1.0 / y**2)
            a1, b1 = mie_coefficients(Perfect(), R, xi, 1)
            assert a1 == pytest.approx(-dpsi / dchi, rel=1e-9)
            assert b1 == pytest.approx(-psi / chi, rel=1e-9)

    def test_perfect_small_size_leading_order(self):
        # oracle: small-argument series, a_1 -> (2/3) y^3, b_1 -> -(1/3) y^3
        # with O(y^2) relative corrections
        R = 1e-6
        y = 1e-3
        xi = y * C_LIGHT / R
        a1, b1 = mie_coefficients(Perfect(), R, xi, 1)
        assert a1 == pytest.approx(2.0 / 3.0 * y**3, rel=5e-6)
        assert b1 == pytest.approx(-y**3 / 3.0, rel=5e-6)

    def test_small_sphere_limit_vanishes(self):
        xi = 1e15
        prev = None
        for R in (1e-7, 1e-8, 1e-9):
            a, b = mie_coefficients(Perfect(), R, xi, 1)
            size = abs(a) + abs(b)
            if prev is not None:
                assert size < prev * 1e-2
            prev = size

    def test_plasma_converges_to_perfect(self):
        R = 1e-6
        for y in (0.1, 1.0, 10.0):
            xi = y * C_LIGHT / R
            for ell in (1, 3, 7):
                ap, bp = mie_coefficients(Perfect(), R, xi, ell)
                a, b = mie_coefficients(Plasma(omega_p=1e24), R, xi, ell)
                assert a == pytest.approx(ap, rel=1e-6)
                assert b == pytest.approx(bp, rel=1e-6)

    def test_material_amplitudes_bounded_by_perfect(self):
        R = 2e-7
        gold = gold_plasma()
        for y in (0.2, 1.0, 5.0):
            xi = y * C_LIGHT / R
            for ell in (1, 2, 5):
                ap, bp = mie_coefficients(Perfect(), R, xi, ell)
                a, b = mie_coefficients(gold, R, xi, ell)
                assert 0 < a <= ap * (1 + 1e-12)
                assert 0 > b >= bp * (1 + 1e-12)

    def test_extreme_size_parameter_stays_finite(self):
        # the log-scaled recurrences must survive up to y = 1e4
        ln_a, ln_b = mie_signed_logs(Perfect(), 1.0, 1e4 * C_LIGHT, 70)
        assert np.all(np.isfinite(ln_a[1:]))
        assert np.all(np.isfinite(ln_b[1:]))


class TestHyperbolicLegendre:
    def test_against_polynomial_evaluation(self):
        from numpy.polynomial import legendre as npleg
        x0 = 1.7
        for m in (0, 1, 2):
            logs = legendre_hat_logs(m, 6, np.array([x0]))
            for ell in range(max(1, m), 7):
                c = np.zeros(ell + 1)
                c[ell] = 1.0
                deriv = npleg.legder(c, m) if m else c
                val = (x0**2 - 1.0) ** (m / 2.0) * npleg.legval(x0, deriv)
                assert logs[ell][0] == pytest.approx(math.log(val), abs=1e-12)

    def test_weyl_expansion_identity(self):
        # k_l(K r) P_l^m(cos t) = (-1)^m (pi/2K) int (k dk/kappa)
        #   Phat_l^m(kappa/K) J_m(k rho) e^{-kappa z}   for z > 0:
        # the plane-wave content of an outgoing multipole, the identity the
        # round-trip translation integrals are built on.
        K, rho, z = 1.3, 0.8, 1.1
        r = math.hypot(rho, z)
        costh = z / r
        for (ell, m) in [(1, 0), (1, 1), (2, 1), (3, 2), (5, 4)]:
            lhs = special.spherical_kn(ell, K * r) * special.lpmv(m, ell, costh)

            def f(k):
                kappa = math.hypot(k, K)
                lnP = legendre_hat_logs(m, ell, np.array([kappa / K]))[ell][0]
                return (k / kappa * math.exp(lnP) * special.jv(m, k * rho)
                        * math.exp(-kappa * z))

            val, _ = integrate.quad(f, 0, np.inf, limit=400, epsrel=1e-11)
            rhs = (-1) ** m * (math.pi / (2.0 * K)) * val
            assert rhs == pytest.approx(lhs, rel=1e-9)

    def test_angular_functions_positive_and_consistent(self):
        ch = np.array([1.001, 1.5, 40.0])
        ln_p, ln_t = angular_logs(2, 10, ch)
        sh = np.sqrt(ch**2 - 1.0)
        # direct evaluation at l = 2, m = 2: Phat = 3 sh^2,
        # p = 2 N sh, t = N * (2 ch Phat)/sh = 6 N ch sh
        N = math.sqrt(5.0 * math.factorial(0) / (4 * math.pi * math.factorial(4)))
        assert np.allclose(np.exp(ln_p[2]), 2 * N * 3 * sh, rtol=1e-12)
        assert np.allclose(np.exp(ln_t[2]), 6 * N * ch * sh, rtol=1e-12)
        assert np.all(ln_p[2:] > -np.inf)
