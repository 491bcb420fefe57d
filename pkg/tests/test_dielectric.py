import io
import math

import numpy as np
import pytest

from casimir.dielectric import (
    C_LIGHT,
    CODATA2018,
    Drude,
    Perfect,
    Plasma,
    Tabulated,
    TabulatedParseError,
    TransverseMode,
    fresnel,
    gold_drude,
    gold_plasma,
    load_tabulated,
    permittivity,
    static_fresnel,
)


def test_constants_are_codata_2018():
    assert CODATA2018.hbar == 1.054571817e-34
    assert CODATA2018.c == 299792458.0
    assert CODATA2018.k_B == 1.380649e-23


class TestPermittivity:
    def test_plasma_at_its_own_frequency_is_two(self):
        wp = 3.7e15
        assert permittivity(Plasma(wp), wp) == pytest.approx(2.0, rel=1e-15)

    def test_drude_below_plasma_everywhere(self):
        wp = 1.4e16
        pl, dr = Plasma(wp), Drude(wp, gamma=wp / 100)
        for xi in np.geomspace(1e10, 1e18, 40):
            assert permittivity(dr, xi) < permittivity(pl, xi)

    def test_gold_plasma_frequency_matches_wavelength(self):
        # oracle: direct arithmetic 2 pi c / lambda_p
        expected = 2.0 * math.pi * C_LIGHT / 137e-9
        assert gold_plasma().omega_p == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.375e16, rel=2e-3)

    def test_drude_divergence_at_zero_is_an_error(self):
        with pytest.raises(ValueError):
            permittivity(gold_drude(), 0.0)
        with pytest.raises(ValueError):
            permittivity(gold_drude(), -1.0)

    def test_perfect_returns_sentinel(self):
        assert math.isinf(permittivity(Perfect(), 1e15))

    def test_variant_validation(self):
        with pytest.raises(ValueError):
            Plasma(omega_p=-1.0)
        with pytest.raises(ValueError):
            Drude(omega_p=1e16, gamma=0.0)


class TestFresnel:
    def test_perfect_mirror_amplitudes(self):
        for xi in (0.0, 1e13, 1e16):
            for k in (0.0, 1e5, 1e8):
                assert fresnel(Perfect(), xi, k) == (-1.0, 1.0)

    def test_normal_incidence_degeneracy(self):
        for model in (gold_plasma(), gold_drude(), Plasma(3e15)):
            for xi in (1e14, 1e15, 1e16):
                r_te, r_tm = fresnel(model, xi, 0.0)
                eps = permittivity(model, xi)
                expected = (math.sqrt(eps) - 1.0) / (math.sqrt(eps) + 1.0)
                assert r_tm == pytest.approx(expected, rel=1e-12)
                assert r_te == pytest.approx(-expected, rel=1e-12)

    def test_plasma_low_frequency_tm_limit(self):
        # oracle: series of (sqrt(eps)-1)/(sqrt(eps)+1) with eps ~ wp^2/xi^2,
        # giving r_TM = 1 - 2 xi/wp + O((xi/wp)^2)
        wp = gold_plasma().omega_p
        for ratio in (1e-3, 1e-4, 1e-5):
            xi = ratio * wp
            _, r_tm = fresnel(gold_plasma(), xi, 0.0)
            assert abs(r_tm - (1.0 - 2.0 * xi / wp)) < 5.0 * ratio**2

    def test_passivity_random_samples(self):
        rng = np.random.default_rng(20260810)
        models = [Perfect(), gold_plasma(), gold_drude(),
                  Plasma(5e15), Drude(5e15, 5e13)]
        n = 10_000
        xi = 10.0 ** rng.uniform(10, 18, n)
        k = 10.0 ** rng.uniform(2, 9, n)
        pick = rng.integers(0, len(models), n)
        for i in range(n):
            r_te, r_tm = fresnel(models[pick[i]], xi[i], k[i])
            assert abs(r_te) <= 1.0 + 1e-12
            assert abs(r_tm) <= 1.0 + 1e-12

    def test_high_frequency_transparency(self):
        table = Tabulated(np.array([1e14, 1e16]), np.array([4.0, 1.5]))
        for model in (gold_plasma(), gold_drude(), table):
            wp = getattr(model, "omega_p", 0.0) or 1.4e16
            r_te, r_tm = fresnel(model, 1e3 * wp, 1e6)
            assert abs(r_te) < 1e-3 and abs(r_tm) < 1e-3

    def test_perfect_mirror_limit_of_plasma(self):
        for xi in (1e13, 1e15):
            for k in (0.0, 1e7):
                r_te, r_tm = fresnel(Plasma(1e25), xi, k)
                assert r_te == pytest.approx(-1.0, abs=1e-8)
                assert r_tm == pytest.approx(1.0, abs=1e-8)

    def test_static_branch_per_model(self):
        k = 3e6
        assert static_fresnel(Drude(1e16, 1e14), k) == (0.0, 1.0)
        r_te, r_tm = static_fresnel(gold_plasma(), k)
        kp = gold_plasma().omega_p / C_LIGHT
        assert r_tm == 1.0
        assert r_te == pytest.approx((k - math.hypot(k, kp)) / (k + math.hypot(k, kp)))
        # pure interband: finite static dielectric response
        table = Tabulated(np.array([1e14, 1e16]), np.array([4.0, 1.5]))
        r_te0, r_tm0 = static_fresnel(table, k)
        assert r_te0 == 0.0
        assert r_tm0 == pytest.approx((4.0 - 1.0) / (4.0 + 1.0))


class TestTransverseMode:
    def test_kappa_dominates_both_scales(self):
        mode = TransverseMode(k=2e6, polarization="TE")
        xi = 3e15
        kappa = mode.kappa(xi)
        assert kappa >= mode.k and kappa >= xi / C_LIGHT
        assert kappa == pytest.approx(math.hypot(2e6, xi / C_LIGHT))

    def test_validation(self):
        with pytest.raises(ValueError):
            TransverseMode(k=-1.0, polarization="TE")
        with pytest.raises(ValueError):
            TransverseMode(k=1.0, polarization="TEM")


class TestTabulated:
    def make(self):
        text = """
        # xi_rad_per_s   epsilon_hat
        1.0e14   5.0
        4.0e14   2.0
        """
        return load_tabulated(text)

    def test_nodes_reproduce(self):
        model = self.make()
        assert permittivity(model, 1.0e14) == pytest.approx(5.0, rel=1e-12)
        assert permittivity(model, 4.0e14) == pytest.approx(2.0, rel=1e-12)

    def test_clamped_to_one_beyond_last_node(self):
        assert permittivity(self.make(), 1e16) == 1.0

    def test_geometric_midpoint_interpolation(self):
        # oracle: log-log linear interpolation evaluated by hand at the
        # geometric midpoint sqrt(xi1 xi2) -> sqrt(5 * 2)
        model = self.make()
        mid = math.sqrt(1.0e14 * 4.0e14)
        assert permittivity(model, mid) == pytest.approx(math.sqrt(10.0), rel=1e-12)

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(TabulatedParseError) as err:
            load_tabulated("1e14 5.0\n2e14 bad\n")
        assert err.value.line == 2
        with pytest.raises(TabulatedParseError) as err:
            load_tabulated("1e14 5.0\n0.5e14 4.0\n")
        assert err.value.line == 2
        with pytest.raises(TabulatedParseError) as err:
            load_tabulated("1e14 0.5\n")
        assert err.value.line == 1
        with pytest.raises(TabulatedParseError):
            load_tabulated("# only comments\n")

    def test_byte_stream_input(self):
        model = load_tabulated(io.BytesIO(b"1e14 3.0\n2e14 2.0\n"))
        assert permittivity(model, 1e14) == pytest.approx(3.0, rel=1e-12)

    def test_monotone_decreasing_in_xi(self):
        model = self.make()
        xs = np.geomspace(5e13, 1e16, 50)
        eps = np.array([permittivity(model, x) for x in xs])
        assert np.all(np.diff(eps) <= 1e-12)
        assert np.all(eps >= 1.0)
