import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xmesh.physics import (ICE_WATER, MaterialProperties, RegularizationParams, conductivity,
                           dimensionless_groups, internal_energy, regularized_laws, step_regularized)

T0 = ICE_WATER.T0


class TestSharpLaws:
    def test_energy_at_transition_is_solid(self):
        assert internal_energy(T0, ICE_WATER) == pytest.approx(2090 * 273.15, rel=1e-15)

    def test_latent_jump(self):
        eps = 1e-9 * T0
        jump = internal_energy(T0 + eps, ICE_WATER) - internal_energy(T0, ICE_WATER)
        assert jump == pytest.approx(3.3e5, rel=1e-6)

    def test_l_bar_identity(self):
        p = ICE_WATER
        assert (p.c_l - p.c_s) * p.T0 + p.l_bar == pytest.approx(p.l, rel=1e-9)

    def test_single_material_is_linear(self):
        p = MaterialProperties(c_s=3000.0, c_l=3000.0, l=0.0)
        T = np.linspace(250, 300, 11)
        assert np.allclose(internal_energy(T, p), 3000.0 * T, rtol=1e-15)

    @pytest.mark.parametrize("T,k", [(263.0, 2.1), (293.0, 0.6), (T0, 2.1)])
    def test_conductivity(self, T, k):
        assert conductivity(T, ICE_WATER) == k

    def test_equal_conductivities(self):
        p = MaterialProperties(k_s=1.0, k_l=1.0)
        assert np.all(conductivity(np.linspace(260, 290, 7), p) == 1.0)

    @pytest.mark.parametrize("name", ["rho", "c_s", "c_l", "k_s", "k_l"])
    def test_positive_properties(self, name):
        with pytest.raises(ValueError):
            MaterialProperties(**{name: 0.0})

    def test_negative_latent_heat(self):
        with pytest.raises(ValueError):
            MaterialProperties(l=-1.0)


class TestRamp:
    def test_midpoint_and_foot(self):
        assert step_regularized(T0, T0, 8.0) == 0.5
        assert step_regularized(T0 - 4.0, T0, 8.0) == 0.0
        assert step_regularized(275.15, 273.15, 8.0) == pytest.approx(0.75, abs=1e-14)

    def test_bad_delta(self):
        with pytest.raises(ValueError):
            step_regularized(T0, T0, 0.0)
        with pytest.raises(ValueError):
            RegularizationParams(-1.0)

    @given(st.floats(0.01, 50.0), st.lists(st.floats(200.0, 350.0), min_size=2, max_size=20))
    def test_monotone_bounded(self, delta, temps):
        T = np.sort(np.array(temps))
        H = step_regularized(T, T0, delta)
        assert np.all((H >= 0) & (H <= 1))
        assert np.all(np.diff(H) >= 0)


class TestRegularized:
    reg = RegularizationParams(8.0)

    def test_below_band(self):
        e, k, de, dk = regularized_laws(260.0, ICE_WATER, self.reg)
        assert e == pytest.approx(ICE_WATER.c_s * 260.0)
        assert de == ICE_WATER.c_s
        assert k == ICE_WATER.k_s and dk == 0.0

    def test_above_band(self):
        _, k, de, dk = regularized_laws(290.0, ICE_WATER, self.reg)
        assert de == ICE_WATER.c_l
        assert k == ICE_WATER.k_l and dk == 0.0

    @settings(max_examples=50)
    @given(st.floats(-3.9, 3.9))
    def test_derivatives_match_fd(self, offset):
        T = T0 + offset
        h = 1e-4
        e_p, k_p, _, _ = regularized_laws(T + h, ICE_WATER, self.reg)
        e_m, k_m, _, _ = regularized_laws(T - h, ICE_WATER, self.reg)
        _, _, de, dk = regularized_laws(T, ICE_WATER, self.reg)
        assert de == pytest.approx((e_p - e_m) / (2 * h), rel=1e-6)
        assert dk == pytest.approx((k_p - k_m) / (2 * h), rel=1e-6)

    def test_band_end_uses_inside_slope(self):
        _, _, de, _ = regularized_laws(T0 + 4.0, ICE_WATER, self.reg)
        assert de > ICE_WATER.c_l

    @pytest.mark.parametrize("T", [250.0, 270.0, 273.0, 273.3, 280.0, 300.0])
    def test_sharp_limit(self, T):
        tiny = RegularizationParams(1e-6)
        e, k, _, _ = regularized_laws(T, ICE_WATER, tiny)
        assert e == pytest.approx(internal_energy(T, ICE_WATER), rel=1e-12)
        assert k == conductivity(T, ICE_WATER)


class TestGroups:
    def test_table_values(self):
        g = dimensionless_groups(ICE_WATER, 293.0)
        assert g.kappa == pytest.approx(3.5)
        assert g.alpha == pytest.approx((2.1 / 2090) / (0.6 / 4185), rel=1e-12)
        assert g.alpha == pytest.approx(7.0084, abs=5e-5)
        assert g.gamma == pytest.approx(3.3e5 / (4185 * 19.85), rel=1e-12)
        assert g.gamma == pytest.approx(3.972, abs=5e-4)

    def test_reference_time(self):
        g = dimensionless_groups(ICE_WATER, 293.0, L_r=0.1)
        assert g.t_r == pytest.approx(0.01 / ICE_WATER.alpha_l)

    def test_no_latent_heat(self):
        assert dimensionless_groups(ICE_WATER.with_latent_heat(0.0), 293.0).gamma == 0.0

    def test_undefined_gamma(self):
        with pytest.raises(ValueError):
            dimensionless_groups(ICE_WATER, T0)
