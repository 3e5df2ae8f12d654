import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noneqcp.errors import DomainError, PoleError, TabulationError
from noneqcp.materials import (
    GOLD, DrudeMetal, LayerStack, TabulatedDielectric, data_path, drude_permittivity, fresnel,
    fresnel_interface_r, fresnel_interface_t, kappa, load_sapphire, multilayer_t_str, tir_angle,
)
from noneqcp.spectral import omega_sp
from noneqcp.units import c

# mpmath reference values (tests/oracles/generate.py)
EPS_GOLD_2_4E15 = complex(-31.442765191742421, 0.71880137401018387)
RTM_GOLD_09WSP_K12 = complex(-3.6651919945802282, 0.047735630451843958)
THETA_T_24_6 = 34.599031178755034
THETA_T_21_0 = 34.673347737314466
T_STR_E_SQ_07DEG = 617.61334161672264  # oracle uses the Sellmeier formula, the library its linear table


class TestDrude:
    def test_zero_at_plasma_frequency(self):
        m = GOLD.lossless()
        assert abs(drude_permittivity(m.plasma_frequency, m)) < 1e-15

    def test_minus_one_at_surface_plasmon(self):
        m = GOLD.lossless()
        assert drude_permittivity(m.surface_plasmon_frequency, m) == pytest.approx(-1, rel=1e-14)

    def test_gold_regression(self):
        assert drude_permittivity(2.4e15, GOLD) == pytest.approx(EPS_GOLD_2_4E15, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            drude_permittivity(0.0, GOLD)

    def test_derived_scales(self):
        assert GOLD.surface_plasmon_frequency == pytest.approx(GOLD.plasma_frequency / math.sqrt(2))
        assert GOLD.plasma_wavelength == pytest.approx(137.76e-9, rel=1e-3)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            DrudeMetal(-1.0)
        with pytest.raises(DomainError):
            DrudeMetal(1e16, -1.0)

    @given(st.floats(1e12, 1e17))
    def test_passivity(self, w):
        assert drude_permittivity(w, GOLD).imag > 0


class TestKappa:
    w = 2.4e15

    def test_evanescent(self):
        k = kappa(self.w, 2 * self.w / c)
        assert k.imag == 0 and k.real == pytest.approx(math.sqrt(3) * self.w / c)

    def test_normal_incidence(self):
        assert kappa(self.w, 0.0) == pytest.approx(-1j * self.w / c)

    def test_light_line(self):
        assert abs(kappa(self.w, self.w / c)) < 1e-6 * self.w / c

    @given(st.floats(0.0, 0.999), st.floats(1.001, 50.0))
    def test_branch_consistency(self, below, above):
        k_in = kappa(self.w, below * self.w / c)
        k_out = kappa(self.w, above * self.w / c)
        assert k_in.real == 0 and k_in.imag < 0
        assert k_out.imag == 0 and k_out.real > 0

    @given(st.floats(0.0, 20.0), st.floats(-50, 50), st.floats(0, 10))
    def test_branch_complex_eps(self, kk, re, im):
        q = kappa(self.w, kk * self.w / c, complex(re, im))
        assert q.real >= 0
        if q.real == 0:
            assert q.imag <= 0


class TestFresnel:
    w = 2.4e15

    def test_no_interface(self):
        for pol in ("TE", "TM"):
            assert fresnel(self.w, 0.7 * self.w / c, 1.0, pol) == 0

    def test_electrostatic_limit(self):
        eps = drude_permittivity(self.w, GOLD)
        r = fresnel(self.w, 1e3 * self.w / c, eps, "TM")
        assert r == pytest.approx((eps - 1) / (eps + 1), rel=1e-4)

    def test_near_plasmon_pole_regression(self):
        w = 0.9 * GOLD.surface_plasmon_frequency
        r = fresnel(w, 1.2 * w / c, drude_permittivity(w, GOLD), "TM")
        assert abs(r) > 1
        assert r == pytest.approx(RTM_GOLD_09WSP_K12, rel=1e-12)

    def test_lossless_pole_signalled(self):
        m = GOLD.lossless()
        k = 3 * m.plasma_frequency / c
        w = omega_sp(k, m.plasma_frequency)
        with pytest.raises(PoleError):
            fresnel(w, k, drude_permittivity(w, m), "TM")

    def test_pole_locus_matches_dispersion(self):
        m = GOLD.lossless()
        for k in np.linspace(0.05, 5, 50) * m.plasma_frequency / c:
            w = omega_sp(k, m.plasma_frequency)
            eps = 1 - m.plasma_frequency**2 / w**2
            den = eps * kappa(w, k) + kappa(w, k, eps)
            assert abs(den) / k < 1e-8

    def test_bad_polarization(self):
        with pytest.raises(ValueError):
            fresnel(self.w, 0.0, 2.0, "XY")


class TestInterfaceTransmission:
    w = 2.4e15

    def test_identity(self):
        assert fresnel_interface_t(self.w, 0.3 * self.w / c, 2.5, 2.5) == pytest.approx(1.0)

    @given(st.floats(1.01, 10.0), st.floats(1.01, 10.0), st.floats(0.0, 0.95))
    def test_energy_flux(self, e1, e2, s):
        # propagating on both sides: |r|^2 + |t_H|^2 (k_z2/eps2)/(k_z1/eps1) = 1
        k = s * min(math.sqrt(e1), math.sqrt(e2)) * self.w / c
        r = fresnel_interface_r(self.w, k, e1, e2)
        t = fresnel_interface_t(self.w, k, e1, e2)
        kz1 = math.sqrt(e1 * self.w**2 / c**2 - k * k)
        kz2 = math.sqrt(e2 * self.w**2 / c**2 - k * k)
        assert abs(r) ** 2 + abs(t) ** 2 * (kz2 / e2) / (kz1 / e1) == pytest.approx(1.0, rel=1e-12)

    def test_electric_field_ratio(self):
        k = 0.2 * self.w / c
        tH = fresnel_interface_t(self.w, k, 3.1, 1.0)
        tE = fresnel_interface_t(self.w, k, 3.1, 1.0, field="E")
        assert tE == pytest.approx(tH * math.sqrt(3.1))

    def test_evanescent_finite(self):
        n = 1.76
        k = n * math.sin(math.radians(40)) * self.w / c
        eps = n * n
        t = fresnel_interface_t(self.w, k, eps, 1.0)
        kg = kappa(self.w, k, eps)
        kv = kappa(self.w, k, 1.0)
        # closed form with the same branch conventions
        assert t == pytest.approx(2 * kg / (kg + eps * kv), rel=1e-14)
        assert np.isfinite(abs(t)) and kv.real > 0


class TestStack:
    def test_opaque_film(self, sapphire):
        s = LayerStack(sapphire, GOLD, 10e-6)
        w = 2.46e15
        k = 1.7 * w / c
        assert abs(multilayer_t_str(s, w, k)) < 1e-10

    def test_thin_film_limit(self, sapphire):
        s = LayerStack(sapphire, GOLD, 1e-15)
        w = 2.46e15
        eg = sapphire.permittivity(w)
        for k in (0.3 * w / c, 1.2 * w / c, 1.7 * w / c):
            single = fresnel_interface_t(w, k, eg, 1.0)
            assert multilayer_t_str(s, w, k) == pytest.approx(single, rel=1e-6)

    def test_resonance_peak_beyond_tir(self, stack, sapphire):
        w = 24.6e14
        th_t = tir_angle(sapphire, w)
        n = sapphire.refractive_index(w).real
        angles = th_t + np.radians(np.linspace(0.01, 3, 300))
        t2 = np.abs(multilayer_t_str(stack, w, n * w * np.sin(angles) / c, field="E")) ** 2
        i = int(np.argmax(t2))
        assert 0 < i < angles.size - 1
        assert math.degrees(angles[i] - th_t) == pytest.approx(0.70, abs=0.02)

    def test_regression_resonant_angle(self, stack, sapphire):
        w = 24.6e14
        th = tir_angle(sapphire, w) + math.radians(0.7)
        k = sapphire.refractive_index(w).real * w * math.sin(th) / c
        assert abs(multilayer_t_str(stack, w, k, field="E")) ** 2 == pytest.approx(T_STR_E_SQ_07DEG, rel=1e-6)

    def test_outside_table(self, stack):
        with pytest.raises(TabulationError):
            multilayer_t_str(stack, 1.0e15, 0.0)

    def test_outside_light_cone(self, stack):
        w = 2.4e15
        with pytest.raises(DomainError):
            multilayer_t_str(stack, w, 3 * w / c)


class TestTable:
    def test_tir_angles(self, sapphire):
        assert math.degrees(tir_angle(sapphire, 24.6e14)) == pytest.approx(THETA_T_24_6, abs=2e-4)
        assert math.degrees(tir_angle(sapphire, 21.0e14)) == pytest.approx(THETA_T_21_0, abs=2e-4)

    def test_n_equals_two(self):
        g = TabulatedDielectric([1e15, 2e15], [4.0, 4.0])
        assert math.degrees(tir_angle(g, 1.5e15)) == pytest.approx(30.0)

    def test_no_tir(self):
        g = TabulatedDielectric([1e15, 2e15], [0.9, 0.9])
        with pytest.raises(DomainError):
            tir_angle(g, 1.5e15)

    def test_covers_window(self, sapphire):
        lo, hi = sapphire.omega_range
        assert lo <= 19e14 and hi >= 26e14 and sapphire.omega.size >= 20

    def test_no_extrapolation(self, sapphire):
        with pytest.raises(TabulationError):
            sapphire.permittivity(3e15)

    def test_linear_interpolation(self, sapphire):
        w0, w1 = sapphire.omega[3], sapphire.omega[4]
        mid = sapphire.permittivity(0.5 * (w0 + w1))
        assert mid == pytest.approx(0.5 * (sapphire.eps[3] + sapphire.eps[4]), rel=1e-14)

    @pytest.mark.parametrize("omega,eps", [
        ([2e15, 1e15], [2.0, 2.0]),
        ([1e15], [2.0]),
        ([1e15, 2e15], [2.0, 2.0 - 0.1j]),
    ])
    def test_invalid_tables(self, omega, eps):
        with pytest.raises(DomainError):
            TabulatedDielectric(omega, eps)

    def test_data_dir_override(self, tmp_path, monkeypatch, sapphire):
        (tmp_path / "sapphire_ordinary.txt").write_text("# w re im\n1e15 4.0 0.0\n3e15 4.0 0.0\n")
        monkeypatch.setenv("NONEQCP_DATA_DIR", str(tmp_path))
        assert data_path("sapphire_ordinary.txt").parent == tmp_path
        g = load_sapphire()
        assert g.permittivity(2e15) == 4.0
