import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

from slitcyl.kernel import (SHELL_FULL_THICKNESS, KernelPoleError, admittance_factor,
                            build_kernel, core_factor, fourier_matrix, slit_fourier)
from slitcyl.model import (AIR, AcousticMedium, ElasticShell, EmptyCore, RigidCore, Scatterer,
                           ShellMaterial, SlitCylinder)
from slitcyl.special import bessel_j, bessel_y, deriv_j, deriv_y


def quadrature_fourier(ring, n):
    """Integrate the slit indicator times exp(-i n theta) slit by slit."""
    total = 0j
    for c, w in ring.slits:
        a, b = c - w / 2, c + w / 2
        re = quad(lambda t: math.cos(n * t), a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        im = quad(lambda t: -math.sin(n * t), a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        total += re + 1j * im
    return total


def random_ring(rng, count):
    widths = rng.uniform(0.01, 0.3, count)
    gaps = rng.uniform(0.05, 1.0, count)
    scale = (2 * math.pi - 0.01) / (widths.sum() + gaps.sum())
    widths, gaps = widths * scale, gaps * scale
    start = rng.uniform(0, 2 * math.pi)
    centres = start + np.cumsum(np.concatenate([[0], widths[:-1] / 2 + gaps[:-1] + widths[1:] / 2]))
    return SlitCylinder(0.03, 0.002, tuple(zip(centres, widths)))


class TestSlitFourier:
    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_quadrature_oracle(self, rng):
        for _ in range(50):
            ring = random_ring(rng, int(rng.integers(1, 6)))
            n = np.arange(-80, 81)
            closed = slit_fourier(ring, n)
            for k in rng.choice(n, 6, replace=False):
                ref = quadrature_fourier(ring, int(k))
                assert abs(closed[k + 80] - ref) <= 1e-8 * max(abs(ref), 1e-3)

    def test_zero_order(self):
        ring = SlitCylinder.periodic(0.0275, 0.002, 4, 0.1455 * 0.0275)
        assert slit_fourier(ring, 0).real == pytest.approx(0.5819, abs=1e-4)

    @pytest.mark.parametrize("count", [1, 2, 3, 4, 7])
    def test_selection_rule(self, count):
        ring = SlitCylinder.periodic(0.0275, 0.002, count, 0.003)
        n = np.arange(-80, 81)
        f = slit_fourier(ring, n)
        assert np.all(np.abs(f[n % count != 0]) < 1e-12)
        assert np.all(np.abs(f.imag) < 1e-12)

    def test_selection_value(self, ring4):
        assert abs(slit_fourier(ring4, 2)) < 1e-14

    def test_single_slit_at_pi(self):
        phi = 0.2
        ring = SlitCylinder(0.03, 0.002, ((math.pi, phi),))
        assert_allclose(slit_fourier(ring, 1), -2 * math.sin(phi / 2), atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_conjugate_symmetry(self, seed):
        ring = random_ring(np.random.default_rng(seed), 3)
        n = np.arange(1, 60)
        assert_allclose(slit_fourier(ring, -n), np.conj(slit_fourier(ring, n)), rtol=1e-13, atol=1e-15)

    def test_toeplitz_matrix(self, ring1):
        F = fourier_matrix(ring1, 5)
        for m in range(-5, 6):
            for n in range(-5, 6):
                assert F[m + 5, n + 5] == slit_fourier(ring1, m - n)


class TestCoreFactor:
    def test_empty(self):
        assert_allclose(core_factor(EmptyCore(), 7.0, np.arange(-5, 6)), 0)

    def test_rigid_n0(self):
        x = 7.0 * 0.011
        c = core_factor(RigidCore(0.011), 7.0, 0)
        # J_0' = -J_1 and Y_0' = -Y_1, so -J_0'/Y_0' = -J_1/Y_1
        assert_allclose(c, -bessel_j(1, x) / bessel_y(1, x), rtol=1e-13)

    def test_rigid_general(self):
        k, a = 18.0, 0.015
        n = np.arange(-6, 7)
        assert_allclose(core_factor(RigidCore(a), k, n), -deriv_j(n, k * a) / deriv_y(n, k * a), rtol=1e-12)

    def test_even_in_order(self, latex_shell):
        for core in (RigidCore(0.011), latex_shell):
            n = np.arange(1, 12)
            assert_allclose(core_factor(core, 25.0, -n), core_factor(core, 25.0, n), rtol=1e-13)

    def test_shell_vacuum_limit(self, latex_shell):
        vacuum = AcousticMedium(343.0, 1e-9)
        k = vacuum.wavenumber(800.0)
        R = latex_shell.mid_radius
        n = np.arange(0, 6)
        expected = -deriv_j(n, k * R) / deriv_y(n, k * R)
        assert_allclose(core_factor(latex_shell, k, n, vacuum), expected, rtol=1e-6)

    def test_thickness_convention_switch(self, latex_shell):
        k = AIR.wavenumber(900.0)
        half = core_factor(latex_shell, k, 0)
        full = core_factor(latex_shell, k, 0, AIR, SHELL_FULL_THICKNESS)
        assert half != full
        with pytest.raises(ValueError):
            core_factor(latex_shell, k, 0, AIR, "quarter")

    def test_near_pole_is_not_regularised(self):
        # Y_0' = -Y_1 vanishes at the first zero of Y_1; the factor grows without clipping
        y1_zero = 2.197141326031017
        c = core_factor(RigidCore(1.0), y1_zero, 0)
        assert np.isfinite(c) and abs(c) > 1e10

    def test_pole_error_payload(self):
        err = KernelPoleError("core factor", 3, 1234.5)
        assert err.order == 3 and err.frequency == 1234.5
        assert "n=3" in str(err) and "1234.5 Hz" in str(err)


class TestAdmittance:
    def test_empty_reduction(self):
        k, ri = 12.0, 0.0255
        n = np.arange(-5, 6)
        expected = bessel_j(n, k * ri) / (k * deriv_j(n, k * ri))
        assert_allclose(admittance_factor(0.0, k, ri, n), expected, rtol=1e-13)

    def test_infinite_core_factor_limit(self):
        k, ri = 12.0, 0.0255
        n = np.arange(0, 5)
        limit = bessel_y(n, k * ri) / (k * deriv_y(n, k * ri))
        assert_allclose(admittance_factor(np.inf, k, ri, n), limit, rtol=1e-13)
        assert_allclose(admittance_factor(1e12, k, ri, n), limit, rtol=1e-9)

    def test_parity(self):
        ri = 0.0255
        k = 0.5 / ri
        c = core_factor(RigidCore(0.011), k, np.array([-3, 3]))
        out = admittance_factor(c, k, ri, np.array([-3, 3]))
        assert_allclose(out[0], out[1], rtol=1e-13)


class TestKernelTable:
    def test_consistent_with_parts(self, ring4):
        sc = Scatterer((1.5, 0), ring4, RigidCore(0.011))
        k = AIR.wavenumber(1234.0)
        kern = build_kernel(sc, k, 10)
        n = kern.orders
        c = core_factor(RigidCore(0.011), k, n)
        assert_allclose(kern.core_factors, c, rtol=1e-13)
        assert_allclose(kern.admittance, admittance_factor(c, k, ring4.inner_radius, n), rtol=1e-12)
        assert_allclose(kern.fourier_at(np.arange(-20, 21)), slit_fourier(ring4, np.arange(-20, 21)))

    def test_orientation_enters_fourier(self, ring1):
        sc = Scatterer((1.5, 0), ring1, orientation=0.4)
        kern = build_kernel(sc, 10.0, 4)
        assert_allclose(kern.fourier_at(1), slit_fourier(ring1.rotated(0.4), 1))

    def test_shell_material_type(self):
        sh = ElasticShell(0.02, 0.00025, ShellMaterial(4e6, 0.49, 1100.0))
        sc = Scatterer((1.5, 0), SlitCylinder.periodic(0.0275, 0.002, 4, 0.004), sh)
        kern = build_kernel(sc, 20.0, 6)
        assert np.all(np.isfinite(kern.admittance))
