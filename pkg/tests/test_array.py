import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special as sp

from slitcyl.array import (array_il_spectrum, array_insertion_loss, assemble_approx_array_system,
                           assemble_full_array_system, solve_array, translation_matrix)
from slitcyl.effective import approx_modal
from slitcyl.model import AIR, ArrayLayout, GeometryError, RigidCore, Scatterer, SlitCylinder
from slitcyl.single import incident_coefficients, insertion_loss, solve_modal

from .conftest import RECEIVER, RO


def classical_rigid_array(centres, radius, k, M):
    """Rigid-cylinder multiple scattering written out term by term with scipy."""
    N = len(centres)
    n = np.arange(-M, M + 1)
    gamma = sp.jvp(n, k * radius) / sp.h1vp(n, k * radius)
    size = 2 * M + 1
    A = np.eye(N * size, dtype=complex)
    b = np.empty(N * size, dtype=complex)
    for p, (xp, yp) in enumerate(centres):
        q, alpha = math.hypot(xp, yp), math.atan2(yp, xp)
        for i, v in enumerate(n):
            b[p * size + i] = -gamma[i] * sp.hankel1(v, k * q) * np.exp(-1j * v * (math.pi + alpha))
        for s, (xs, ys) in enumerate(centres):
            if s == p:
                continue
            d = math.hypot(xs - xp, ys - yp)
            beta = math.atan2(ys - yp, xs - xp)
            for i, v in enumerate(n):
                for j, m in enumerate(n):
                    t = sp.hankel1(m - v, k * d) * np.exp(1j * (m - v) * (math.pi + beta))
                    A[p * size + i, s * size + j] += gamma[i] * t
    return np.linalg.solve(A, b).reshape(N, size)


def small_layout(ring, rows=2, cols=3, core=None):
    return ArrayLayout.rectangular(rows, cols, 0.086, (1.543, 0.0), ring, core)


class TestTranslation:
    def test_graf_identity(self, rng):
        k, M = 25.0, 40
        for _ in range(10):
            qs = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1)])
            qp = qs + np.array([rng.uniform(0.1, 0.3), rng.uniform(-0.3, 0.3)])
            T = translation_matrix(tuple(qs), tuple(qp), k, M)
            rp, th = rng.uniform(0, 0.03), rng.uniform(-math.pi, math.pi)
            point = qp + rp * np.array([math.cos(th), math.sin(th)])
            rel = point - qs
            v = np.arange(-M, M + 1)
            for order in (-3, 0, 2, 5):
                direct = sp.hankel1(order, k * np.hypot(*rel)) * np.exp(1j * order * math.atan2(rel[1], rel[0]))
                series = np.sum(T[:, order + M] * sp.jv(v, k * rp) * np.exp(1j * v * th))
                assert abs(series - direct) < 1e-10 * abs(direct)

    def test_coincident_centres(self):
        with pytest.raises(GeometryError):
            translation_matrix((1.0, 0.0), (1.0, 0.0), 10.0, 4)


class TestReductions:
    @pytest.mark.parametrize("name", ["1S", "4S", "4S+core", "4S+latex"])
    def test_single_member_full(self, scatterers, name):
        sc = scatterers[name]
        k = AIR.wavenumber(1300.0)
        arr = solve_array(ArrayLayout((sc,)), k, 20)
        single = solve_modal(sc, k, 20)
        assert_allclose(arr.block(0), single.coefficients, rtol=1e-10, atol=1e-14)
        assert array_insertion_loss(arr, RECEIVER) == pytest.approx(insertion_loss(single, RECEIVER), abs=1e-10)

    @pytest.mark.parametrize("name", ["1S", "4S", "4S+core", "4S+latex"])
    def test_single_member_approx(self, scatterers, name):
        sc = scatterers[name]
        k = AIR.wavenumber(900.0)
        arr = solve_array(ArrayLayout((sc,)), k, 6, "approx")
        assert_allclose(arr.block(0), approx_modal(sc, k).coefficients, rtol=1e-12, atol=1e-16)

    def test_rigid_array_matches_classical(self):
        ring = SlitCylinder(RO, 0.002, ())
        layout = ArrayLayout.rectangular(2, 2, 0.09, (1.545, 0.0), ring)
        centres = [s.position for s in layout.scatterers]
        for f in (700.0, 2500.0):
            k = AIR.wavenumber(f)
            ours = solve_array(layout, k, 12).coefficients
            ref = classical_rigid_array(centres, RO, k, 12)
            assert_allclose(ours, ref, rtol=1e-8, atol=1e-12 * np.abs(ref).max())

    def test_rigid_core_array_is_finite(self, ring4):
        lay = small_layout(ring4, core=RigidCore(0.011))
        sol = solve_array(lay, AIR.wavenumber(1500.0), 10)
        assert np.all(np.isfinite(sol.coefficients))


class TestInvariants:
    @pytest.mark.parametrize("variant,order", [("full", 12), ("approx", 6)])
    def test_mirror_symmetry(self, ring4, variant, order):
        # 2 x 3 lattice centred on the x-axis; column j mirrors column 2 - j
        lay = small_layout(ring4)
        sol = solve_array(lay, AIR.wavenumber(1700.0), order, variant)
        sign = (-1.0) ** np.arange(-order, order + 1)
        for row in range(2):
            for col in range(3):
                p, q = 3 * row + col, 3 * row + (2 - col)
                assert_allclose(sol.block(q)[::-1] * sign, sol.block(p), rtol=1e-9,
                                atol=1e-12 * np.abs(sol.coefficients).max())

    def test_ordering_does_not_matter(self, ring4):
        lay = small_layout(ring4)
        shuffled = ArrayLayout(tuple(reversed(lay.scatterers)))
        k = AIR.wavenumber(1234.0)
        a = solve_array(lay, k, 10).coefficients
        b = solve_array(shuffled, k, 10).coefficients[::-1]
        assert_allclose(a, b, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("variant,order", [("full", 15), ("approx", 6)])
    def test_energy_balance_per_scatterer(self, scatterers, variant, order):
        sc = scatterers["4S+latex"]
        lay = small_layout(sc.ring, core=sc.core)
        k = AIR.wavenumber(1100.0)
        sol = solve_array(lay, k, order, variant)
        pos = lay.positions()
        for p in range(len(lay)):
            exciting = incident_coefficients(tuple(pos[p]), k, order).astype(complex)
            for s in range(len(lay)):
                if s != p:
                    exciting += translation_matrix(tuple(pos[s]), tuple(pos[p]), k, order) @ sol.block(s)
            A = sol.block(p)
            defect = np.sum(np.abs(A) ** 2) + np.real(np.vdot(exciting, A))
            assert abs(defect) < 1e-9 * np.sum(np.abs(A) ** 2)

    def test_distant_pair_decouples(self, scatterers):
        sc = scatterers["4S"]
        far = Scatterer((1.5, 40.0), sc.ring)
        k = AIR.wavenumber(800.0)
        pair = solve_array(ArrayLayout((sc, far)), k, 15)
        alone = solve_modal(sc, k, 15).coefficients
        assert np.abs(pair.block(0) - alone).max() < 0.05 * np.abs(alone).max()


class TestGeometry:
    def test_overlap(self, ring4):
        lay = ArrayLayout.rectangular(1, 2, 0.05, (1.5, 0.0), ring4)
        with pytest.raises(GeometryError):
            assemble_full_array_system(lay, 10.0, 5)

    def test_empty(self):
        with pytest.raises(ValueError):
            assemble_approx_array_system(ArrayLayout(()), 10.0, 5)

    def test_source_inside(self, ring4):
        with pytest.raises(GeometryError):
            solve_array(ArrayLayout((Scatterer((0.01, 0.0), ring4),)), 10.0, 5)

    def test_receiver_inside(self, ring4):
        lay = small_layout(ring4)
        with pytest.raises(GeometryError):
            array_il_spectrum(lay, tuple(lay.positions()[0] + 0.01), [500.0])
        sol = solve_array(lay, 10.0, 5)
        with pytest.raises(GeometryError):
            array_insertion_loss(sol, tuple(lay.positions()[1]))

    def test_system_sizes(self, ring4):
        lay = ArrayLayout.rectangular(3, 7, 0.086, (1.586, 0.0), ring4)
        k = AIR.wavenumber(1000.0)
        assert assemble_approx_array_system(lay, k, 6)[0].shape == (273, 273)
        assert assemble_full_array_system(lay, k, 35)[0].shape == (1491, 1491)

    def test_field_continuous_across_gaps(self, ring4):
        lay = small_layout(ring4)
        sol = solve_array(lay, AIR.wavenumber(1500.0), 15)
        # midway between two neighbours, approached from both sides
        mid = lay.positions()[:2].mean(axis=0)
        a = sol.field(tuple(mid + [0.0, -1e-7]))
        b = sol.field(tuple(mid + [0.0, 1e-7]))
        assert abs(a - b) < 1e-4 * abs(a)

    def test_unknown_variant(self, ring4):
        with pytest.raises(ValueError):
            solve_array(small_layout(ring4), 10.0, 5, "exact")
