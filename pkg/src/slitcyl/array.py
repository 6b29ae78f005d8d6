"""Finite arrays: multiple scattering between slit cylinders.

Outgoing waves of scatterer ``s`` re-expand about scatterer ``p`` through

    H_n(k r_s) e^{i n theta_s} = sum_v T^{ps}_{vn} J_v(k r_p) e^{i v theta_p},
    T^{ps}_{vn} = H_{n-v}(k D) e^{i (n-v) (pi + beta)},

with ``D, beta`` the distance and direction from ``Q_p`` to ``Q_s``.  Each
scatterer is excited by the incident field plus everyone else's outgoing waves.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .kernel import SHELL_HALF_THICKNESS, build_kernel
from .model import AIR, AcousticMedium, ArrayLayout, GeometryError
from .single import (_check_finite, _receiver_distance, dense_solve, geometry_digest,
                     system_operators)
from .special import cylinder_table, hankel1, hankel_rows

log = logging.getLogger(__name__)


def check_layout(layout: ArrayLayout) -> None:
    if len(layout) == 0:
        raise ValueError("array has no scatterers")
    pos = layout.positions()
    radii = np.array([s.ring.outer_radius for s in layout.scatterers])
    for p in range(len(layout)):
        if math.hypot(*pos[p]) <= radii[p]:
            raise GeometryError(f"source lies inside scatterer {p}")
        for s in range(p + 1, len(layout)):
            gap = np.hypot(*(pos[s] - pos[p])) - radii[p] - radii[s]
            if gap <= 0:
                raise GeometryError(f"scatterers {p} and {s} overlap (gap {gap:.3g} m)")


def translation_matrix(source, target, k: float, max_order: int) -> np.ndarray:
    """Map outgoing coefficients about ``source`` to regular ones about ``target``.

    Entry ``[v + M, n + M]`` is ``T_{vn}``; valid for ``|r_target| < |source - target|``.
    """
    dx = source[0] - target[0]
    dy = source[1] - target[1]
    dist = math.hypot(dx, dy)
    if dist == 0:
        raise GeometryError("coincident scatterer centres")
    beta = math.atan2(dy, dx)
    M = max_order
    m = np.arange(-2 * M, 2 * M + 1)
    g = cylinder_table(2 * M, k * dist).h * np.exp(1j * m * (math.pi + beta))
    n = np.arange(-M, M + 1)
    return g[(n[None, :] - n[:, None]) + 2 * M]


def _coupling_blocks(layout: ArrayLayout, k: float, M: int):
    """All translation matrices ``T^{ps}``, one Hankel batch for every pair."""
    pos = layout.positions()
    N = len(layout)
    pairs = [(p, s) for p in range(N) for s in range(N) if p != s]
    if not pairs:
        return {}
    delta = np.array([pos[s] - pos[p] for p, s in pairs])
    dist = np.hypot(delta[:, 0], delta[:, 1])
    if np.any(dist == 0):
        raise GeometryError("coincident scatterer centres")
    beta = np.arctan2(delta[:, 1], delta[:, 0])
    m = np.arange(-2 * M, 2 * M + 1)
    # lattices repeat a handful of distances; evaluate each once
    uniq, inv = np.unique(np.round(dist, 13), return_inverse=True)
    g = hankel_rows(2 * M, k * uniq)[inv] * np.exp(1j * m[None, :] * (math.pi + beta[:, None]))
    n = np.arange(-M, M + 1)
    idx = (n[None, :] - n[:, None]) + 2 * M
    return {pair: g[i][idx] for i, pair in enumerate(pairs)}


def _incident_blocks(layout: ArrayLayout, k: float, M: int) -> np.ndarray:
    """Incident-monopole coefficients about every centre, shape ``(N, 2M + 1)``."""
    pos = layout.positions()
    q = np.hypot(pos[:, 0], pos[:, 1])
    alpha = np.arctan2(pos[:, 1], pos[:, 0])
    n = np.arange(-M, M + 1)
    return hankel_rows(M, k * q) * np.exp(-1j * n[None, :] * (math.pi + alpha[:, None]))


def _kernel_cache(layout, k, M, medium, shell_thickness):
    """Per-scatterer ``(L, R)``, computed once per distinct ring/core/orientation."""
    cache = {}
    out = []
    for s in layout.scatterers:
        key = (s.oriented_ring, s.core)
        if key not in cache:
            kern = build_kernel(s, k, M, medium, shell_thickness)
            cache[key] = system_operators(s.oriented_ring, k, kern)
        out.append(cache[key])
    return out


def assemble_full_array_system(layout: ArrayLayout, k: float, max_order: int = 35,
                               medium: AcousticMedium = AIR,
                               shell_thickness: str = SHELL_HALF_THICKNESS):
    """Block system: ``L^p A^p + sum_{s != p} R^p T^{ps} A^s = -R^p a^p``."""
    check_layout(layout)
    M = max_order
    size = 2 * M + 1
    N = len(layout)
    ops = _kernel_cache(layout, k, M, medium, shell_thickness)
    T = _coupling_blocks(layout, k, M)
    inc = _incident_blocks(layout, k, M)
    A = np.empty((N * size, N * size), dtype=complex)
    rhs = np.empty(N * size, dtype=complex)
    for p in range(N):
        L, R = ops[p]
        rows = slice(p * size, (p + 1) * size)
        for s in range(N):
            cols = slice(s * size, (s + 1) * size)
            A[rows, cols] = L if s == p else R @ T[p, s]
        rhs[rows] = -R @ inc[p]
        _check_finite(A[rows], rhs[rows], k, medium, block=p)
    return A, rhs


def assemble_approx_array_system(layout: ArrayLayout, k: float, max_order: int = 6,
                                 medium: AcousticMedium = AIR,
                                 shell_thickness: str = SHELL_HALF_THICKNESS):
    """Fluid-layer block system: ``A^p + Z^p sum_{s != p} T^{ps} A^s = -Z^p a^p``."""
    from .effective import approx_scattering_coefficient, layer_parameters

    check_layout(layout)
    M = max_order
    size = 2 * M + 1
    N = len(layout)
    n = np.arange(-M, M + 1)
    cache = {}
    zs = []
    for s in layout.scatterers:
        key = (s.ring, s.core)
        if key not in cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                layer = layer_parameters(s.ring, medium)
            cache[key] = approx_scattering_coefficient(layer, s.core, k, n, medium, shell_thickness)
        zs.append(cache[key])
    T = _coupling_blocks(layout, k, M)
    inc = _incident_blocks(layout, k, M)
    A = np.zeros((N * size, N * size), dtype=complex)
    rhs = np.empty(N * size, dtype=complex)
    eye = np.eye(size)
    for p in range(N):
        rows = slice(p * size, (p + 1) * size)
        for s in range(N):
            cols = slice(s * size, (s + 1) * size)
            A[rows, cols] = eye if s == p else zs[p][:, None] * T[p, s]
        rhs[rows] = -zs[p] * inc[p]
        _check_finite(A[rows], rhs[rows], k, medium, block=p)
    return A, rhs


@dataclass
class ArrayModalSolution:
    """Outgoing coefficients of every scatterer, shape ``(N, 2M + 1)``."""

    layout: ArrayLayout
    max_order: int
    coefficients: np.ndarray
    k: float
    variant: str = "full"
    info: dict = field(default_factory=dict)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.max_order, self.max_order + 1)

    def block(self, index: int) -> np.ndarray:
        return self.coefficients[index]

    def scattered(self, receiver) -> complex:
        total = 0j
        n = self.orders
        for sc, coef in zip(self.layout.scatterers, self.coefficients):
            dx = receiver[0] - sc.position[0]
            dy = receiver[1] - sc.position[1]
            r = math.hypot(dx, dy)
            if r <= sc.ring.outer_radius:
                raise GeometryError(f"receiver lies inside the scatterer at {sc.position}")
            h = cylinder_table(self.max_order, self.k * r).h
            total += np.sum(coef * h * np.exp(1j * n * math.atan2(dy, dx)))
        return complex(total)

    def field(self, receiver) -> complex:
        r = _receiver_distance(receiver)
        return complex(hankel1(0, self.k * r)) + self.scattered(receiver)


def solve_array(layout: ArrayLayout, k: float, max_order: int = 35, variant: str = "full",
                medium: AcousticMedium = AIR,
                shell_thickness: str = SHELL_HALF_THICKNESS) -> ArrayModalSolution:
    if variant == "full":
        A, rhs = assemble_full_array_system(layout, k, max_order, medium, shell_thickness)
    elif variant == "approx":
        A, rhs = assemble_approx_array_system(layout, k, max_order, medium, shell_thickness)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    f = k * medium.sound_speed / (2 * math.pi)
    x, res = dense_solve(A, rhs, label=f"({variant} array at {f:.6g} Hz)")
    if log.isEnabledFor(logging.DEBUG):
        log.debug("array %s f=%.6g Hz size=%d residual=%.3g", variant, f, A.shape[0], res)
    return ArrayModalSolution(layout, max_order, x.reshape(len(layout), -1), k, variant,
                              {"residual": res})


def array_insertion_loss(solution: ArrayModalSolution, receiver) -> float:
    r = _receiver_distance(receiver)
    p0 = complex(hankel1(0, solution.k * r))
    p = p0 + solution.scattered(receiver)
    if p == 0:
        return math.inf
    return 20.0 * math.log10(abs(p0) / abs(p))


def array_il_spectrum(layout: ArrayLayout, receiver, frequencies, max_order: int = 35,
                      variant: str = "full", medium: AcousticMedium = AIR, workers=None,
                      shell_thickness: str = SHELL_HALF_THICKNESS, metadata=None):
    """Insertion-loss spectrum of an array over ``frequencies`` (Hz)."""
    from .spectrum import run_sweep

    check_layout(layout)
    for sc in layout.scatterers:
        if math.hypot(receiver[0] - sc.position[0], receiver[1] - sc.position[1]) <= sc.ring.outer_radius:
            raise GeometryError(f"receiver lies inside the scatterer at {sc.position}")
    if variant not in ("full", "approx"):
        raise ValueError(f"unknown variant {variant!r}")

    def one(f):
        sol = solve_array(layout, medium.wavenumber(f), max_order, variant, medium, shell_thickness)
        return array_insertion_loss(sol, receiver)

    meta = {"model": variant, "max_order": max_order, "scatterers": len(layout),
            "receiver": list(map(float, receiver)),
            "medium": {"sound_speed": medium.sound_speed, "density": medium.density},
            "geometry_digest": geometry_digest(layout)}
    meta.update(metadata or {})
    return run_sweep(one, frequencies, meta, workers=workers)
