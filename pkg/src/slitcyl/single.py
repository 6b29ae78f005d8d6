"""Single-scatterer multipole solution and insertion loss.

The exterior field about a scatterer centred at ``Q`` is

    p_o = H_0(k r) + sum_n A_n H_n(k r^) exp(i n theta^)

and the incident monopole re-expands about ``Q`` as
``sum_n a_n J_n(k r^) exp(i n theta^)`` with ``a_n = H_n(k Q) exp(-i n (pi + alpha))``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import SHELL_HALF_THICKNESS, KernelTable, build_kernel, fourier_matrix
from .model import AIR, AcousticMedium, GeometryError, Scatterer, SlitCylinder
from .special import cylinder_table, hankel1

log = logging.getLogger(__name__)


class AssemblyError(ArithmeticError):
    pass


class SolverError(ArithmeticError):
    pass


def incident_coefficients(position, k: float, max_order: int) -> np.ndarray:
    """Expansion coefficients of the origin monopole about ``position``."""
    x, y = position
    q = math.hypot(x, y)
    alpha = math.atan2(y, x)
    n = np.arange(-max_order, max_order + 1)
    return cylinder_table(max_order, k * q).h * np.exp(-1j * n * (math.pi + alpha))


@dataclass
class ModalSolution:
    """Outgoing-wave coefficients ``A_n``, ``n = -M..M``, of one scatterer."""

    max_order: int
    coefficients: np.ndarray
    k: float
    position: tuple[float, float]
    outer_radius: float
    scatterer: Scatterer | None = None
    variant: str = "full"
    info: dict = field(default_factory=dict)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.max_order, self.max_order + 1)

    def scattered(self, receiver) -> complex:
        dx = receiver[0] - self.position[0]
        dy = receiver[1] - self.position[1]
        r = math.hypot(dx, dy)
        if r <= self.outer_radius:
            raise GeometryError(f"receiver at distance {r:g} m lies inside the scatterer "
                                f"(r_o = {self.outer_radius:g} m)")
        theta = math.atan2(dy, dx)
        h = cylinder_table(self.max_order, self.k * r).h
        return complex(np.sum(self.coefficients * h * np.exp(1j * self.orders * theta)))

    def field(self, receiver) -> complex:
        return exterior_field(self, receiver)


def _receiver_distance(receiver) -> float:
    r = math.hypot(receiver[0], receiver[1])
    if r == 0:
        raise GeometryError("receiver coincides with the source")
    return r


def exterior_field(solution, receiver) -> complex:
    """Incident monopole plus scattered multipoles at ``receiver``."""
    r = _receiver_distance(receiver)
    return complex(hankel1(0, solution.k * r)) + solution.scattered(receiver)


def insertion_loss(solution, receiver) -> float:
    """20 log10 |H_0(k r) / p_o|; ``inf`` when the total field vanishes."""
    r = _receiver_distance(receiver)
    p0 = complex(hankel1(0, solution.k * r))
    p = p0 + solution.scattered(receiver)
    if p == 0:
        return math.inf
    return 20.0 * math.log10(abs(p0) / abs(p))


def system_operators(ring: SlitCylinder, k: float, kernel: KernelTable):
    """Operators ``(L, R)`` with ``L A + R b = 0`` for exciting coefficients ``b``.

    ``L`` acts on the outgoing coefficients, ``R`` on the regular (exciting)
    ones; rows are the projections onto ``exp(-i m theta)``.
    """
    M = kernel.max_order
    h = ring.wall_thickness
    ro = ring.outer_radius
    t = cylinder_table(M, k * ro)
    H, dH = t.h, k * t.dh
    J, dJ = t.j, k * t.dj
    I = kernel.admittance
    F = fourier_matrix(ring, M)
    S = F @ (I[:, None] * F)
    c = k * k * h / (2 * math.pi)
    L = -F * (H - dH * I)[None, :] + c * S * H[None, :]
    R = -F * (J - dJ * I)[None, :] + c * S * J[None, :]
    idx = np.arange(2 * M + 1)
    L[idx, idx] += 2 * math.pi * h * dH
    R[idx, idx] += 2 * math.pi * h * dJ
    return L, R


def assemble_single_system(scatterer: Scatterer, k: float, max_order: int,
                           kernel: KernelTable | None = None, medium: AcousticMedium = AIR,
                           shell_thickness: str = SHELL_HALF_THICKNESS):
    """Truncated system ``(matrix, rhs)`` for the outgoing coefficients."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if kernel is None:
        kernel = build_kernel(scatterer, k, max_order, medium, shell_thickness)
    ring = scatterer.oriented_ring
    L, R = system_operators(ring, k, kernel)
    a = incident_coefficients(scatterer.position, k, max_order)
    rhs = -R @ a
    _check_finite(L, rhs, k, medium)
    return L, rhs


def _check_finite(matrix, rhs, k, medium, block=None):
    bad = ~np.isfinite(matrix)
    if np.any(bad) or not np.all(np.isfinite(rhs)):
        f = k * medium.sound_speed / (2 * math.pi)
        if np.any(bad):
            m, n = np.argwhere(bad)[0]
            where = f"entry ({m}, {n})"
        else:
            where = "right-hand side"
        pre = f"block {block} " if block is not None else ""
        raise AssemblyError(f"non-finite {pre}{where} at {f:.6g} Hz")


def dense_solve(matrix, rhs, *, tol=1e-8, label=""):
    """Equilibrated dense LU solve with a relative residual check."""
    col = np.max(np.abs(matrix), axis=0)
    col[col == 0] = 1.0
    scaled = matrix / col[None, :]
    row = np.max(np.abs(scaled), axis=1)
    row[row == 0] = 1.0
    scaled /= row[:, None]
    try:
        y = np.linalg.solve(scaled, rhs / row)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular system {label}".strip()) from exc
    x = y / col
    # residual measured on the row-equilibrated system; raw rows span hundreds of decades
    res = np.linalg.norm(scaled @ y - rhs / row) / max(np.linalg.norm(rhs / row), 1e-300)
    if not np.isfinite(res) or res > tol:
        raise SolverError(f"residual {res:.3g} exceeds {tol:g} {label}".strip())
    return x, res


def solve_modal(scatterer: Scatterer, k: float, max_order: int = 35,
                medium: AcousticMedium = AIR,
                shell_thickness: str = SHELL_HALF_THICKNESS) -> ModalSolution:
    """Dense solve of the single-scatterer system."""
    L, rhs = assemble_single_system(scatterer, k, max_order, None, medium, shell_thickness)
    f = k * medium.sound_speed / (2 * math.pi)
    x, res = dense_solve(L, rhs, label=f"at {f:.6g} Hz")
    if log.isEnabledFor(logging.DEBUG):
        log.debug("f=%.6g Hz cond=%.3g residual=%.3g", f, np.linalg.cond(L), res)
    return ModalSolution(max_order, x, k, scatterer.position, scatterer.ring.outer_radius,
                         scatterer, "full", {"residual": res})


def rigid_cylinder_coefficients(outer_radius: float, position, k: float,
                                max_order: int) -> ModalSolution:
    """Closed-form coefficients of a rigid cylinder: ``-J_n'/H_n' a_n``."""
    t = cylinder_table(max_order, k * outer_radius)
    a = incident_coefficients(position, k, max_order)
    return ModalSolution(max_order, -t.dj / t.dh * a, k, tuple(position), outer_radius,
                         None, "rigid")


def il_spectrum(scatterer: Scatterer, receiver, frequencies, max_order: int = 35,
                variant: str = "full", medium: AcousticMedium = AIR, workers=None,
                shell_thickness: str = SHELL_HALF_THICKNESS, metadata=None):
    """Insertion-loss spectrum of one scatterer over ``frequencies`` (Hz)."""
    from .effective import approx_modal
    from .spectrum import run_sweep

    if variant == "full":
        def one(f):
            return insertion_loss(solve_modal(scatterer, medium.wavenumber(f), max_order,
                                              medium, shell_thickness), receiver)
    elif variant == "approx":
        def one(f):
            return insertion_loss(approx_modal(scatterer, medium.wavenumber(f), max_order,
                                               medium, shell_thickness), receiver)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    meta = {"model": variant, "max_order": max_order, "receiver": list(map(float, receiver)),
            "medium": {"sound_speed": medium.sound_speed, "density": medium.density},
            "geometry_digest": geometry_digest(scatterer)}
    meta.update(metadata or {})
    return run_sweep(one, frequencies, meta, workers=workers)


def geometry_digest(obj) -> str:
    import hashlib
    return hashlib.sha256(repr(obj).encode()).hexdigest()[:16]
