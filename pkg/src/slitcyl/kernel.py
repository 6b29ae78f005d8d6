"""Per-order factors of the scattering systems.

* core factor ``c_n = C_n / B_n`` describing the cavity contents,
* admittance ``I_n = p_i / (dp_i/dr)`` of the interior field at the inner wall,
* Fourier coefficients ``F_n`` of the slit indicator function.

All primes are radial derivatives d/dr (chain-rule factor k included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import (AIR, AcousticMedium, ElasticShell, EmptyCore, RigidCore, Scatterer,
                    SlitCylinder, dilatational_speed)
from .special import cylinder_table

# interpretation of the thickness symbol in the shell fluid-loading term
SHELL_HALF_THICKNESS = "half"
SHELL_FULL_THICKNESS = "full"


class KernelPoleError(ArithmeticError):
    """Evaluation at (or numerically at) a pole of a modal factor."""

    def __init__(self, what, order, frequency=None):
        self.order = order
        self.frequency = frequency
        at = f" at {frequency:.6g} Hz" if frequency is not None else ""
        super().__init__(f"{what} has a pole for order n={order}{at}")


def _frequency(k, medium):
    return k * medium.sound_speed / (2 * math.pi)


def core_factor_terms(core, k: float, n, medium: AcousticMedium = AIR,
                      shell_thickness: str = SHELL_HALF_THICKNESS):
    """Return ``(num, den)`` with ``c_n = -num / den`` for orders ``n``.

    Keeping the pair lets callers evaluate expressions in ``c_n`` without
    dividing through a pole of the core factor itself.
    """
    n = np.atleast_1d(np.asarray(n, dtype=int))
    if isinstance(core, EmptyCore):
        return np.zeros(n.shape), np.ones(n.shape)
    with np.errstate(invalid="ignore", over="ignore"):
        num, den = _core_pair(core, k, n, medium, shell_thickness)
    # Y_n' overflows at orders far above the core's size parameter, where c_n -> 0
    gone = ~np.isfinite(den) & (np.isfinite(num) | np.isnan(num))
    if np.any(gone):
        num, den = np.array(num, dtype=complex), np.array(den, dtype=complex)
        num[gone], den[gone] = 0.0, 1.0
    return num, den


def _core_pair(core, k, n, medium, shell_thickness):
    m = int(np.abs(n).max())
    if isinstance(core, RigidCore):
        t = cylinder_table(m, k * core.radius)
        idx = n + m
        return k * t.dj[idx], k * t.dy[idx]
    if isinstance(core, ElasticShell):
        R = core.mid_radius
        if shell_thickness == SHELL_HALF_THICKNESS:
            hs = core.half_thickness
        elif shell_thickness == SHELL_FULL_THICKNESS:
            hs = core.thickness
        else:
            raise ValueError(f"unknown shell thickness convention {shell_thickness!r}")
        mat = core.material
        cs = dilatational_speed(mat)
        omega = k * medium.sound_speed
        ksr2 = (omega / cs * R) ** 2
        t = cylinder_table(m, k * R)
        idx = n + m
        djr = k * t.dj[idx]
        dyr = k * t.dy[idx]
        bend = 1.0 - ksr2 + n ** 2
        load = (n ** 2 - ksr2) * medium.density / (mat.density * math.pi * R * hs)
        return djr ** 2 * bend, djr * dyr * bend + load
    raise TypeError(f"unknown core type {type(core).__name__}")


def core_factor(core, k: float, n, medium: AcousticMedium = AIR,
                shell_thickness: str = SHELL_HALF_THICKNESS):
    """Core factor ``c_n`` (0 for an empty cylinder).

    Raises :class:`KernelPoleError` when the denominator vanishes to within
    1e-30 of the numerator scale.
    """
    scalar = np.ndim(n) == 0
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    num, den = core_factor_terms(core, k, n_arr, medium, shell_thickness)
    scale = np.maximum(np.abs(num), np.abs(den))
    bad = np.abs(den) <= 1e-30 * np.where(scale > 0, scale, 1.0)
    if np.any(bad):
        raise KernelPoleError("core factor", int(n_arr[bad][0]), _frequency(k, medium))
    out = -num / den
    return out[0] if scalar else out


def admittance_factor(c_n, k: float, inner_radius: float, n):
    """``I_n = (J_n + c_n Y_n) / (d/dr)(J_n + c_n Y_n)`` at ``r = inner_radius``.

    ``c_n = inf`` selects the limit ``Y_n / Y_n'``.
    """
    scalar = np.ndim(n) == 0
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    c = np.broadcast_to(np.asarray(c_n, dtype=complex), n_arr.shape)
    inf = np.isinf(c)
    num = np.where(inf, 1.0, -np.where(inf, 0, c))
    den = np.where(inf, 0.0, 1.0)
    out = _admittance(num, den, k, inner_radius, n_arr, None)
    return out[0] if scalar else out


def _admittance(num, den, k, ri, n, medium):
    """Admittance from the homogeneous core pair (``c_n = -num/den``)."""
    m = int(np.abs(n).max())
    t = cylinder_table(m, k * ri)
    idx = n + m
    lost = (t.j[idx] == 0) | ~np.isfinite(t.y[idx]) | ~np.isfinite(t.dy[idx])
    with np.errstate(invalid="ignore", over="ignore"):
        top = (t.j[idx] * den - num * t.y[idx]).astype(complex)
        bottom = (k * (t.dj[idx] * den - num * t.dy[idx])).astype(complex)
    if np.any(lost):
        # J_n underflows only at orders where the core term scales like (a/r_i)^(2n)
        top[lost] = _small_argument_admittance(np.abs(n[lost]), k * ri) / k
        bottom[lost] = 1.0
    scale = np.maximum(np.abs(top), np.abs(k * ri * bottom))
    bad = ~np.isfinite(bottom) | (np.abs(bottom) * ri <= 1e-30 * np.where(scale > 0, scale, 1.0))
    if np.any(bad):
        f = _frequency(k, medium) if medium is not None else None
        raise KernelPoleError("admittance factor", int(n[bad][0]), f)
    return top / bottom


def _small_argument_admittance(n, x, extra=60):
    """``J_n(x) / (x J_n'(x))`` from the backward-recurrence ratio ``J_(n-1) / J_n``."""
    out = np.empty(len(n))
    for i, order in enumerate(n):
        r = 2.0 * (order + extra) / x
        for j in range(order + extra - 1, order - 1, -1):
            r = 2.0 * j / x - 1.0 / r
        # r now holds J_(order-1) / J_order and J_n' = J_(n-1) - (n/x) J_n
        out[i] = 1.0 / (x * r - order)
    return out


def slit_fourier(ring: SlitCylinder, n):
    """``F_n = integral_0^{2 pi} f(theta) exp(-i n theta) d theta``.

    ``F_0`` is the total open angle; otherwise each slit contributes
    ``(2/n) sin(n phi_l / 2) exp(-i n theta_l)``.
    """
    scalar = np.ndim(n) == 0
    n_arr = np.atleast_1d(np.asarray(n))
    out = np.zeros(n_arr.shape, dtype=complex)
    nz = n_arr != 0
    safe = np.where(nz, n_arr, 1)
    for theta, phi in ring.slits:
        term = np.where(nz, 2.0 / safe * np.sin(safe * phi / 2.0), phi)
        out += term * np.exp(-1j * n_arr * theta)
    return out[0] if scalar else out


@lru_cache(maxsize=256)
def fourier_matrix(ring: SlitCylinder, max_order: int) -> np.ndarray:
    """Toeplitz matrix ``T[m, n] = F_{m-n}`` for ``m, n`` in ``[-M, M]``."""
    diffs = np.arange(-2 * max_order, 2 * max_order + 1)
    f = slit_fourier(ring, diffs)
    m = np.arange(2 * max_order + 1)
    out = f[(m[:, None] - m[None, :]) + 2 * max_order]
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class KernelTable:
    """Modal factors of one scatterer at one frequency, orders ``-M..M``."""

    max_order: int
    k: float
    core_num: np.ndarray
    core_den: np.ndarray
    admittance: np.ndarray
    fourier: np.ndarray  # F_n for n in [-2M, 2M]

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.max_order, self.max_order + 1)

    @property
    def core_factors(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.core_num / self.core_den

    def fourier_at(self, n):
        return self.fourier[np.asarray(n) + 2 * self.max_order]


def build_kernel(scatterer: Scatterer, k: float, max_order: int,
                 medium: AcousticMedium = AIR,
                 shell_thickness: str = SHELL_HALF_THICKNESS) -> KernelTable:
    n = np.arange(-max_order, max_order + 1)
    ring = scatterer.oriented_ring
    num, den = core_factor_terms(scatterer.core, k, n, medium, shell_thickness)
    adm = _admittance(num, den, k, ring.inner_radius, n, medium)
    f = slit_fourier(ring, np.arange(-2 * max_order, 2 * max_order + 1))
    return KernelTable(max_order, k, num, den, adm, f)
