"""Low-frequency model: the slitted wall as an equivalent fluid annulus.

The layer keeps the physical wall thickness; its sound speed and density
follow from matching plane-wave transmission through a slotted plate:

    c_l = c h / (h + 2 Delta),    rho_l = rho (h + 2 Delta) / (h F),

with ``F`` the filling fraction and ``Delta`` the slit end correction.
Closed-form resonance estimates for the n = 0 mode live here as well.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .kernel import SHELL_HALF_THICKNESS, KernelPoleError, core_factor_terms
from .model import (AIR, AcousticMedium, ElasticShell, EmptyCore, RigidCore, Scatterer,
                    ShellMaterial, SlitCylinder, UnsupportedConfigurationError,
                    dilatational_speed, filling_fraction)
from .single import ModalSolution, incident_coefficients
from .special import cylinder_table

LAMB = "lamb"
SERIES = "series"


def _periodic_slit_width(ring: SlitCylinder) -> float:
    if ring.count == 0:
        raise UnsupportedConfigurationError("the fluid-layer model needs at least one slit")
    if not ring.is_periodic_identical():
        raise UnsupportedConfigurationError(
            "the fluid-layer model needs identical, equally spaced slits")
    return float(ring.slit_widths[0])


def end_correction(ring: SlitCylinder, method: str = LAMB) -> float:
    """Slit end correction (m).

    ``"lamb"``: ``(d/pi) log(1/sin(pi F/2))``, the lower estimate.
    ``"series"``: ``d/(F^2 pi^3) sum_n sin(F pi n)/n^3``.
    """
    d = _periodic_slit_width(ring)
    ff = filling_fraction(ring)
    if not 0 < ff < 1:
        raise ValueError(f"filling fraction {ff:g} outside (0, 1)")
    if method == LAMB:
        return d / math.pi * math.log(1.0 / math.sin(math.pi * ff / 2))
    if method == SERIES:
        return d / (ff * ff * math.pi ** 3) * _sine_cube_series(math.pi * ff)
    raise ValueError(f"unknown end-correction method {method!r}")


def _sine_cube_series(a: float, rtol: float = 1e-10) -> float:
    # tail sum_{n>K} 1/n^3 < 1/(2 K^2)
    total = 0.0
    start, block = 1, 4096
    while True:
        n = np.arange(start, start + block, dtype=float)
        total += float(np.sum(np.sin(a * n) / n ** 3))
        last = start + block - 1
        if 1.0 / (2.0 * last * last) < rtol * abs(total):
            return total
        start += block
        block *= 2


@dataclass(frozen=True)
class FluidLayer:
    sound_speed: float
    density: float
    inner_radius: float
    outer_radius: float
    end_correction: float
    filling_fraction: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def thickness(self) -> float:
        return self.outer_radius - self.inner_radius

    def wavenumber(self, frequency: float) -> float:
        return 2 * math.pi * frequency / self.sound_speed

    def relative_impedance(self, medium: AcousticMedium = AIR) -> float:
        return self.density * self.sound_speed / (medium.density * medium.sound_speed)


def layer_parameters(ring: SlitCylinder, medium: AcousticMedium = AIR,
                     end_correction_method: str = LAMB) -> FluidLayer:
    ff = filling_fraction(ring)
    delta = end_correction(ring, end_correction_method)
    h = ring.wall_thickness
    notes = []
    if ff >= 0.25:
        notes.append(f"filling fraction {ff:.3g} >= 1/4: outside the fluid-layer validity range")
        warnings.warn(notes[-1], stacklevel=2)
    return FluidLayer(
        sound_speed=medium.sound_speed * h / (h + 2 * delta),
        density=medium.density * (h + 2 * delta) / (h * ff),
        inner_radius=ring.inner_radius,
        outer_radius=ring.outer_radius,
        end_correction=delta,
        filling_fraction=ff,
        warnings=tuple(notes),
    )


def validity_flags(layer: FluidLayer, medium: AcousticMedium, frequency: float) -> list[str]:
    flags = list(layer.warnings)
    lam = medium.sound_speed / frequency
    if not lam > layer.filling_fraction:
        flags.append("wavelength condition lambda > F violated")
    kh = medium.wavenumber(frequency) * layer.thickness
    if kh > 0.3:
        flags.append(f"kh = {kh:.3g} > 0.3")
    return flags


def layer_transmission(layer: FluidLayer, medium: AcousticMedium, frequency: float) -> complex:
    """Normal-incidence transmission coefficient of a homogeneous fluid plate."""
    k = medium.wavenumber(frequency)
    kl = layer.wavenumber(frequency)
    h = layer.thickness
    zi = 1.0 / layer.relative_impedance(medium)
    num = 4 * zi * np.exp(-1j * k * h)
    den = (1 + zi) ** 2 * np.exp(-1j * kl * h) - (1 - zi) ** 2 * np.exp(1j * kl * h)
    return complex(num / den)


def perforated_transmission(ring: SlitCylinder, medium: AcousticMedium, frequency: float,
                            end_correction_method: str = LAMB) -> complex:
    """Transmission coefficient of a slotted plate with the ring's slit pattern.

    Uses the slit admittance ``F - i k Delta``; it reduces to unity as
    ``k -> 0`` and to ``e^{-ikh} F / (F - i k h (1 + F^2 + 2 Delta/h) / 2)``
    up to second order in ``k``.
    """
    k = medium.wavenumber(frequency)
    h = ring.wall_thickness
    ff = filling_fraction(ring)
    z = ff - 1j * k * end_correction(ring, end_correction_method)
    num = 4 * ff * np.exp(-1j * k * h)
    den = (1 + z) ** 2 * np.exp(-1j * k * h) - (1 - z) ** 2 * np.exp(1j * k * h)
    return complex(num / den)


def _layer_terms(layer: FluidLayer, core, k, orders, medium, shell_thickness):
    """Bessel combinations shared by the coefficient and the eigen-condition."""
    rho = medium.density
    rl = layer.density
    kl = k * medium.sound_speed / layer.sound_speed
    ri, ro = layer.inner_radius, layer.outer_radius
    M = int(np.abs(orders).max())
    idx = orders + M
    num, den = core_factor_terms(core, k, orders, medium, shell_thickness)
    ti = cylinder_table(M, k * ri)
    tli = cylinder_table(M, kl * ri)
    tlo = cylinder_table(M, kl * ro)
    J, Y = ti.j[idx], ti.y[idx]
    dJ, dY = k * ti.dj[idx], k * ti.dy[idx]
    Jl, Yl = tli.j[idx], tli.y[idx]
    dJl, dYl = kl * tli.dj[idx], kl * tli.dy[idx]
    # W1, W2 scaled by the core-factor denominator (c_n = -num/den)
    w1 = -(-rho * dYl * Y + rl * Yl * dY) * num + (rl * dJ * Yl - rho * J * dYl) * den
    w2 = -(rho * dJl * Y - rl * Jl * dY) * num + (-rl * dJ * Jl + rho * J * dJl) * den
    u = w1 * tlo.j[idx] + w2 * tlo.y[idx]  # W1 W3
    v = w1 * kl * tlo.dj[idx] + w2 * kl * tlo.dy[idx]
    return u, v


def approx_scattering_coefficient(layer: FluidLayer, core, k: float, n,
                                  medium: AcousticMedium = AIR,
                                  shell_thickness: str = SHELL_HALF_THICKNESS):
    """Layered-cylinder coefficient ``Z_n`` with ``A_n = -Z_n a_n``."""
    scalar = np.ndim(n) == 0
    orders = np.atleast_1d(np.asarray(n, dtype=int))
    u, v = _layer_terms(layer, core, k, orders, medium, shell_thickness)
    M = int(np.abs(orders).max())
    t = cylinder_table(M, k * layer.outer_radius)
    idx = orders + M
    rho, rl = medium.density, layer.density
    top = rl * u * k * t.dj[idx] - rho * t.j[idx] * v
    bottom = rl * u * k * t.dh[idx] - rho * t.h[idx] * v
    bad = ~np.isfinite(bottom) | (bottom == 0)
    if np.any(bad):
        raise KernelPoleError("layered-cylinder coefficient", int(orders[bad][0]),
                              k * medium.sound_speed / (2 * math.pi))
    z = top / bottom
    return z[0] if scalar else z


def approx_modal(scatterer: Scatterer, k: float, max_order: int = 6,
                 medium: AcousticMedium = AIR,
                 shell_thickness: str = SHELL_HALF_THICKNESS,
                 end_correction_method: str = LAMB) -> ModalSolution:
    """Single-scatterer coefficients of the fluid-layer model (no linear solve)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        layer = layer_parameters(scatterer.ring, medium, end_correction_method)
    n = np.arange(-max_order, max_order + 1)
    z = approx_scattering_coefficient(layer, scatterer.core, k, n, medium, shell_thickness)
    a = incident_coefficients(scatterer.position, k, max_order)
    f = k * medium.sound_speed / (2 * math.pi)
    return ModalSolution(max_order, -z * a, k, scatterer.position, scatterer.ring.outer_radius,
                         scatterer, "approx", {"validity": validity_flags(layer, medium, f)})


def n0_eigenfrequencies(scatterer: Scatterer, f_lo: float, f_hi: float,
                        medium: AcousticMedium = AIR, step: float = 1.0,
                        shell_thickness: str = SHELL_HALF_THICKNESS) -> list[float]:
    """Real zeros of the n = 0 layered-cylinder denominator with H_0 -> Y_0.

    A numeric cross-check on the closed-form resonance estimates.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        layer = layer_parameters(scatterer.ring, medium)
    rho, rl = medium.density, layer.density
    zero = np.array([0])

    def g(f):
        k = medium.wavenumber(f)
        u, v = _layer_terms(layer, scatterer.core, k, zero, medium, shell_thickness)
        t = cylinder_table(0, k * layer.outer_radius)
        return float(np.real(rl * u[0] * k * t.dy[0] - rho * t.y[0] * v[0]))

    grid = np.arange(f_lo, f_hi + step, step)
    vals = np.array([g(f) for f in grid])
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        out.append(brentq(g, grid[i], grid[i + 1], xtol=1e-9))
    return out


class HelmholtzEstimate(NamedTuple):
    log_form: float
    thin_wall: float


def helmholtz_resonance(ring: SlitCylinder, core_radius: float = 0.0,
                        medium: AcousticMedium = AIR,
                        end_correction_method: str = LAMB) -> HelmholtzEstimate:
    """n = 0 Helmholtz resonance (Hz) of an empty or rigid-core slit cylinder.

    ``log_form`` keeps ``log(r_o/r_i)``; ``thin_wall`` uses ``log(r_o/r_i) ~ h/r_i``,
    ``f = (c/2 pi) sqrt(N d / (pi (r_i^2 - a_1^2)(h + 2 Delta)))``.
    """
    ri, ro = ring.inner_radius, ring.outer_radius
    if core_radius >= ri:
        raise ValueError("core radius must be smaller than the inner radius")
    area = ri * ri - core_radius * core_radius
    layer = layer_parameters(ring, medium, end_correction_method)
    c = medium.sound_speed
    f_log = c / (2 * math.pi) * math.sqrt(
        2 * medium.density / (layer.density * area * math.log(ro / ri)))
    d = _periodic_slit_width(ring)
    f_thin = c / (2 * math.pi) * math.sqrt(
        ring.count * d / (math.pi * area * (ring.wall_thickness + 2 * layer.end_correction)))
    return HelmholtzEstimate(f_log, f_thin)


def shell_axisymmetric_resonance(shell: ElasticShell, medium: AcousticMedium = AIR) -> float:
    """Breathing resonance of a fluid-loaded thin shell, ``(c/2 pi R) sqrt(c_s^2/c^2 + (R/h_s)(rho/rho_s))``."""
    R, hs = shell.mid_radius, shell.half_thickness
    cs = dilatational_speed(shell.material)
    c = medium.sound_speed
    val = np.sqrt(cs * cs / (c * c) + R / hs * medium.density / shell.material.density)
    return float(np.real(c / (2 * math.pi * R) * val))


def coupled_resonances(ring: SlitCylinder, shell: ElasticShell,
                       medium: AcousticMedium = AIR,
                       end_correction_method: str = LAMB) -> tuple[float, float]:
    """Both n = 0 resonances of the slit cylinder + shell composite, ascending."""
    layer = layer_parameters(ring, medium, end_correction_method)
    ri, ro = ring.inner_radius, ring.outer_radius
    R, hs = shell.mid_radius, shell.half_thickness
    c, rho = medium.sound_speed, medium.density
    rs = shell.material.density
    cs2 = float(np.real(dilatational_speed(shell.material) ** 2))
    lg = math.log(ro / ri)
    a = (rho / rs * ri * ri + cs2 / (c * c) * hs / R * (ri * ri - R * R)) * lg
    b = 2 * rho / layer.density * hs * R
    disc = (a - b) ** 2 + 8 * rho / layer.density * rho / rs * hs * R ** 3 * lg
    denom = 2 * hs * R * (ri * ri - R * R) * lg
    roots = []
    for sign in (-1.0, 1.0):
        val = (a + b + sign * math.sqrt(disc)) / denom
        if val < 0:
            raise ArithmeticError("negative radicand: parameters outside the asymptotic regime")
        roots.append(c / (2 * math.pi) * math.sqrt(val))
    return roots[0], roots[1]


def calibrate_shell_modulus(target_hz: float, outer_radius: float, thickness: float,
                            density: float, poisson_ratio: float,
                            medium: AcousticMedium = AIR) -> float:
    """Young's modulus that puts the breathing resonance at ``target_hz``."""
    probe = ShellMaterial(1.0, poisson_ratio, density)
    geom = ElasticShell(outer_radius, thickness, probe)

    def resid(log_e):
        mat = ShellMaterial(math.exp(log_e), poisson_ratio, density)
        return shell_axisymmetric_resonance(ElasticShell(outer_radius, thickness, mat), medium) - target_hz

    if shell_axisymmetric_resonance(geom, medium) >= target_hz:
        raise ValueError("target below the pure air-loading resonance; no positive modulus")
    return math.exp(brentq(resid, math.log(1.0), math.log(1e12), xtol=1e-14, rtol=1e-14))


# geometry of the latex shells: a_1 = 0.02 m, 2 h_s = 0.25 mm
LATEX_OUTER_RADIUS = 0.02
LATEX_THICKNESS = 0.00025
LATEX_DENSITY = 1100.0
LATEX_POISSON = 0.4997
LATEX_TARGET_HZ = 1270.0


def latex_paper_material(medium: AcousticMedium = AIR, loss_factor: float = 0.0) -> ShellMaterial:
    """Latex preset: modulus fixed so the bare-shell breathing mode sits at 1270 Hz."""
    e = calibrate_shell_modulus(LATEX_TARGET_HZ, LATEX_OUTER_RADIUS, LATEX_THICKNESS,
                                LATEX_DENSITY, LATEX_POISSON, medium)
    note = (f"rho_s={LATEX_DENSITY:g} kg/m^3 and nu={LATEX_POISSON:g} assumed; E calibrated "
            f"to a {LATEX_TARGET_HZ:g} Hz breathing resonance for a_1={LATEX_OUTER_RADIUS:g} m, "
            f"2h_s={LATEX_THICKNESS:g} m")
    modulus = complex(e * (1 - 1j * loss_factor)) if loss_factor else e
    return ShellMaterial(modulus, LATEX_POISSON, LATEX_DENSITY, note)


MATERIAL_PRESETS = {"latex-paper": latex_paper_material}


def material_preset(name: str, medium: AcousticMedium = AIR, loss_factor: float = 0.0) -> ShellMaterial:
    try:
        return MATERIAL_PRESETS[name](medium, loss_factor)
    except KeyError:
        raise KeyError(f"unknown material preset {name!r}; known: {sorted(MATERIAL_PRESETS)}") from None


def resonance_table(scatterer: Scatterer, medium: AcousticMedium = AIR):
    """Rows ``(estimator, formula, hz)`` for the scatterer's core type."""
    ring = scatterer.ring
    core = scatterer.core
    rows = []
    if isinstance(core, (EmptyCore, RigidCore)):
        a1 = core.radius if isinstance(core, RigidCore) else 0.0
        est = helmholtz_resonance(ring, a1, medium)
        rows.append(("helmholtz_log", "(c/2pi) sqrt(2 rho / (rho_l (r_i^2-a_1^2) log(r_o/r_i)))", est.log_form))
        rows.append(("helmholtz_thin_wall", "(c/2pi) sqrt(N d / (pi (r_i^2-a_1^2)(h+2 Delta)))", est.thin_wall))
        if ring.count > 1:
            single = SlitCylinder.periodic(ring.outer_radius, ring.wall_thickness, 1,
                                           float(ring.slit_widths[0]))
            one = helmholtz_resonance(single, a1, medium).thin_wall
            rows.append(("helmholtz_thin_wall_N1", f"same, N=1; ratio {est.thin_wall / one:.4g} "
                         f"vs sqrt(N)={math.sqrt(ring.count):.4g}", one))
    elif isinstance(core, ElasticShell):
        lo, hi = coupled_resonances(ring, core, medium)
        rows.append(("coupled_low", "composite n=0 resonance, lower root", lo))
        rows.append(("coupled_high", "composite n=0 resonance, upper root", hi))
        rows.append(("shell_breathing", "(c/2pi R) sqrt(c_s^2/c^2 + (R/h_s)(rho/rho_s))",
                     shell_axisymmetric_resonance(core, medium)))
    return rows
