"""Geometry, media and materials shared by the solvers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class GeometryError(ValueError):
    """Raised when a configuration cannot be solved as given."""


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class AcousticMedium:
    """Ambient fluid; the same everywhere (exterior, cavity, slits)."""

    sound_speed: float = 343.0
    density: float = 1.204

    def wavenumber(self, frequency: float) -> float:
        return 2.0 * math.pi * frequency / self.sound_speed


AIR = AcousticMedium()


@dataclass(frozen=True)
class SlitCylinder:
    """Thin rigid cylinder of outer radius ``outer_radius`` with axial slits.

    ``slits`` holds ``(center_angle, angular_width)`` pairs in radians.  The
    slit width along the wall is ``angular_width * outer_radius``.
    """

    outer_radius: float
    wall_thickness: float
    slits: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slits", tuple((float(c), float(w)) for c, w in self.slits))

    @classmethod
    def periodic(cls, outer_radius, wall_thickness, count, slit_width, first_center=0.0):
        """``count`` identical slits of width ``slit_width`` (m), equally spaced."""
        phi = slit_width / outer_radius
        slits = tuple((first_center + 2.0 * math.pi * l / count, phi) for l in range(count))
        return cls(outer_radius, wall_thickness, slits)

    @property
    def inner_radius(self) -> float:
        return self.outer_radius - self.wall_thickness

    @property
    def count(self) -> int:
        return len(self.slits)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c for c, _ in self.slits], dtype=float)

    @property
    def angular_widths(self) -> np.ndarray:
        return np.array([w for _, w in self.slits], dtype=float)

    @property
    def slit_widths(self) -> np.ndarray:
        return self.angular_widths * self.outer_radius

    def rotated(self, angle: float) -> "SlitCylinder":
        return SlitCylinder(self.outer_radius, self.wall_thickness,
                            tuple((c + angle, w) for c, w in self.slits))

    def scaled(self, factor: float) -> "SlitCylinder":
        """Uniform scaling of radius and wall; slit angles are kept."""
        return SlitCylinder(self.outer_radius * factor, self.wall_thickness * factor, self.slits)

    def is_periodic_identical(self, tol: float = 1e-9) -> bool:
        if self.count == 0:
            return True
        w = self.angular_widths
        if np.ptp(w) > tol * max(1.0, w.max()):
            return False
        steps = np.diff(np.sort(np.mod(self.centers, 2 * math.pi)))
        expected = 2 * math.pi / self.count
        return bool(np.all(np.abs(steps - expected) < 1e-7))


@dataclass(frozen=True)
class ShellMaterial:
    """Thin elastic shell material; ``youngs_modulus`` may be complex (loss)."""

    youngs_modulus: complex
    poisson_ratio: float
    density: float
    note: str = ""


@dataclass(frozen=True)
class EmptyCore:
    pass


@dataclass(frozen=True)
class RigidCore:
    radius: float


@dataclass(frozen=True)
class ElasticShell:
    """Thin shell with outer radius ``outer_radius`` and thickness ``thickness`` (= 2 h_s)."""

    outer_radius: float
    thickness: float
    material: ShellMaterial

    @property
    def inner_radius(self) -> float:
        return self.outer_radius - self.thickness

    @property
    def mid_radius(self) -> float:
        return 0.5 * (self.outer_radius + self.inner_radius)

    @property
    def half_thickness(self) -> float:
        return 0.5 * self.thickness


CoreSpec = Union[EmptyCore, RigidCore, ElasticShell]


@dataclass(frozen=True)
class Scatterer:
    position: tuple[float, float]
    ring: SlitCylinder
    core: CoreSpec = field(default_factory=EmptyCore)
    orientation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))

    @property
    def oriented_ring(self) -> SlitCylinder:
        return self.ring.rotated(self.orientation) if self.orientation else self.ring

    @property
    def distance(self) -> float:
        return math.hypot(*self.position)

    @property
    def angle(self) -> float:
        return math.atan2(self.position[1], self.position[0])


@dataclass(frozen=True)
class ArrayLayout:
    scatterers: tuple[Scatterer, ...]

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))

    def __len__(self):
        return len(self.scatterers)

    @classmethod
    def rectangular(cls, rows, columns, lattice_constant, center, ring, core=None, orientation=0.0):
        """Square lattice: ``rows`` along x (towards the receiver), ``columns`` along y."""
        core = EmptyCore() if core is None else core
        cx, cy = center
        out = []
        for i in range(rows):
            x = cx + (i - (rows - 1) / 2) * lattice_constant
            for j in range(columns):
                y = cy + (j - (columns - 1) / 2) * lattice_constant
                out.append(Scatterer((x, y), ring, core, orientation))
        return cls(tuple(out))

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.scatterers], dtype=float).reshape(-1, 2)


def dilatational_speed(material: ShellMaterial) -> complex | float:
    """Plate (dilatational) wave speed sqrt(E / (rho_s (1 - nu^2)))."""
    nu2 = material.poisson_ratio ** 2
    if nu2 >= 1:
        raise ValueError("Poisson ratio must satisfy nu^2 < 1")
    e = material.youngs_modulus
    if isinstance(e, complex) and e.imag != 0:
        # principal root: Im(c_s) < 0 when Im(E) < 0
        return complex(np.sqrt(complex(e) / (material.density * (1 - nu2))))
    return math.sqrt(float(np.real(e)) / (material.density * (1 - nu2)))


def filling_fraction(ring: SlitCylinder) -> float:
    """Open fraction of the circumference, N d / (2 pi r_o)."""
    if ring.count == 0:
        return 0.0
    w = ring.angular_widths
    if np.ptp(w) > 1e-9 * w.max():
        raise UnsupportedConfigurationError("filling fraction needs identical slit widths")
    return float(ring.count * w[0] / (2 * math.pi))


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


def _ring_violations(ring: SlitCylinder, prefix: str) -> list[Violation]:
    out = []
    if not ring.outer_radius > 0:
        out.append(Violation(f"{prefix}.outer_radius", "must be > 0"))
    if not ring.wall_thickness > 0:
        out.append(Violation(f"{prefix}.wall_thickness", "must be > 0"))
    elif ring.outer_radius > 0:
        if ring.wall_thickness >= ring.outer_radius:
            out.append(Violation(f"{prefix}.wall_thickness", "must be < outer_radius"))
        elif ring.wall_thickness / ring.outer_radius > 0.2:
            warnings.warn(f"{prefix}: h/r_o = {ring.wall_thickness / ring.outer_radius:.3g} "
                          "exceeds 0.2; the thin-wall model is unreliable", stacklevel=3)
    for i, (_, w) in enumerate(ring.slits):
        if not w > 0:
            out.append(Violation(f"{prefix}.slits[{i}]", "angular width must be > 0"))
    if ring.count:
        total = float(np.sum(ring.angular_widths))
        if total >= 2 * math.pi:
            out.append(Violation(f"{prefix}.slits", "slits cover the whole circumference"))
    # pairwise overlap on the circle
    for i in range(ring.count):
        for j in range(i + 1, ring.count):
            ci, wi = ring.slits[i]
            cj, wj = ring.slits[j]
            gap = abs((ci - cj + math.pi) % (2 * math.pi) - math.pi)
            if gap < 0.5 * (wi + wj):
                out.append(Violation(f"{prefix}.slits[{i},{j}]", "slits overlap"))
    return out


def _core_violations(core, ring: SlitCylinder, prefix: str) -> list[Violation]:
    out = []
    ri = ring.inner_radius
    if isinstance(core, RigidCore):
        if not core.radius > 0:
            out.append(Violation(f"{prefix}.radius", "must be > 0"))
        if core.radius >= ri:
            out.append(Violation(f"{prefix}.radius", f"core radius must be < inner radius {ri:g}"))
    elif isinstance(core, ElasticShell):
        if core.outer_radius >= ri:
            out.append(Violation(f"{prefix}.outer_radius", f"shell radius must be < inner radius {ri:g}"))
        if not 0 < core.thickness < core.outer_radius:
            out.append(Violation(f"{prefix}.thickness", "must satisfy 0 < 2h_s < a_1"))
        elif core.half_thickness / core.mid_radius > 0.1:
            warnings.warn(f"{prefix}: h_s/R exceeds 0.1; the membrane shell model is unreliable",
                          stacklevel=3)
        m = core.material
        if not m.density > 0:
            out.append(Violation(f"{prefix}.material.density", "must be > 0"))
        if not abs(m.poisson_ratio) < 0.5 + 1e-6:
            out.append(Violation(f"{prefix}.material.poisson_ratio", "|nu| must be < 0.5"))
        if not np.real(m.youngs_modulus) > 0:
            out.append(Violation(f"{prefix}.material.youngs_modulus", "Re(E) must be > 0"))
    elif not isinstance(core, EmptyCore):
        out.append(Violation(prefix, f"unknown core type {type(core).__name__}"))
    return out


def validate(config, medium: AcousticMedium | None = None) -> list[Violation]:
    """Collect every invariant violation of ``config`` (never raises).

    ``config`` may be a medium, ring, scatterer or array layout.
    """
    out: list[Violation] = []
    if medium is not None:
        out += validate(medium)
    if isinstance(config, AcousticMedium):
        if not config.sound_speed > 0:
            out.append(Violation("medium.sound_speed", "must be > 0"))
        if not config.density > 0:
            out.append(Violation("medium.density", "must be > 0"))
    elif isinstance(config, SlitCylinder):
        out += _ring_violations(config, "ring")
    elif isinstance(config, Scatterer):
        out += _scatterer_violations(config, "scatterer")
    elif isinstance(config, ArrayLayout):
        if len(config) == 0:
            out.append(Violation("array.scatterers", "layout is empty"))
        for i, s in enumerate(config.scatterers):
            out += _scatterer_violations(s, f"array.scatterers[{i}]")
        pos = config.positions()
        for i in range(len(config)):
            for j in range(i + 1, len(config)):
                d = float(np.hypot(*(pos[i] - pos[j])))
                lim = config.scatterers[i].ring.outer_radius + config.scatterers[j].ring.outer_radius
                if d <= lim:
                    out.append(Violation(f"array.scatterers[{i},{j}]", "scatterers overlap"))
    else:
        out.append(Violation("config", f"cannot validate {type(config).__name__}"))
    return out


def _scatterer_violations(s: Scatterer, prefix: str) -> list[Violation]:
    out = _ring_violations(s.ring, f"{prefix}.ring")
    out += _core_violations(s.core, s.ring, f"{prefix}.core")
    if s.distance <= s.ring.outer_radius:
        out.append(Violation(f"{prefix}.position", "source (origin) lies inside the scatterer"))
    return out
