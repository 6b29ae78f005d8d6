"""Run configuration: YAML documents with a versioned schema, plus shipped presets.

Lengths are metres, frequencies Hz and angles radians.  Any angle may also be
written as a string with a ``deg`` suffix, e.g. ``"45deg"``.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .effective import material_preset
from .kernel import SHELL_FULL_THICKNESS, SHELL_HALF_THICKNESS
from .model import (AcousticMedium, ArrayLayout, ElasticShell, EmptyCore, RigidCore, Scatterer,
                    ShellMaterial, SlitCylinder)

SCHEMA_VERSION = 1
VARIANTS = ("full", "approx", "both")


class ConfigError(ValueError):
    """Malformed configuration document."""


@dataclass
class Sweep:
    f_min: float
    f_max: float
    step: float

    def grid(self) -> np.ndarray:
        if not self.f_min > 0:
            raise ConfigError("sweep.f_min must be positive")
        if not self.step > 0:
            raise ConfigError("sweep.step must be positive")
        if self.f_max < self.f_min:
            raise ConfigError(f"empty sweep range [{self.f_min:g}, {self.f_max:g}]")
        count = int(math.floor((self.f_max - self.f_min) / self.step + 1e-9)) + 1
        return self.f_min + self.step * np.arange(count)


@dataclass
class RunConfig:
    name: str
    medium: AcousticMedium
    scene: Scatterer | ArrayLayout
    receiver: tuple[float, float]
    sweep: Sweep
    max_order: int = 35
    approx_max_order: int = 6
    variant: str = "full"
    shell_thickness: str = SHELL_HALF_THICKNESS
    output: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def is_array(self) -> bool:
        return isinstance(self.scene, ArrayLayout)

    def scatterers(self) -> tuple[Scatterer, ...]:
        return self.scene.scatterers if self.is_array else (self.scene,)

    def metadata(self) -> dict:
        return {"preset": self.name, "provenance": self.provenance,
                "sweep": {"f_min": self.sweep.f_min, "f_max": self.sweep.f_max,
                          "step": self.sweep.step},
                "shell_thickness_convention": self.shell_thickness}


_DEG = re.compile(r"^\s*([-+0-9.eE]+)\s*deg\s*$")


def parse_angle(value) -> float:
    if isinstance(value, str):
        m = _DEG.match(value)
        if not m:
            raise ConfigError(f"cannot read angle {value!r}; use radians or a 'deg' suffix")
        return math.radians(float(m.group(1)))
    return float(value)


def _need(tree: dict, key: str, where: str):
    if not isinstance(tree, dict) or key not in tree:
        raise ConfigError(f"missing '{where}{key}'")
    return tree[key]


def _point(value, where) -> tuple[float, float]:
    try:
        x, y = value
        return float(x), float(y)
    except (TypeError, ValueError):
        raise ConfigError(f"'{where}' must be a pair [x, y]") from None


def _ring(tree) -> SlitCylinder:
    ro = float(_need(tree, "outer_radius", "ring."))
    h = float(_need(tree, "wall_thickness", "ring."))
    slits = tree.get("slits", [])
    if isinstance(slits, dict):
        return SlitCylinder.periodic(ro, h, int(_need(slits, "count", "ring.slits.")),
                                     float(_need(slits, "width", "ring.slits.")),
                                     parse_angle(slits.get("first_center", 0.0)))
    out = []
    for i, s in enumerate(slits):
        centre = parse_angle(_need(s, "center", f"ring.slits[{i}]."))
        if "angular_width" in s:
            phi = parse_angle(s["angular_width"])
        else:
            phi = float(_need(s, "width", f"ring.slits[{i}].")) / ro
        out.append((centre, phi))
    return SlitCylinder(ro, h, tuple(out))


def _material(value, medium) -> ShellMaterial:
    if isinstance(value, str):
        try:
            return material_preset(value, medium)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    if isinstance(value, dict) and "preset" in value:
        try:
            return material_preset(value["preset"], medium, float(value.get("loss_factor", 0.0)))
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    e = float(_need(value, "youngs_modulus", "core.material."))
    eta = float(value.get("loss_factor", 0.0))
    return ShellMaterial(complex(e * (1 - 1j * eta)) if eta else e,
                         float(_need(value, "poisson_ratio", "core.material.")),
                         float(_need(value, "density", "core.material.")),
                         str(value.get("note", "")))


def _core(tree, medium):
    if tree is None:
        return EmptyCore()
    kind = _need(tree, "type", "core.")
    if kind == "empty":
        return EmptyCore()
    if kind == "rigid":
        return RigidCore(float(_need(tree, "radius", "core.")))
    if kind == "shell":
        return ElasticShell(float(_need(tree, "radius", "core.")),
                            float(_need(tree, "thickness", "core.")),
                            _material(_need(tree, "material", "core."), medium))
    raise ConfigError(f"unknown core type {kind!r} (empty, rigid, shell)")


def build_config(doc: dict, name: str = "config") -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    med = doc.get("medium", {}) or {}
    medium = AcousticMedium(float(med.get("sound_speed", 343.0)), float(med.get("density", 1.204)))
    scene = _need(doc, "scene", "")
    ring = _ring(_need(scene, "ring", "scene."))
    core = _core(scene.get("core"), medium)
    orientation = parse_angle(scene.get("orientation", 0.0))
    receiver = _point(_need(scene, "receiver", "scene."), "scene.receiver")
    if "array" in scene:
        arr = scene["array"]
        rows = int(_need(arr, "rows", "scene.array."))
        cols = int(_need(arr, "columns", "scene.array."))
        if rows < 0 or cols < 0:
            raise ConfigError("array rows and columns must be non-negative")
        built = ArrayLayout.rectangular(rows, cols, float(_need(arr, "lattice_constant", "scene.array.")),
                                        _point(_need(arr, "center", "scene.array."), "scene.array.center"),
                                        ring, core, orientation)
    else:
        built = Scatterer(_point(_need(scene, "position", "scene."), "scene.position"),
                          ring, core, orientation)
    sw = _need(doc, "sweep", "")
    sweep = Sweep(float(_need(sw, "f_min", "sweep.")), float(_need(sw, "f_max", "sweep.")),
                  float(_need(sw, "step", "sweep.")))
    solver = doc.get("solver", {}) or {}
    variant = solver.get("variant", "full")
    if variant not in VARIANTS:
        raise ConfigError(f"solver.variant must be one of {VARIANTS}")
    shell = solver.get("shell_thickness", SHELL_HALF_THICKNESS)
    if shell not in (SHELL_HALF_THICKNESS, SHELL_FULL_THICKNESS):
        raise ConfigError("solver.shell_thickness must be 'half' or 'full'")
    return RunConfig(name=str(doc.get("name", name)), medium=medium, scene=built,
                     receiver=receiver, sweep=sweep,
                     max_order=int(solver.get("max_order", 35)),
                     approx_max_order=int(solver.get("approx_max_order", 6)), variant=variant,
                     shell_thickness=shell, output=dict(doc.get("output", {}) or {}),
                     provenance=dict(doc.get("provenance", {}) or {}))


def preset_names() -> list[str]:
    root = resources.files("slitcyl") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_document(name: str) -> dict:
    path = resources.files("slitcyl") / "presets" / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return yaml.safe_load(path.read_text())


def load_document(path) -> dict:
    try:
        return yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_preset(name: str, **overrides) -> RunConfig:
    doc = copy.deepcopy(preset_document(name))
    return build_config(apply_overrides(doc, **overrides), name)


def apply_overrides(doc: dict, *, f_min=None, f_max=None, step=None, max_order=None,
                    variant=None) -> dict:
    doc = copy.deepcopy(doc)
    sweep = doc.setdefault("sweep", {})
    for key, val in (("f_min", f_min), ("f_max", f_max), ("step", step)):
        if val is not None:
            sweep[key] = val
    solver = doc.setdefault("solver", {}) or {}
    doc["solver"] = solver
    if max_order is not None:
        solver["max_order"] = max_order
    if variant is not None:
        solver["variant"] = variant
    return doc


def validate_run(cfg: RunConfig) -> list:
    """Scene violations plus receiver and sweep checks."""
    from .model import Violation, validate

    out = list(validate(cfg.scene, cfg.medium))
    rx, ry = cfg.receiver
    if rx == 0 and ry == 0:
        out.append(Violation("scene.receiver", "coincides with the source"))
    for i, s in enumerate(cfg.scatterers()):
        if math.hypot(rx - s.position[0], ry - s.position[1]) <= s.ring.outer_radius:
            out.append(Violation("scene.receiver", f"inside scatterer {i}"))
    try:
        cfg.sweep.grid()
    except ConfigError as exc:
        out.append(Violation("sweep", str(exc)))
    if cfg.max_order < 1 or cfg.approx_max_order < 1:
        out.append(Violation("solver.max_order", "must be >= 1"))
    return out
