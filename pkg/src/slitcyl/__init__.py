"""Sound scattering by cylinders with thin longitudinal slits, singly and in arrays."""

from .array import ArrayModalSolution, array_il_spectrum, solve_array
from .effective import (approx_modal, coupled_resonances, end_correction, helmholtz_resonance,
                        layer_parameters, shell_axisymmetric_resonance)
from .model import (AIR, AcousticMedium, ArrayLayout, ElasticShell, EmptyCore, GeometryError,
                    RigidCore, Scatterer, ShellMaterial, SlitCylinder, validate)
from .single import ModalSolution, il_spectrum, insertion_loss, solve_modal
from .spectrum import Spectrum, find_peaks

__all__ = [
    "AIR", "AcousticMedium", "ArrayLayout", "ArrayModalSolution", "ElasticShell", "EmptyCore",
    "GeometryError", "ModalSolution", "RigidCore", "Scatterer", "ShellMaterial", "SlitCylinder",
    "Spectrum", "approx_modal", "array_il_spectrum", "coupled_resonances", "end_correction",
    "find_peaks", "helmholtz_resonance", "il_spectrum", "insertion_loss", "layer_parameters",
    "shell_axisymmetric_resonance", "solve_array", "solve_modal", "validate",
]
