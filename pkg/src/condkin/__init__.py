"""Discrete measure solver for isotropic 3-wave/4-wave kinetic equations with an origin condensate."""
from .dispersion import DispersionModel, DomainError, validate_assumptions
from .grid import ConfigError, GridMeasure, GridSpec, InitProfile, init_measure
from .kernels import KernelParams
from .collision import RateMeasure, apply_r1, apply_r2, apply_r3, total_rhs

__all__ = [
    "ConfigError", "DispersionModel", "DomainError", "GridMeasure", "GridSpec",
    "InitProfile", "KernelParams", "RateMeasure", "apply_r1", "apply_r2", "apply_r3",
    "init_measure", "total_rhs", "validate_assumptions",
]
__version__ = "0.1.0"
