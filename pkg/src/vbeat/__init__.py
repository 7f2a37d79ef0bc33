"""Time-resolved resonance fluorescence from driven two- and three-level emitters."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    Gaussian,
    Square,
    ValidationReport,
    angular_to_energy,
    angular_to_ghz,
    energy_to_angular,
    energy_to_ghz,
    ghz_to_angular,
    ground_state,
    pure_state,
    validate,
)
