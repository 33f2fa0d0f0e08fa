"""Magnon-mediated microwave-optical entanglement source and its
quantum-illumination performance.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConventionError,
    DomainError,
    MagnonQIError,
    NumericalError,
    UnstableRegimeError,
)
from .system_params import CONSTANTS, YIG, Cooperativities, SystemParams, cooperativities  # noqa: E402
from .converter import output_coefficients, output_coefficients_resonant, is_stable  # noqa: E402
from .gaussian import output_moments, resource_report, covariance_matrix  # noqa: E402
from .detection import DetectionScenario, evaluate_detection  # noqa: E402

__all__ = [
    "__version__",
    "CONSTANTS",
    "ConfigError",
    "ConventionError",
    "Cooperativities",
    "DetectionScenario",
    "DomainError",
    "MagnonQIError",
    "NumericalError",
    "SystemParams",
    "UnstableRegimeError",
    "YIG",
    "cooperativities",
    "covariance_matrix",
    "evaluate_detection",
    "is_stable",
    "output_coefficients",
    "output_coefficients_resonant",
    "output_moments",
    "resource_report",
]
