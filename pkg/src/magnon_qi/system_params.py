"""Physical device parameters and the derived couplings, cooperativities,
thermal occupancies and entangled bandwidth.

All rates and frequencies are angular (rad/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import DomainError, UnstableRegimeError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34
    boltzmann: float = 1.380649e-23
    light_speed: float = 299792458.0


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class MaterialParams:
    """Magneto-optical material; defaults are YIG."""

    verdet_constant: float = 377.0  # rad/m
    refractive_index: float = 2.19
    spin_density: float = 2.1e28  # 1/m^3

    def __post_init__(self):
        for name in ("verdet_constant", "refractive_index", "spin_density"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be strictly positive, got {value}")


YIG = MaterialParams()


@dataclass(frozen=True)
class SystemParams:
    """Device description. Defaults describe a 100 um YIG sphere pumped at 60 mW.

    ``magnon_frequency`` defaults to resonance with the microwave cavity.
    The bias-field magnon frequency ``gyromagnetic_ratio * bias_field`` is the
    alternative used by the "magnon" occupancy interpretation.
    """

    sphere_radius: float = 100e-6
    pump_power: float = 60e-3
    pump_wavelength: float = 1550e-9
    optical_quality: float = 3e6
    magnon_damping: float = TWO_PI * 1e6
    microwave_damping: float = TWO_PI * 1e6
    electromagnonic_coupling: float = TWO_PI * 40e6
    microwave_frequency: float = TWO_PI * 9e9
    magnon_frequency: float = TWO_PI * 9e9
    bias_field: float = 0.1  # T
    gyromagnetic_ratio: float = TWO_PI * 28e9  # rad/s/T
    environment_temperature: float = 0.030
    optical_thermal_occupancy: float = 0.0
    material: MaterialParams = field(default_factory=MaterialParams)

    def __post_init__(self):
        positive = (
            "sphere_radius", "pump_power", "pump_wavelength", "optical_quality",
            "magnon_damping", "microwave_damping", "electromagnonic_coupling",
            "microwave_frequency", "magnon_frequency", "bias_field", "gyromagnetic_ratio",
        )
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be strictly positive, got {value}")
        if not self.environment_temperature >= 0.0:
            raise DomainError("environment_temperature must be >= 0")
        if not self.optical_thermal_occupancy >= 0.0:
            raise DomainError("optical_thermal_occupancy must be >= 0")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def pump_frequency(self) -> float:
        return TWO_PI * CONSTANTS.light_speed / self.pump_wavelength

    @property
    def optical_damping(self) -> float:
        return wgm_damping(self.pump_wavelength, self.optical_quality)

    @property
    def kappas(self) -> tuple:
        """(kappa_a, kappa_b, kappa_m)."""
        return (self.optical_damping, self.microwave_damping, self.magnon_damping)

    @property
    def bias_magnon_frequency(self) -> float:
        return self.gyromagnetic_ratio * self.bias_field

    @property
    def microwave_bath_occupancy(self) -> float:
        return planck_occupation(self.microwave_frequency, self.environment_temperature)

    @property
    def magnon_bath_occupancy(self) -> float:
        """Occupancy of the magnon bath at the bias-field magnon frequency."""
        return planck_occupation(self.bias_magnon_frequency, self.environment_temperature)

    def intermediary_occupancy(self, interpretation: str = "microwave") -> float:
        """Thermal occupancy of the magnon input noise.

        ``"microwave"``: evaluated at ``magnon_frequency`` (resonant with the
        cavity by default). ``"magnon"``: evaluated at the bias-field frequency.
        """
        if interpretation == "microwave":
            return planck_occupation(self.magnon_frequency, self.environment_temperature)
        if interpretation == "magnon":
            return self.magnon_bath_occupancy
        raise DomainError(f"unknown occupancy interpretation {interpretation!r}")

    def baths(self, interpretation: str = "microwave") -> tuple:
        """(n_a^T, n_b^T, n_m^T) input-noise occupancies."""
        return (
            self.optical_thermal_occupancy,
            self.microwave_bath_occupancy,
            self.intermediary_occupancy(interpretation),
        )


@dataclass(frozen=True)
class Cooperativities:
    lambda_a: float
    lambda_b: float
    optomagnonic_enhanced: float = float("nan")  # G_ma, rad/s, when known

    def __post_init__(self):
        if not (self.lambda_a >= 0.0 and self.lambda_b >= 0.0):
            raise DomainError(f"cooperativities must be >= 0, got {self.lambda_a}, {self.lambda_b}")

    @property
    def denominator(self) -> float:
        """1 + Lambda_b - Lambda_a; positive in the stable regime."""
        return 1.0 + self.lambda_b - self.lambda_a


def planck_occupation(frequency: float, temperature: float) -> float:
    """Bose-Einstein mean occupancy 1/(exp(hbar*omega/kT) - 1) for angular ``frequency``."""
    if not (math.isfinite(frequency) and frequency > 0.0):
        raise DomainError(f"frequency must be > 0, got {frequency}")
    if not temperature >= 0.0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = CONSTANTS.hbar * frequency / (CONSTANTS.boltzmann * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def wgm_damping(pump_wavelength: float, optical_quality: float) -> float:
    """kappa_a = omega_p / Q."""
    if not (pump_wavelength > 0.0 and optical_quality > 0.0):
        raise DomainError("pump_wavelength and optical_quality must be positive")
    return TWO_PI * CONSTANTS.light_speed / pump_wavelength / optical_quality


def optomagnonic_coupling(material: MaterialParams, sphere_radius: float) -> float:
    """Single-photon optomagnonic coupling g_ma of a sphere of given radius."""
    if not sphere_radius > 0.0:
        raise DomainError(f"sphere_radius must be positive, got {sphere_radius}")
    volume = 4.0 * math.pi / 3.0 * sphere_radius ** 3
    return (
        material.verdet_constant
        * CONSTANTS.light_speed / material.refractive_index
        * math.sqrt(2.0 / (material.spin_density * volume))
    )


def intracavity_pump_photons(pump_power: float, pump_wavelength: float, kappa_a: float) -> float:
    """N_TE = (2/kappa_a) * P_p / (hbar * omega_p)."""
    if not (pump_power > 0.0 and pump_wavelength > 0.0 and kappa_a > 0.0):
        raise DomainError("pump_power, pump_wavelength and kappa_a must be positive")
    omega_p = TWO_PI * CONSTANTS.light_speed / pump_wavelength
    return 2.0 / kappa_a * pump_power / (CONSTANTS.hbar * omega_p)


def cooperativity(coupling: float, kappa_1: float, kappa_2: float) -> float:
    """g^2 / (kappa_1 kappa_2)."""
    if not (kappa_1 > 0.0 and kappa_2 > 0.0):
        raise DomainError("damping rates must be positive")
    return coupling * coupling / (kappa_1 * kappa_2)


def cooperativities(params: SystemParams, material: MaterialParams | None = None) -> Cooperativities:
    material = params.material if material is None else material
    kappa_a, kappa_b, kappa_m = params.kappas
    g_ma = optomagnonic_coupling(material, params.sphere_radius)
    n_te = intracavity_pump_photons(params.pump_power, params.pump_wavelength, kappa_a)
    big_g = g_ma * math.sqrt(n_te)
    return Cooperativities(
        lambda_a=cooperativity(big_g, kappa_a, kappa_m),
        lambda_b=cooperativity(params.electromagnonic_coupling, kappa_b, kappa_m),
        optomagnonic_enhanced=big_g,
    )


def entangled_bandwidth(kappa_m: float, coop: Cooperativities) -> float:
    """W = kappa_m (Lambda_b - Lambda_a + 1)."""
    d = coop.denominator
    if not d > 0.0:
        raise UnstableRegimeError(f"1 + Lambda_b - Lambda_a = {d} <= 0: no steady-state bandwidth")
    return kappa_m * d
