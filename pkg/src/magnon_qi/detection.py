"""Quantum-illumination round trip with a phase-conjugate receiver, and the
coherent-state (classical) baseline.

The receiver is modelled at resonance only, with n_T / (1 - eta) ~ n_T.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .converter import ConverterCoefficients, output_coefficients_resonant
from .core_math import erfc
from .errors import ConventionError, DomainError
from .gaussian import OutputMoments, output_moments
from .system_params import Cooperativities

MAX_EXACT_MODES = 2 ** 53


@dataclass(frozen=True)
class DetectionScenario:
    eta: float
    background_occupancy: float
    mode_count: int = 1
    baths: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise DomainError(f"eta must lie in [0, 1), got {self.eta}")
        if self.eta > 0.5:
            warnings.warn(f"eta={self.eta} is not a low-reflectivity target; "
                          "the n_T/(1-eta) ~ n_T approximation degrades", stacklevel=2)
        if not self.background_occupancy >= 0.0:
            raise DomainError("background_occupancy must be >= 0")
        if int(self.mode_count) != self.mode_count or not 1 <= self.mode_count <= MAX_EXACT_MODES:
            raise DomainError(f"mode_count must be an integer in [1, 2^53], got {self.mode_count}")
        if len(self.baths) != 3 or min(self.baths) < 0.0:
            raise DomainError(f"baths must be three occupancies >= 0, got {self.baths}")
        object.__setattr__(self, "mode_count", int(self.mode_count))
        object.__setattr__(self, "baths", tuple(float(b) for b in self.baths))


@dataclass(frozen=True)
class ReceiverMoments:
    mean_plus_h0: float
    mean_minus_h0: float
    mean_plus_h1: float
    mean_minus_h1: float
    var_h0: float
    var_h1: float
    converted_h0: float
    converted_h1: float
    idler_n_a: float

    def sum_rule_defects(self) -> tuple:
        """<N_+> + <N_-> - (<u_eta^dag u_eta> + n_a) under H0 and H1."""
        return (
            self.mean_plus_h0 + self.mean_minus_h0 - (self.converted_h0 + self.idler_n_a),
            self.mean_plus_h1 + self.mean_minus_h1 - (self.converted_h1 + self.idler_n_a),
        )


def receiver_moments(c: ConverterCoefficients, scenario: DetectionScenario,
                     idler_n_a: float) -> ReceiverMoments:
    """Single-mode photon-count moments at the two beam-splitter outputs."""
    if not c.resonant:
        raise ConventionError("the receiver chain is defined at resonance (omega = 0) only")
    n_at, n_bt, n_mt = scenario.baths
    n_t = scenario.background_occupancy
    eta = scenario.eta
    a_a, a_b, b, c_a, c_b = c.as_tuple()
    b2 = abs(b) ** 2

    mean_h0 = b2 * (0.5 * (n_t + n_bt) + 1.0) + abs(a_a) ** 2 * n_at + abs(c_a) ** 2 * (n_mt + 1.0)
    # eta |B|^2 <u_b u_b^dag>: the returned signal's share of the converted power
    returned = eta * b2 * (abs(a_b) ** 2 * (n_bt + 1.0) + b2 * n_at + abs(c_b) ** 2 * (n_mt + 1.0))
    signature = math.sqrt(eta) * (
        b2 * a_b * (n_bt + 1.0) - b2 * a_a * n_at + b.conjugate() * c_a * c_b * (n_mt + 1.0)
    ).real
    plus_h1 = mean_h0 + 0.5 * returned + signature
    minus_h1 = mean_h0 + 0.5 * returned - signature

    converted_h0 = b2 * (n_t + 1.0) + abs(a_a) ** 2 * n_at + abs(c_a) ** 2 * (n_mt + 1.0)
    converted_h1 = converted_h0 + returned

    def variance(plus, minus, converted):
        return plus * (plus + 1.0) + minus * (minus + 1.0) - 0.5 * (converted - idler_n_a) ** 2

    return ReceiverMoments(
        mean_plus_h0=mean_h0,
        mean_minus_h0=mean_h0,
        mean_plus_h1=plus_h1,
        mean_minus_h1=minus_h1,
        var_h0=variance(mean_h0, mean_h0, converted_h0),
        var_h1=variance(plus_h1, minus_h1, converted_h1),
        converted_h0=converted_h0,
        converted_h1=converted_h1,
        idler_n_a=float(idler_n_a),
    )


def snr_qi(moments: ReceiverMoments, mode_count: float) -> float:
    """M-mode signal-to-noise ratio of the photon-count difference."""
    if moments.var_h0 < 0.0 or moments.var_h1 < 0.0:
        raise DomainError("negative receiver variance")
    spread = math.sqrt(moments.var_h0) + math.sqrt(moments.var_h1)
    if spread == 0.0:
        raise DomainError("degenerate scenario: both receiver variances vanish")
    shift = ((moments.mean_plus_h1 - moments.mean_minus_h1)
             - (moments.mean_plus_h0 - moments.mean_minus_h0))
    return 4.0 * float(mode_count) * shift * shift / (spread * spread)


def error_probability(snr: float) -> float:
    """Gaussian-approximation error probability erfc(sqrt(SNR/8))/2."""
    if not snr >= 0.0:
        raise DomainError(f"SNR must be >= 0, got {snr}")
    return 0.5 * erfc(math.sqrt(snr / 8.0))


def snr_classical(scenario: DetectionScenario, n_b: float) -> float:
    """Homodyne SNR of a coherent-state transmitter, 4 eta M n_b / (2 n_T + 1)."""
    return 4.0 * scenario.eta * scenario.mode_count * n_b / (2.0 * scenario.background_occupancy + 1.0)


def advantage_ratio(c: ConverterCoefficients, scenario: DetectionScenario,
                    moments: ReceiverMoments, n_b: float) -> float:
    """SNR_QI / SNR_CI at equal transmitted energy; independent of M."""
    if not c.resonant:
        raise ConventionError("the advantage ratio is defined at resonance only")
    classical = snr_classical(scenario, n_b)
    if not classical > 0.0:
        raise DomainError("classical SNR is zero; advantage ratio undefined")
    return snr_qi(moments, scenario.mode_count) / classical


def entanglement_survival_threshold(m: OutputMoments) -> float:
    """n_T^sill = |<u_b u_a>|^2 / n_a - n_b; returned and idler modes are
    unentangled whenever n_T >= n_T^sill."""
    if not m.n_a > 0.0:
        raise DomainError("n_a must be > 0")
    return abs(m.cross) ** 2 / m.n_a - m.n_b


def equal_energy_mode_count(m_ref: int, n_b_ref: float, n_b_other: float) -> int:
    """Mode count giving the other transmitter the same energy M * n_b."""
    if not n_b_other > 0.0:
        raise DomainError("n_b_other must be > 0")
    return max(1, int(round(m_ref * n_b_ref / n_b_other)))


@dataclass(frozen=True)
class DetectionPoint:
    """Full pipeline at one operating point, per mode (M = 1)."""

    coefficients: ConverterCoefficients
    output: OutputMoments
    receiver: ReceiverMoments
    snr_qi_per_mode: float
    snr_ci_per_mode: float

    @property
    def ratio(self) -> float:
        return self.snr_qi_per_mode / self.snr_ci_per_mode

    def error_probabilities(self, mode_count: float) -> tuple:
        """(P_QI, P_CI) for M modes."""
        return (error_probability(self.snr_qi_per_mode * mode_count),
                error_probability(self.snr_ci_per_mode * mode_count))


def evaluate_detection(coop: Cooperativities, eta: float, background_occupancy: float,
                       baths) -> DetectionPoint:
    scenario = DetectionScenario(eta=eta, background_occupancy=background_occupancy, baths=tuple(baths))
    coeffs = output_coefficients_resonant(coop)
    out = output_moments(coeffs, scenario.baths)
    rec = receiver_moments(coeffs, scenario, out.n_a)
    return DetectionPoint(
        coefficients=coeffs,
        output=out,
        receiver=rec,
        snr_qi_per_mode=snr_qi(rec, 1),
        snr_ci_per_mode=snr_classical(scenario, out.n_b),
    )


def ratio_at(lambda_a: float, lambda_b: float, eta: float, background_occupancy: float, baths) -> float:
    return evaluate_detection(Cooperativities(lambda_a, lambda_b), eta, background_occupancy, baths).ratio


def advantage_threshold(lambda_b: float, eta: float, background_occupancy: float, baths,
                        lower: float, upper: float, xtol: float = 1e-4, rtol: float = 1e-10):
    """Lambda_a in [lower, upper] where the advantage ratio crosses 1.

    Returns None when ``ratio - 1`` does not change sign on the interval.
    """
    upper = min(upper, 1.0 + lambda_b - 1e-12)

    def f(la):
        return ratio_at(la, lambda_b, eta, background_occupancy, baths) - 1.0

    f_lo, f_hi = f(lower), f(upper)
    if f_lo == 0.0:
        return lower
    if f_hi == 0.0:
        return upper
    if np.sign(f_lo) == np.sign(f_hi):
        return None
    return brentq(f, lower, upper, xtol=xtol, rtol=rtol)


def wide_advantage_threshold(lambda_b: float, eta: float, background_occupancy: float, baths,
                             lower: float = 1e-12, upper: float = 10.0, samples: int = 241):
    """Lowest crossing located by scanning a log-spaced bracket, refined to relative 1e-10."""
    grid = np.geomspace(lower, min(upper, 1.0 + lambda_b - 1e-9), samples)
    vals = [ratio_at(la, lambda_b, eta, background_occupancy, baths) - 1.0 for la in grid]
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if f_lo == 0.0:
            return float(lo)
        if np.sign(f_lo) != np.sign(f_hi):
            return advantage_threshold(lambda_b, eta, background_occupancy, baths, lo, hi,
                                       xtol=1e-15, rtol=1e-10)
    return None
