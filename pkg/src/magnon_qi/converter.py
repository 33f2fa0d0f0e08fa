"""Linearized converter dynamics: drift matrix, stability and the
frequency-domain input-output coefficients of the propagating fields.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core_math import characteristic_polynomial, eigenvalues_small, routh_hurwitz_stable
from .errors import DomainError, UnstableRegimeError
from .system_params import Cooperativities, SystemParams, cooperativities


@dataclass(frozen=True)
class ConverterCoefficients:
    """Coefficients of

        u_a = B b_in^dag + A_a a_in - C_a m_in^dag
        u_b = A_b b_in - B a_in^dag - C_b m_in

    at analysis frequency ``analysis_frequency`` (rad/s). A_a and C_a are
    evaluated with conjugated detunings, A_b, B and C_b with plain ones.
    """

    a_a: complex
    a_b: complex
    b: complex
    c_a: complex
    c_b: complex
    analysis_frequency: float = 0.0

    def as_tuple(self) -> tuple:
        return (self.a_a, self.a_b, self.b, self.c_a, self.c_b)

    @property
    def resonant(self) -> bool:
        return self.analysis_frequency == 0.0


def drift_matrix(kappa_a: float, kappa_b: float, kappa_m: float,
                 g_ma_enhanced: float, g_mb: float) -> np.ndarray:
    """6x6 drift matrix of the noiseless quadrature equations.

    Rows/columns are ordered (X_m, Y_m, X_a, Y_a, X_b, Y_b); the first pair
    carries -kappa_m on the diagonal.
    """
    G, g = g_ma_enhanced, g_mb
    return np.array(
        [[-kappa_m, 0.0, 0.0, -G, 0.0, g],
         [0.0, -kappa_m, -G, 0.0, -g, 0.0],
         [0.0, -G, -kappa_a, 0.0, 0.0, 0.0],
         [-G, 0.0, 0.0, -kappa_a, 0.0, 0.0],
         [0.0, g, 0.0, 0.0, -kappa_b, 0.0],
         [-g, 0.0, 0.0, 0.0, 0.0, -kappa_b]]
    )


def params_drift_matrix(params: SystemParams, g_ma_enhanced: float) -> np.ndarray:
    kappa_a, kappa_b, kappa_m = params.kappas
    return drift_matrix(kappa_a, kappa_b, kappa_m, g_ma_enhanced, params.electromagnonic_coupling)


def cooperativity_drift_matrix(coop: Cooperativities, kappas) -> np.ndarray:
    """Drift matrix with couplings reconstructed from cooperativities."""
    kappa_a, kappa_b, kappa_m = kappas
    G = math.sqrt(coop.lambda_a * kappa_a * kappa_m)
    g = math.sqrt(coop.lambda_b * kappa_b * kappa_m)
    return drift_matrix(kappa_a, kappa_b, kappa_m, G, g)


def matrix_is_stable(m) -> bool:
    return routh_hurwitz_stable(characteristic_polynomial(m))


def is_stable(params: SystemParams, g_ma_enhanced: float | None = None) -> bool:
    """Routh-Hurwitz verdict on the drift matrix.

    ``g_ma_enhanced`` defaults to the pump-enhanced coupling implied by ``params``.
    """
    if g_ma_enhanced is None:
        g_ma_enhanced = cooperativities(params).optomagnonic_enhanced
    return matrix_is_stable(params_drift_matrix(params, g_ma_enhanced))


def max_real_eigenvalue(m) -> float:
    return float(np.max(eigenvalues_small(m).real))


def _check_kappas(kappas):
    kappa_a, kappa_b, kappa_m = (float(k) for k in kappas)
    for name, k in (("kappa_a", kappa_a), ("kappa_b", kappa_b), ("kappa_m", kappa_m)):
        if not (math.isfinite(k) and k > 0.0):
            raise DomainError(f"{name} must be positive, got {k}")
    return kappa_a, kappa_b, kappa_m


def _check_stable(coop: Cooperativities):
    if not coop.denominator > 0.0:
        raise UnstableRegimeError(
            f"1 + Lambda_b - Lambda_a = {coop.denominator} <= 0 (Lambda_a={coop.lambda_a}, "
            f"Lambda_b={coop.lambda_b})"
        )


def output_coefficients(coop: Cooperativities, kappas, omega: float) -> ConverterCoefficients:
    """Input-output coefficients at analysis frequency ``omega`` (rad/s)."""
    _check_stable(coop)
    kappa_a, kappa_b, kappa_m = _check_kappas(kappas)
    la, lb = coop.lambda_a, coop.lambda_b
    wa = 1.0 - 1j * omega / kappa_a
    wb = 1.0 - 1j * omega / kappa_b
    wm = 1.0 - 1j * omega / kappa_m
    wa_c, wb_c, wm_c = wa.conjugate(), wb.conjugate(), wm.conjugate()

    den = wb * (wa * wm - la) + lb * wa
    den_c = wb_c * (wa_c * wm_c - la) + lb * wa_c
    if den == 0 or den_c == 0:
        raise UnstableRegimeError(f"singular converter response at omega={omega}")

    a_a = (-(wa_c - 2.0) * (lb + wb_c * wm_c) + la * wb_c) / den_c
    a_b = ((wb - 2.0) * (la - wa * wm) - lb * wa) / den
    b = 2.0 * math.sqrt(la * lb) / den
    c_a = 2j * math.sqrt(la) * wb_c / den_c
    c_b = 2j * math.sqrt(lb) * wa / den
    return ConverterCoefficients(complex(a_a), complex(a_b), complex(b), complex(c_a), complex(c_b),
                                 analysis_frequency=float(omega))


def output_coefficients_resonant(coop: Cooperativities) -> ConverterCoefficients:
    """Coefficients at omega = 0 in closed form."""
    _check_stable(coop)
    la, lb = coop.lambda_a, coop.lambda_b
    d = coop.denominator
    return ConverterCoefficients(
        a_a=complex((1.0 + la + lb) / d),
        a_b=complex((1.0 - la - lb) / d),
        b=complex(2.0 * math.sqrt(la * lb) / d),
        c_a=2j * math.sqrt(la) / d,
        c_b=2j * math.sqrt(lb) / d,
        analysis_frequency=0.0,
    )


def commutator_defects(c: ConverterCoefficients) -> tuple:
    """Deviations from the bosonic commutators of the output fields.

    Returns ``(d1, d2, d12)`` for [u_a, u_a^dag] - 1, [u_b, u_b^dag] - 1 and
    -[u_a, u_b]. In u_a the b_in^dag coefficient belongs to the conjugated
    frequency sector, so it enters d12 as conj(B); at omega = 0 B is real.
    """
    a_a, a_b, b, c_a, c_b = c.as_tuple()
    d1 = abs(a_a) ** 2 - abs(b) ** 2 - abs(c_a) ** 2 - 1.0
    d2 = abs(a_b) ** 2 + abs(c_b) ** 2 - abs(b) ** 2 - 1.0
    d12 = a_b * b.conjugate() + a_a * b + c_a * c_b
    return float(d1), float(d2), complex(d12)


def max_commutator_defect(c: ConverterCoefficients) -> float:
    d1, d2, d12 = commutator_defects(c)
    return max(abs(d1), abs(d2), cmath.polar(d12)[0])
