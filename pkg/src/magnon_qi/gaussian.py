"""Two-mode Gaussian state of the propagating fields and its quantum-resource
figures of merit.

Covariance matrices use the vacuum-1/2 convention and quadrature order
(X_b, Y_b, X_a, Y_a). Logarithmic negativity is in nats, entropies in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .converter import ConverterCoefficients
from .core_math import SymplecticPair, entropy_h
from .errors import ConventionError, DomainError

DISCORD_CONVENTIONS = {"half": 0.5, "unit": 1.0}
_REAL_TOL = 1e-9
_RADICAND_TOL = 1e-12
_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class OutputMoments:
    n_a: float
    n_b: float
    cross: complex
    analysis_frequency: float = 0.0

    def __post_init__(self):
        if self.n_a < 0.0 or self.n_b < 0.0:
            raise DomainError(f"photon numbers must be >= 0, got n_a={self.n_a}, n_b={self.n_b}")


@dataclass(frozen=True)
class TwoModeCM:
    """Two-mode squeezed thermal covariance matrix.

    Expands to [[v11 I, v13 Z], [v13 Z, v33 I]] with Z = diag(1, -1).
    """

    v11: float
    v33: float
    v13: float

    def __post_init__(self):
        if self.v11 < 0.5 - _REAL_TOL or self.v33 < 0.5 - _REAL_TOL:
            raise DomainError(f"diagonal entries must be >= 1/2, got v11={self.v11}, v33={self.v33}")

    def as_matrix(self) -> np.ndarray:
        a, b, c = self.v11, self.v33, self.v13
        return np.array(
            [[a, 0.0, c, 0.0],
             [0.0, a, 0.0, -c],
             [c, 0.0, b, 0.0],
             [0.0, -c, 0.0, b]]
        )

    def partial_transpose(self) -> np.ndarray:
        """CM after Y_a -> -Y_a: the off-diagonal block becomes v13 * I."""
        m = self.as_matrix()
        m[1, 3] = m[3, 1] = self.v13
        return m

    def __array__(self, dtype=None, copy=None):
        m = self.as_matrix()
        return m if dtype is None else m.astype(dtype)

    @property
    def determinant(self) -> float:
        return (self.v11 * self.v33 - self.v13 ** 2) ** 2


@dataclass(frozen=True)
class ResourceReport:
    n_b: float
    epsilon: float
    log_negativity: float
    coherent_information: float
    discord: dict = field(default_factory=dict)

    @property
    def normalizable(self) -> bool:
        return self.n_b > 0.0

    def per_photon(self, value: float) -> float:
        if not self.normalizable:
            return float("nan")
        return value / self.n_b

    @property
    def log_negativity_per_photon(self) -> float:
        return self.per_photon(self.log_negativity)

    @property
    def coherent_information_per_photon(self) -> float:
        return self.per_photon(self.coherent_information)

    def discord_per_photon(self, convention: str = "half") -> float:
        return self.per_photon(self.discord[convention])


def output_moments(c: ConverterCoefficients, baths) -> OutputMoments:
    """Second moments of the output fields for thermal inputs ``baths = (n_a^T, n_b^T, n_m^T)``."""
    n_at, n_bt, n_mt = (float(x) for x in baths)
    if min(n_at, n_bt, n_mt) < 0.0:
        raise DomainError(f"bath occupancies must be >= 0, got {baths}")
    a_a, a_b, b, c_a, c_b = c.as_tuple()
    b2 = abs(b) ** 2
    n_a = b2 * (n_bt + 1.0) + abs(a_a) ** 2 * n_at + abs(c_a) ** 2 * (n_mt + 1.0)
    n_b = abs(a_b) ** 2 * n_bt + b2 * (n_at + 1.0) + abs(c_b) ** 2 * n_mt
    # b_in^dag coefficient of u_a sits in the conjugate frequency sector (= B at omega = 0)
    cross = a_b * b.conjugate() * (n_bt + 1.0) - b * a_a * n_at + c_a * c_b * (n_mt + 1.0)
    return OutputMoments(n_a=n_a, n_b=n_b, cross=complex(cross), analysis_frequency=c.analysis_frequency)


def entanglement_metric(m: OutputMoments) -> float:
    """epsilon = |<u_b u_a>| / sqrt(n_b n_a); epsilon > 1 means entangled outputs."""
    if not (m.n_a > 0.0 and m.n_b > 0.0):
        raise DomainError("entanglement metric undefined for zero photon number")
    return abs(m.cross) / math.sqrt(m.n_a * m.n_b)


def covariance_matrix(m: OutputMoments) -> TwoModeCM:
    cross = complex(m.cross)
    if abs(cross.imag) > _REAL_TOL * max(1.0, abs(cross.real)):
        raise ConventionError(
            f"cross moment {cross} is not real (omega={m.analysis_frequency}); "
            "covariance-matrix measures are defined at resonance only, use entanglement_metric"
        )
    return TwoModeCM(v11=m.n_b + 0.5, v33=m.n_a + 0.5, v13=cross.real)


def _check_radicand(value: float, scale: float, what: str) -> float:
    if value < -_RADICAND_TOL * scale:
        raise DomainError(f"malformed covariance matrix: {what} radicand {value} < 0")
    return max(value, 0.0)


def symplectic_spectrum(v: TwoModeCM) -> SymplecticPair:
    """Closed-form symplectic eigenvalues (nu_+, nu_-)."""
    a, b, c = v.v11, v.v33, v.v13
    inner = _check_radicand((a + b) ** 2 - 4.0 * c * c, (a + b) ** 2, "spectrum")
    delta = a * a + b * b - 2.0 * c * c
    root = abs(a - b) * math.sqrt(inner)
    nu_plus_sq = 0.5 * (delta + root)
    if not nu_plus_sq > 0.0:
        raise DomainError("malformed covariance matrix: nonpositive symplectic invariant")
    nu_minus_sq = v.determinant / nu_plus_sq
    return SymplecticPair(math.sqrt(nu_plus_sq), math.sqrt(nu_minus_sq))


def partial_transpose_spectrum(v: TwoModeCM) -> SymplecticPair:
    """Symplectic eigenvalues (xi_+, xi_-) of the partially transposed CM."""
    a, b, c = v.v11, v.v33, v.v13
    delta = a * a + b * b + 2.0 * c * c
    root = (a + b) * math.sqrt((a - b) ** 2 + 4.0 * c * c)
    xi_plus_sq = 0.5 * (delta + root)
    xi_minus_sq = v.determinant / xi_plus_sq
    return SymplecticPair(math.sqrt(xi_plus_sq), math.sqrt(xi_minus_sq))


def log_negativity(v: TwoModeCM) -> float:
    """E_N = max(0, -ln(2 xi_-))."""
    xi_minus = partial_transpose_spectrum(v).nu_minus
    return max(0.0, -math.log(2.0 * xi_minus))


def coherent_information(v: TwoModeCM) -> float:
    """I(a|b) = h(v11) - h(nu_+) - h(nu_-), in bits."""
    nu = symplectic_spectrum(v)
    return entropy_h(v.v11) - entropy_h(nu.nu_plus) - entropy_h(nu.nu_minus)


def quantum_discord(v: TwoModeCM, convention: str = "half") -> float:
    """Gaussian discord D(b|a) in bits.

    ``convention`` sets the vacuum noise s of the reparametrized CM: "half"
    (s = 1/2, consistent with the rest of the package) or "unit" (s = 1, the
    form with V33^2 - 1 denominators).
    """
    try:
        s = DISCORD_CONVENTIONS[convention]
    except KeyError:
        raise DomainError(f"unknown discord convention {convention!r}; expected one of "
                          f"{sorted(DISCORD_CONVENTIONS)}") from None
    a, b, c = v.v11, v.v33, v.v13
    nu = symplectic_spectrum(v)
    if c == 0.0:
        conditional = a
    else:
        denom = b * b - s * s
        if abs(denom) <= _DEGENERATE_TOL:
            raise DomainError(
                f"discord denominator V33^2 - {s * s} = {denom} is degenerate "
                f"(V33={b}, convention={convention!r})"
            )
        conditional = a + c * c * (s - b) / denom
    return entropy_h(b) - entropy_h(nu.nu_plus) - entropy_h(nu.nu_minus) + entropy_h(conditional)


def resource_report(m: OutputMoments, conventions=("half", "unit")) -> ResourceReport:
    """All resource measures for resonant output moments."""
    if m.n_a == 0.0 or m.n_b == 0.0:
        if abs(m.cross) != 0.0:
            raise DomainError("nonzero cross moment with zero photon number")
        return ResourceReport(n_b=m.n_b, epsilon=0.0, log_negativity=0.0, coherent_information=0.0,
                              discord={conv: 0.0 for conv in conventions})
    cm = covariance_matrix(m)
    return ResourceReport(
        n_b=m.n_b,
        epsilon=entanglement_metric(m),
        log_negativity=log_negativity(cm),
        coherent_information=coherent_information(cm),
        discord={conv: quantum_discord(cm, conv) for conv in conventions},
    )
