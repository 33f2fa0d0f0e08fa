"""Small numerical utilities: erfc, binary entropy of symplectic eigenvalues,
characteristic polynomials, the Routh-Hurwitz test and a symplectic-spectrum
oracle for two-mode covariance matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_SERIES_CUTOFF = 2.0
_ENTROPY_TOL = 1e-9
_PIVOT_TOL = 1e-14
_PAIRING_TOL = 1e-8

# Block-diagonal symplectic form for two modes, quadrature order (X1, Y1, X2, Y2).
OMEGA_2 = np.array(
    [[0.0, 1.0, 0.0, 0.0],
     [-1.0, 0.0, 0.0, 0.0],
     [0.0, 0.0, 0.0, 1.0],
     [0.0, 0.0, -1.0, 0.0]]
)


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (2n+1)!!, all terms positive
    x2 = x * x
    term = x
    total = x
    n = 0
    while abs(term) > 1e-17 * abs(total):
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if n > 500:
            raise NumericalError(f"erf series did not converge at x={x}")
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_continued_fraction(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for j in range(1, 5000):
        a = 0.5 * j
        d = x + a * d
        d = tiny if d == 0.0 else d
        c = x + a / c
        c = tiny if c == 0.0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise NumericalError(f"erfc continued fraction did not converge at x={x}")
    return math.exp(-x * x) * _INV_SQRT_PI / f


def erfc(x: float) -> float:
    """Complementary error function.

    Power series of erf for ``|x| <= 2`` and a Lentz-evaluated continued
    fraction beyond; negative arguments use ``erfc(-x) = 2 - erfc(x)``.
    Returns 0 once ``exp(-x**2)`` underflows.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"erfc requires a finite argument, got {x}")
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x <= _SERIES_CUTOFF:
        return 1.0 - _erf_series(x)
    return _erfc_continued_fraction(x)


def entropy_h(x: float) -> float:
    """Entropy function h(x) = (x+1/2)log2(x+1/2) - (x-1/2)log2(x-1/2).

    Takes a symplectic eigenvalue in the vacuum-1/2 convention and returns bits.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.5 - _ENTROPY_TOL:
        raise DomainError(f"entropy_h requires x >= 1/2 (unphysical symplectic eigenvalue {x!r})")
    delta = x - 0.5
    if delta <= 0.0:
        return 0.0
    plus = (1.0 + delta) * math.log1p(delta)
    minus = delta * math.log(delta)
    return (plus - minus) / math.log(2.0)


@dataclass(frozen=True)
class RealPolynomial:
    """Real polynomial, coefficients highest degree first."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise DomainError("polynomial needs at least one coefficient")
        if coeffs[0] == 0.0:
            raise DomainError("leading coefficient must be nonzero")
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def normalized(self) -> "RealPolynomial":
        lead = self.coefficients[0]
        return RealPolynomial(tuple(c / lead for c in self.coefficients))

    def companion(self) -> np.ndarray:
        """Frobenius companion matrix whose eigenvalues are the roots."""
        p = self.normalized().coefficients
        n = self.degree
        comp = np.zeros((n, n))
        comp[0, :] = -np.asarray(p[1:])
        if n > 1:
            comp[1:, :-1] = np.eye(n - 1)
        return comp

    def __call__(self, s):
        out = 0.0
        for c in self.coefficients:
            out = out * s + c
        return out


def characteristic_polynomial(m) -> RealPolynomial:
    """det(sI - M) by the Faddeev-LeVerrier recursion (exact for small matrices)."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    n = a.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(a)
    c_prev = 1.0
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + c_prev * eye
        c_prev = -np.trace(a @ mk) / k
        coeffs.append(float(c_prev))
    return RealPolynomial(tuple(coeffs))


def routh_hurwitz_stable(p: RealPolynomial) -> bool:
    """True iff every root of ``p`` has a strictly negative real part.

    The polynomial is rescaled to unit root magnitude first so the zero-pivot
    tolerance is scale free. A zero pivot (marginal case) counts as unstable;
    with a double root this also catches real parts below roughly 1e-7 of the
    root scale.
    """
    coeffs = np.asarray(p.normalized().coefficients, dtype=float)
    n = len(coeffs) - 1
    if n == 0:
        return True
    # substitute s -> rho*s so coefficient k becomes a_k / rho^k
    mags = [abs(c) ** (1.0 / k) for k, c in enumerate(coeffs) if k > 0 and c != 0.0]
    rho = max(mags) if mags else 1.0
    coeffs = coeffs / rho ** np.arange(n + 1)
    if np.any(coeffs <= 0.0):
        return False

    width = n // 2 + 1
    prev = np.zeros(width)
    cur = np.zeros(width)
    even = coeffs[0::2]
    odd = coeffs[1::2]
    prev[: len(even)] = even
    cur[: len(odd)] = odd
    if prev[0] <= _PIVOT_TOL:
        return False
    for _ in range(n):
        pivot = cur[0]
        if abs(pivot) < _PIVOT_TOL or pivot < 0.0:
            return False
        nxt = np.zeros(width)
        nxt[:-1] = (pivot * prev[1:] - prev[0] * cur[1:]) / pivot
        prev, cur = cur, nxt
    return True


def eigenvalues_small(m) -> np.ndarray:
    """All eigenvalues of an n x n matrix, n <= 6 (LAPACK QR iteration)."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or not 1 <= a.shape[0] <= 6:
        raise DomainError(f"expected an n x n matrix with 1 <= n <= 6, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalError("eigenvalue iteration produced non-finite values")
    return vals


@dataclass(frozen=True)
class SymplecticPair:
    nu_plus: float
    nu_minus: float

    def __iter__(self):
        yield self.nu_plus
        yield self.nu_minus

    def is_physical(self, tol: float = 1e-9) -> bool:
        return self.nu_minus >= 0.5 - tol


def symplectic_eigenvalues_oracle(v) -> SymplecticPair:
    """Symplectic spectrum as the eigenvalue moduli of i*Omega*V.

    Independent of any closed form; used to validate them.
    """
    mat = np.asarray(v, dtype=float)
    if mat.shape != (4, 4):
        raise DomainError(f"expected a 4x4 covariance matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)) or not np.allclose(mat, mat.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(mat).max())):
        raise DomainError("covariance matrix must be finite and symmetric")
    moduli = np.sort(np.abs(eigenvalues_small(1j * OMEGA_2 @ mat)))[::-1]
    for hi, lo in ((moduli[0], moduli[1]), (moduli[2], moduli[3])):
        if abs(hi - lo) > _PAIRING_TOL * max(1.0, hi):
            raise NumericalError(f"symplectic eigenvalues do not pair: {moduli}")
    return SymplecticPair(
        nu_plus=0.5 * float(moduli[0] + moduli[1]),
        nu_minus=0.5 * float(moduli[2] + moduli[3]),
    )


def companion_roots(coefficients: Sequence[float]) -> np.ndarray:
    """Roots of a polynomial via the eigenvalues of its companion matrix."""
    return eigenvalues_small(RealPolynomial(tuple(coefficients)).companion())
