"""Periodic model: the helix field B = (μ cos y, μ sin y, ν) with H = P² + σ·B + ω|B|².

States depend on y = x1 only. Q3 = σ3(P1 - ν) - μ(σ1 cos y + σ2 sin y) commutes with H and
with Q2 = P1 + ½σ3, so the spectrum splits into Q3 eigenvalues k and quasimomenta q.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.integrate
import scipy.linalg
import sympy

from ..catalog import FieldParams, build_family
from ..enums import FamilyId
from ..failures import AdmissibilityError, ConvergenceFailure, DomainError
from ..hamiltonian import HamiltonianSpec
from ..jet import X1
from ..spinor import SymbolicSpinorFn

logger = logging.getLogger(__name__)

MIN_CUTOFF = 16
CUTOFF_STEP = 8
SECTOR_SHIFT = 0.1234567
"""Weight of Q3 added to H to split degenerate levels into joint eigenvectors."""

ADMISSIBILITY = "(k + 1/2)² > μ²"


def _admissible(k: float, mu: float) -> Tuple[float, float]:
    kappa = k + 0.5
    if not kappa ** 2 > mu ** 2:
        raise AdmissibilityError("k = %g is not admissible for μ = %g" % (k, mu), condition=ADMISSIBILITY)
    return kappa, math.sqrt(kappa ** 2 - mu ** 2)


@dataclasses.dataclass(frozen=True)
class PeriodicSolution:
    """
    Eigenfunction of Q3 with eigenvalue k:

    ψ₁ = e^{i(ν-½)y}[(κC₁ - iλC₂) cos λy + (iλC₁ + κC₂) sin λy],
    ψ₂ = -μ e^{i(ν+½)y}(C₁ cos λy + C₂ sin λy),

    with κ = k + ½ and λ = √(κ² - μ²).
    """
    k: float
    mu: float
    nu: float
    c1: complex
    c2: complex
    omega: float = 1.0

    @property
    def kappa(self) -> float:
        return self.k + 0.5

    @property
    def wavenumber(self) -> float:
        """λ = √(κ² - μ²)."""
        return math.sqrt(self.kappa ** 2 - self.mu ** 2)

    def _amplitudes(self) -> Tuple[complex, complex, complex, complex]:
        kappa, lam = self.kappa, self.wavenumber
        return (kappa * self.c1 - 1j * lam * self.c2, 1j * lam * self.c1 + kappa * self.c2,
                -self.mu * self.c1, -self.mu * self.c2)

    def components(self, y) -> np.ndarray:
        """(ψ₁, ψ₂) with shape (2, P)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        upper_cos, upper_sin, lower_cos, lower_sin = self._amplitudes()
        lam = self.wavenumber
        cos, sin = np.cos(lam * y), np.sin(lam * y)
        return np.stack([np.exp(1j * (self.nu - 0.5) * y) * (upper_cos * cos + upper_sin * sin),
                         np.exp(1j * (self.nu + 0.5) * y) * (lower_cos * cos + lower_sin * sin)])

    def derivatives(self, y) -> np.ndarray:
        """dψ/dy with shape (2, P)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        upper_cos, upper_sin, lower_cos, lower_sin = self._amplitudes()
        lam = self.wavenumber
        cos, sin = np.cos(lam * y), np.sin(lam * y)
        result = []
        for phase, a, b in ((self.nu - 0.5, upper_cos, upper_sin), (self.nu + 0.5, lower_cos, lower_sin)):
            carrier = np.exp(1j * phase * y)
            result.append(carrier * (1j * phase * (a * cos + b * sin) + lam * (b * cos - a * sin)))
        return np.stack(result)

    def as_spinor_fn(self) -> SymbolicSpinorFn:
        """The solution as a function of (x1, x2), constant in x2, with exact jets."""
        amplitudes = [sympy.sympify(complex(value)) for value in self._amplitudes()]
        upper_cos, upper_sin, lower_cos, lower_sin = amplitudes
        lam = self.wavenumber
        cos, sin = sympy.cos(lam * X1), sympy.sin(lam * X1)
        upper = sympy.exp(sympy.I * (self.nu - 0.5) * X1) * (upper_cos * cos + upper_sin * sin)
        lower = sympy.exp(sympy.I * (self.nu + 0.5) * X1) * (lower_cos * cos + lower_sin * sin)
        return SymbolicSpinorFn.from_expr(upper, lower, name="psi_k=%g" % self.k)

    def density(self, y) -> np.ndarray:
        return np.sum(np.abs(self.components(y)) ** 2, axis=0)

    def norm_over_period(self, start: float = 0.0) -> float:
        """∫ (|ψ₁|² + |ψ₂|²) dy over one period of the field."""
        value, _ = scipy.integrate.quad(lambda y: float(self.density(y)[0]), start, start + 2 * math.pi,
                                        limit=200, epsabs=1e-12, epsrel=1e-12)
        return value

    @property
    def is_single_mode(self) -> bool:
        return abs(self.c2 - 1j * self.c1) < 1e-14 * max(abs(self.c1), 1) or \
            abs(self.c2 + 1j * self.c1) < 1e-14 * max(abs(self.c1), 1)

    def quasimomenta(self) -> List[float]:
        """Q2 eigenvalues p = ν ± λ present in the solution."""
        result = []
        if abs(self.c2 - 1j * self.c1) > 1e-14 * max(abs(self.c1), 1):
            result.append(self.nu - self.wavenumber)
        if abs(self.c2 + 1j * self.c1) > 1e-14 * max(abs(self.c1), 1):
            result.append(self.nu + self.wavenumber)
        return result

    def energy(self) -> float:
        """
        E = p² - k - ¼ + ω(μ² + ν²); the two modes share it when ν = 0.

        :raises DomainError: If the two modes carry different energies.
        """
        energies = {round(p ** 2, 12) for p in self.quasimomenta()}
        if len(energies) > 1:
            raise DomainError("The combination of two modes with ν = %g is not an eigenstate of H" % self.nu)
        p = self.quasimomenta()[0]
        return p ** 2 - self.k - 0.25 + self.omega * (self.mu ** 2 + self.nu ** 2)


def periodic_solution(k: float, mu: float, nu: float, c1: complex, c2: complex,
                      omega: float = 1.0) -> PeriodicSolution:
    """
    Closed-form eigenfunction of Q3 with eigenvalue k.

    :raises AdmissibilityError: If (k + ½)² ≤ μ².
    """
    _admissible(k, mu)
    if c1 == 0 and c2 == 0:
        raise DomainError("At least one of C1, C2 must be nonzero")
    return PeriodicSolution(k, mu, nu, complex(c1), complex(c2), omega)


def normalized_periodic(k: float, mu: float, nu: float, sign: int, omega: float = 1.0) -> PeriodicSolution:
    """
    Single-mode solution with C₂ = ±iC₁ and C₁ = 1/(2√(πκ(κ ± λ))), normalized on every period.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1, got %s" % sign)
    kappa, lam = _admissible(k, mu)
    normalizer = kappa * (kappa + sign * lam)
    if not normalizer > 0:
        raise DomainError("κ(κ %s λ) = %g is not positive" % ("+" if sign > 0 else "-", normalizer))
    c1 = 1 / (2 * math.sqrt(math.pi * normalizer))
    return PeriodicSolution(k, mu, nu, c1, sign * 1j * c1, omega)


def mode_quasimomentum(k: float, mu: float, nu: float, sign: int) -> Tuple[float, float]:
    """
    Q2 eigenvalue p = ν ± λ of a single mode and its Bloch quasimomentum q = (p - ½) mod 1.

    The upper component carries e^{i(p-½)y} and the lower one e^{i(p+½)y}.
    """
    _, lam = _admissible(k, mu)
    p = nu + sign * lam
    return p, (p - 0.5) % 1.0


@dataclasses.dataclass(frozen=True)
class Band:
    condition: str
    k_range: Tuple[float, float]
    lower_bound: float
    active: bool


def band_structure(mu: float, omega: float = 1.0) -> List[Band]:
    """
    Lower bounds of the energy on the admissible k ranges for ν = 0, where E = k² + (ω - 1)μ².
    """
    if not mu > 0:
        raise DomainError("band_structure needs μ > 0, got %s" % mu)
    shift = (omega - 1) * mu ** 2
    return [Band("k > μ - 1/2, μ > 1/2", (mu - 0.5, math.inf), (mu - 0.5) ** 2 + shift, mu > 0.5),
            Band("k > μ - 1/2, 0 < μ ≤ 1/2", (mu - 0.5, math.inf), shift, mu <= 0.5),
            Band("k < -μ - 1/2", (-math.inf, -mu - 0.5), (mu + 0.5) ** 2 + shift, True)]


def band_lower_bound(k: float, mu: float, omega: float = 1.0) -> float:
    """The lower energy bound of the band containing k."""
    _admissible(k, mu)
    for band in band_structure(mu, omega):
        if band.active and band.k_range[0] <= k <= band.k_range[1]:
            return band.lower_bound
    raise DomainError("k = %g lies in no band for μ = %g" % (k, mu))


@dataclasses.dataclass(frozen=True)
class DiscreteLevel:
    """
    A level whose states are 2π periodic up to a Bloch phase: λ = n/2.
    """
    n: int
    epsilon: int
    k: float
    momenta: Tuple[float, float]
    quasimomenta: Tuple[float, float]
    energies: Tuple[float, float]


def discrete_levels(mu: float, n_max: int, nu: float = 0.0, omega: float = 1.0) -> List[DiscreteLevel]:
    """
    Levels with k = ½(ε√(n² + 4μ²) - 1), n = 0..n_max, ε = ±1, momenta p = ν ± n/2.

    For ν = 0, ω = 1 both energies equal k² = ¼(n² + 4μ² - 2ε√(n² + 4μ²) + 1).
    """
    if not mu > 0:
        raise DomainError("discrete_levels needs μ > 0, got %s" % mu)
    levels = []
    for n in range(n_max + 1):
        root = math.sqrt(n ** 2 + 4 * mu ** 2)
        for epsilon in (1, -1):
            k = 0.5 * (epsilon * root - 1)
            momenta = (nu + n / 2, nu - n / 2)
            energies = tuple(p ** 2 - k - 0.25 + omega * (mu ** 2 + nu ** 2) for p in momenta)
            levels.append(DiscreteLevel(n, epsilon, k, momenta, tuple((p - 0.5) % 1.0 for p in momenta), energies))
    return levels


def branch_energies(mu: float, n: int, omega: float = 1.0) -> Dict[str, float]:
    """E₊ and E₋ of level n at ν = 0; E₊ belongs to ε = -1."""
    root = math.sqrt(n ** 2 + 4 * mu ** 2)
    shift = (omega - 1) * mu ** 2
    return {"E+": 0.25 * (n ** 2 + 4 * mu ** 2 + 2 * root + 1) + shift,
            "E-": 0.25 * (n ** 2 + 4 * mu ** 2 - 2 * root + 1) + shift}


def _check_bloch_arguments(q: float, cutoff: int):
    if cutoff < MIN_CUTOFF:
        raise DomainError("Plane wave cutoff must be at least %d, got %d" % (MIN_CUTOFF, cutoff))
    if not 0 <= q < 1:
        raise DomainError("Quasimomentum must lie in [0, 1), got %s" % q)


def _mode_numbers(cutoff: int) -> np.ndarray:
    return np.arange(-cutoff, cutoff + 1)


def bloch_matrix(mu: float, nu: float, q: float, cutoff: int, omega: float = 1.0) -> np.ndarray:
    """
    H in the basis e^{i(m+q)y}|s⟩, |m| ≤ cutoff, ordered (m, ↑), (m, ↓).

    σ·B couples (m, ↑) with (m + 1, ↓) with strength μ.
    """
    _check_bloch_arguments(q, cutoff)
    modes = _mode_numbers(cutoff) + q
    size = modes.size
    kinetic = modes ** 2 + omega * (mu ** 2 + nu ** 2)
    matrix = np.zeros((2 * size, 2 * size))
    up, down = np.arange(size) * 2, np.arange(size) * 2 + 1
    matrix[up, up] = kinetic + nu
    matrix[down, down] = kinetic - nu
    matrix[up[:-1], down[1:]] = mu
    matrix[down[1:], up[:-1]] = mu
    return matrix


def bloch_q3_matrix(mu: float, nu: float, q: float, cutoff: int) -> np.ndarray:
    """Q3 = σ3(P - ν) - μ(σ1 cos y + σ2 sin y) in the basis of :func:`bloch_matrix`."""
    _check_bloch_arguments(q, cutoff)
    modes = _mode_numbers(cutoff) + q
    size = modes.size
    matrix = np.zeros((2 * size, 2 * size))
    up, down = np.arange(size) * 2, np.arange(size) * 2 + 1
    matrix[up, up] = modes - nu
    matrix[down, down] = -(modes - nu)
    matrix[up[:-1], down[1:]] = -mu
    matrix[down[1:], up[:-1]] = -mu
    return matrix


def bloch_spectrum(mu: float, nu: float, q: float, cutoff: int = 64, omega: float = 1.0, count: int = 6,
                   tolerance: float = 1e-8, convergence_log: Optional[list] = None) -> np.ndarray:
    """
    Sorted eigenvalues of the plane wave matrix.

    The lowest ``count`` levels are compared with a run at cutoff + 8.

    :raises ConvergenceFailure: If they move by more than ``tolerance``.
    """
    values = scipy.linalg.eigvalsh(bloch_matrix(mu, nu, q, cutoff, omega))
    reference = scipy.linalg.eigvalsh(bloch_matrix(mu, nu, q, cutoff + CUTOFF_STEP, omega))
    shift = float(np.max(np.abs(values[:count] - reference[:count])))
    if convergence_log is not None:
        for level in range(count):
            convergence_log.append({"M": cutoff, "level": level, "value": float(values[level])})
            convergence_log.append({"M": cutoff + CUTOFF_STEP, "level": level, "value": float(reference[level])})
    logger.debug("Bloch spectrum at q = %g: cutoff %d -> %d moves the lowest %d levels by %.2e"
                 % (q, cutoff, cutoff + CUTOFF_STEP, count, shift))
    if shift > tolerance:
        raise ConvergenceFailure("Plane wave cutoff %d is not converged: lowest levels move by %.3e > %.1e"
                                 % (cutoff, shift, tolerance))
    return values


@dataclasses.dataclass(frozen=True)
class SectorLevel:
    energy: float
    k: float
    q: float


def bloch_sectors(mu: float, nu: float, q: float, cutoff: int = 64, omega: float = 1.0,
                  count: int = 6) -> List[SectorLevel]:
    """
    Joint eigenvalues (E, k) of H and Q3 for the ``count`` lowest levels at quasimomentum q.
    """
    h = bloch_matrix(mu, nu, q, cutoff, omega)
    q3 = bloch_q3_matrix(mu, nu, q, cutoff)
    _, vectors = scipy.linalg.eigh(h + SECTOR_SHIFT * q3)
    levels = []
    for index in range(vectors.shape[1]):
        vector = vectors[:, index]
        levels.append(SectorLevel(float(vector @ h @ vector), float(vector @ q3 @ vector), q))
    levels.sort(key=lambda level: level.energy)
    return levels[:count]


def periodic_hamiltonian(mu: float, nu: float, omega: float = 1.0) -> HamiltonianSpec:
    """H of the helix field as a catalog Hamiltonian."""
    return HamiltonianSpec(build_family(FamilyId.T2_1, FieldParams(mu=mu, nu=nu)), omega)
