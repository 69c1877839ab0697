"""Rotationally invariant model: H = -∇² + (μ/r³)(σ₁x₂ - σ₂x₁) - α/r.

States with Q̃1 = L + ½σ3 eigenvalue k (half-odd integer) and Q4 eigenvalue ε√(k² + μ²)
reduce to the radial equation -φ″ + (c/r² - α/r)φ = Eφ with c = k² - ε√(k² + μ²) and
ψ = φ/√r times a fixed angular spinor.
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
from ..enums import Domain, FamilyId
from ..failures import AdmissibilityError, ConvergenceFailure, DomainError, ResidualDiscrepancy
from ..hamiltonian import HamiltonianSpec
from ..jet import RADIUS, X1, X2
from ..specfun import bessel_zeros, whittaker_array
from ..spinor import SymbolicSpinorFn

logger = logging.getLogger(__name__)

SPIN_ORBIT_CONDITION = "spin-orbit admissibility (k² - 1/4)² ≥ μ² for ε = +1"
HALF_INTEGER_CONDITION = "single-valuedness (2k odd integer)"
BOX_GROWTH = 1.5
"""Factor by which the box is enlarged to measure truncation error."""
BOX_MARGIN = 0.1
"""Fraction of the level tolerance the box truncation may use up."""

RESIDUAL_TOLERANCE = 1e-6

WHITTAKER_READINGS = {
    "consistent": lambda n, nu: (n + nu + 0.5, nu),
    "printed": lambda n, nu: (n + nu + 0.75, nu + 0.25),
}
"""Whittaker indices (a, b) of level n; the argument is z = αr/a in both readings."""


def _check_quantum_numbers(k: float, epsilon: int):
    if not (2 * k).is_integer() or int(round(2 * k)) % 2 == 0:
        raise AdmissibilityError("k must be a half-odd integer, got %s" % k, condition=HALF_INTEGER_CONDITION)
    if epsilon not in (1, -1):
        raise DomainError("ε must be +1 or -1, got %s" % epsilon)


def radial_equation_coeff(k: float, epsilon: int, mu: float, alpha: float) -> Tuple[float, float]:
    """
    (centrifugal coefficient k² - ε√(k² + μ²), Coulomb coefficient α).

    :raises AdmissibilityError: For invalid k or a violated spin-orbit condition.
    :raises DomainError: For μ = 0 with k + ε|k| = 0, where the angular spinor vanishes.
    """
    _check_quantum_numbers(k, epsilon)
    if epsilon == 1 and (k ** 2 - 0.25) ** 2 < mu ** 2:
        raise AdmissibilityError("(k² - 1/4)² = %g < μ² = %g" % ((k ** 2 - 0.25) ** 2, mu ** 2),
                                 condition=SPIN_ORBIT_CONDITION)
    if mu == 0 and k + epsilon * abs(k) == 0:
        raise DomainError("For μ = 0 the angular spinor with k = %g, ε = %d vanishes identically" % (k, epsilon))
    return k ** 2 - epsilon * math.sqrt(k ** 2 + mu ** 2), alpha


def radial_nu(k: float, mu: float, epsilon: int) -> float:
    """ν = ½√(1 + 4c); φ behaves like r^{ν+½} at the origin."""
    coefficient, _ = radial_equation_coeff(k, epsilon, mu, 0.0)
    return 0.5 * math.sqrt(max(1 + 4 * coefficient, 0.0))


def coulomb_levels(alpha: float, k: float, mu: float, epsilon: int, n_max: int) -> List[Tuple[int, float]]:
    """E_n = -α²/(4(n + ν + ½)²) for n = 0..n_max."""
    if not alpha > 0:
        raise DomainError("Bound states need α > 0, got %s" % alpha)
    nu = radial_nu(k, mu, epsilon)
    return [(n, -alpha ** 2 / (4 * (n + nu + 0.5) ** 2)) for n in range(n_max + 1)]


def _second_derivative(function, r: np.ndarray) -> np.ndarray:
    h = 1e-3 * r
    return (-function(r + 2 * h) + 16 * function(r + h) - 30 * function(r) + 16 * function(r - h)
            - function(r - 2 * h)) / (12 * h ** 2)


@dataclasses.dataclass(frozen=True)
class WhittakerProfile:
    """
    φ(r) = C₁M_{a,b}(z) + C₂W_{a,b}(z) with z = r·scale.
    """
    a: float
    b: float
    scale: float
    energy: float
    c1: float = 1.0
    c2: float = 0.0
    reading: str = "consistent"

    def __call__(self, r) -> np.ndarray:
        z = np.asarray(r, dtype=float) * self.scale
        result = np.zeros_like(z)
        if self.c1:
            result = result + self.c1 * whittaker_array("M", self.a, self.b, z)
        if self.c2:
            result = result + self.c2 * whittaker_array("W", self.a, self.b, z)
        return result

    def sample_radii(self, count: int = 40) -> np.ndarray:
        """Log-spaced radii covering z ∈ [0.02, 30]."""
        return np.logspace(math.log10(0.02), math.log10(30.0), count) / self.scale

    def ode_residual(self, coefficient: float, alpha: float, radii: Optional[np.ndarray] = None) -> float:
        """
        Largest pointwise relative residual of -φ″ + (c/r² - α/r - E)φ = 0.
        """
        r = self.sample_radii() if radii is None else np.asarray(radii, dtype=float)
        phi = self(r)
        curvature = _second_derivative(self, r)
        terms = (-curvature, coefficient / r ** 2 * phi, -alpha / r * phi, -self.energy * phi)
        scale = np.sum(np.abs(np.stack(terms)), axis=0)
        return float(np.max(np.abs(sum(terms)) / scale))

    def norm_squared(self) -> float:
        """∫₀^∞ φ² dr."""
        upper = 60.0 / self.scale
        value, _ = scipy.integrate.quad(lambda r: float(self(np.array([r]))[0] ** 2), 0, upper, limit=200)
        return value


def whittaker_solution(alpha: float, coefficient: float, energy: float, c1: float = 1.0,
                       c2: float = 0.0) -> WhittakerProfile:
    """General solution at any E < 0: a = α/(2√(-E)), b = ν, z = 2√(-E)r."""
    if not energy < 0:
        raise DomainError("Whittaker profiles describe E < 0, got %s" % energy)
    root = math.sqrt(-energy)
    nu = 0.5 * math.sqrt(max(1 + 4 * coefficient, 0.0))
    return WhittakerProfile(alpha / (2 * root), nu, 2 * root, energy, c1, c2)


def whittaker_eigenfunction(alpha: float, k: float, mu: float, epsilon: int, n: int, c1: float = 1.0,
                            c2: float = 0.0, tolerance: float = RESIDUAL_TOLERANCE) -> WhittakerProfile:
    """
    Radial profile of level n, choosing the Whittaker indices by the radial equation residual.

    Both readings use z = αr/a and E = -α²/(4a²).

    :raises ResidualDiscrepancy: If no reading satisfies the radial equation.
    """
    coefficient, _ = radial_equation_coeff(k, epsilon, mu, alpha)
    if not alpha > 0:
        raise DomainError("Bound states need α > 0, got %s" % alpha)
    if n < 0:
        raise DomainError("Level index must be non-negative, got %d" % n)
    nu = radial_nu(k, mu, epsilon)
    residuals: Dict[str, float] = {}
    profiles = {}
    for reading, indices in WHITTAKER_READINGS.items():
        a, b = indices(n, nu)
        profile = WhittakerProfile(a, b, alpha / a, -alpha ** 2 / (4 * a ** 2), c1, c2, reading)
        profiles[reading] = profile
        residuals[reading] = profile.ode_residual(coefficient, alpha)
    logger.info("Whittaker readings for n = %d, k = %g: residuals %s" % (n, k, residuals))
    best = min(residuals, key=residuals.get)
    if residuals[best] > tolerance:
        raise ResidualDiscrepancy("No Whittaker reading solves the radial equation: residuals %s" % residuals)
    return profiles[best]


@dataclasses.dataclass(frozen=True)
class RadialSpectrum:
    levels: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    relative_change: float
    r_max: float = 60.0
    box_change: float = 0.0


def _radial_matrix(alpha: float, nu: float, r_max: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Symmetrized tridiagonal form of -(rR')' + ν²R/r - αR = E·rR on r_j = (j - ½)h.

    The flux through r = 0 vanishes and R(r_max) = 0.
    """
    h = r_max / (count + 0.5)
    r = (np.arange(1, count + 1) - 0.5) * h
    faces = np.arange(0, count + 1) * h
    diagonal = (faces[1:] + faces[:-1]) / h ** 2 + nu ** 2 / r - alpha
    off_diagonal = -faces[1:-1] / h ** 2
    return diagonal / r, off_diagonal / np.sqrt(r[:-1] * r[1:])


def _lowest_radial(alpha: float, nu: float, r_max: float, count: int, n_levels: int) -> np.ndarray:
    diagonal, off_diagonal = _radial_matrix(alpha, nu, r_max, count)
    return scipy.linalg.eigh_tridiagonal(diagonal, off_diagonal, select="i", select_range=(0, n_levels - 1),
                                         eigvals_only=True)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.max(np.abs(new - old) / np.maximum(np.abs(new), np.finfo(float).tiny)))


def _box_change(alpha: float, nu: float, r_max: float, count: int, n_levels: int) -> float:
    """Relative shift of the levels when the box grows by BOX_GROWTH at the same cell size."""
    inner = _lowest_radial(alpha, nu, r_max, count, n_levels)
    outer = _lowest_radial(alpha, nu, BOX_GROWTH * r_max, int(round(BOX_GROWTH * (count + 0.5) - 0.5)), n_levels)
    return _relative_change(outer, inner)


def radial_fd_spectrum(alpha: float, k: float, mu: float, epsilon: int, r_max: float = 60.0, count: int = 6000,
                       n_levels: int = 3, tolerance: float = 1e-4, max_growth: int = 0,
                       convergence_log: Optional[list] = None) -> RadialSpectrum:
    """
    Lowest levels of the radial equation by finite differences on N, 2N and 4N cells, Richardson
    extrapolated from each pair.

    The box is accepted when enlarging it by BOX_GROWTH at fixed cell size moves no level by more than
    BOX_MARGIN·``tolerance``; otherwise it grows up to ``max_growth`` times, keeping the cell size.

    :raises ConvergenceFailure: If the box stays too small for the requested levels or the extrapolations
        from N, 2N and 2N, 4N disagree.
    """
    if count < 1000:
        raise DomainError("The radial grid needs at least 1000 cells, got %d" % count)
    nu = radial_nu(k, mu, epsilon)
    box_change = _box_change(alpha, nu, r_max, count, n_levels)
    growth = 0
    while box_change > BOX_MARGIN * tolerance and growth < max_growth:
        logger.info("Levels move by %.2e when r_max = %g grows, enlarging the box" % (box_change, r_max))
        count = int(round(BOX_GROWTH * (count + 0.5) - 0.5))
        r_max = BOX_GROWTH * r_max
        growth += 1
        box_change = _box_change(alpha, nu, r_max, count, n_levels)
    if box_change > BOX_MARGIN * tolerance:
        raise ConvergenceFailure("r_max = %g is too small: levels move by %.3e > %.1e in a box %g times larger"
                                 % (r_max, box_change, BOX_MARGIN * tolerance, BOX_GROWTH))
    grids = [count, 2 * count, 4 * count]
    solutions = [_lowest_radial(alpha, nu, r_max, cells, n_levels) for cells in grids]
    first = (4 * solutions[1] - solutions[0]) / 3
    levels = (4 * solutions[2] - solutions[1]) / 3
    change = _relative_change(levels, first)
    if convergence_log is not None:
        for level in range(n_levels):
            for cells, values in zip(grids, solutions):
                convergence_log.append({"N": cells, "r_max": r_max, "level": level, "value": float(values[level])})
    logger.debug("Radial FD with N = %d, r_max = %g: extrapolations differ by %.2e, box change %.2e"
                 % (count, r_max, change, box_change))
    if change > tolerance:
        raise ConvergenceFailure("Radial grid of %d cells is not converged: extrapolations differ by %.3e > %.1e"
                                 % (count, change, tolerance))
    return RadialSpectrum(levels, solutions[1], solutions[2], change, r_max, box_change)


def bessel_levels(k: float, mu: float, epsilon: int, r_max: float, count: int) -> List[float]:
    """Levels at α = 0 in a disc of radius r_max: E_m = (j_{ν,m}/r_max)²."""
    nu = radial_nu(k, mu, epsilon)
    return [(zero / r_max) ** 2 for zero in bessel_zeros(nu, count)]


def _angular_power(m: int) -> sympy.Expr:
    """e^{imθ} = (x1 + ix2)^m / r^m."""
    if m >= 0:
        return (X1 + sympy.I * X2) ** m / RADIUS ** m
    return (X1 - sympy.I * X2) ** (-m) / RADIUS ** (-m)


def radial_state_2d(alpha: float, k: float, mu: float, epsilon: int, n: int) -> SymbolicSpinorFn:
    """
    Closed-form bound state (φ/√r)(e^{i(k-½)θ}(k + ε√(k² + μ²)), i e^{i(k+½)θ}μ) of level n,
    with φ = z^{ν+½} e^{-z/2} L_n^{(2ν)}(z) and z = αr/(n + ν + ½).
    """
    coefficient, _ = radial_equation_coeff(k, epsilon, mu, alpha)
    if not alpha > 0:
        raise DomainError("Bound states need α > 0, got %s" % alpha)
    nu = radial_nu(k, mu, epsilon)
    scale = alpha / (n + nu + 0.5)
    z = scale * RADIUS
    exponent = int(nu) if float(nu).is_integer() else nu
    # φ/√r: the factor r^{ν+½} of z^{ν+½} reduced by √r
    radial = scale ** (nu + 0.5) * RADIUS ** exponent * sympy.exp(-z / 2) \
        * sympy.assoc_laguerre(n, 2 * nu, z)
    half = int(round(k - 0.5))
    upper = radial * _angular_power(half) * (k + epsilon * math.sqrt(k ** 2 + mu ** 2))
    lower = radial * _angular_power(half + 1) * sympy.I * mu
    return SymbolicSpinorFn.from_expr(upper, lower, Domain.PUNCTURED_PLANE,
                                      in_domain=lambda x1, x2: np.hypot(x1, x2) > 0,
                                      name="radial n=%d k=%g eps=%d" % (n, k, epsilon))


def radial_hamiltonian(mu: float, alpha: float) -> HamiltonianSpec:
    """The 2D Hamiltonian of the model: the winding field with k = 1, ν = 0 plus -α/r."""
    field = build_family(FamilyId.T2_2, FieldParams(mu=mu, nu=0.0, k=1))
    return HamiltonianSpec(field, 0.0, -alpha / RADIUS)
