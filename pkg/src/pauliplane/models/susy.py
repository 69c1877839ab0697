"""Shape invariant model on the line y = x2.

The field μe^{-y}(cos x1, -sin x1, 0) with the potential λ²e^{-2y} and μ = λ(1 - 2κ)
separates on eigenvectors of Q2 = P1 - ½σ3 into the matrix problem

    (-∂_y² + V_κ)Φ = εΦ,  V_κ = z² - (2κ - 1)zσ₁ + pσ₃,  z = λe^{-y},

which factorizes with the superpotential W_κ = -κ + zσ₁ - (p/2κ)σ₃. All states are finite
sums of terms z^s K_μ(z); derivatives are taken on the terms, so only the final
evaluation is numerical.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.integrate
import scipy.linalg
import sympy

from ..catalog import FieldParams, build_family
from ..enums import Domain, FamilyId
from ..failures import ConvergenceFailure, DomainError
from ..hamiltonian import HamiltonianSpec
from ..jet import X2, as_points
from ..specfun import bessel_k_array
from ..spinor import PAULI, ClosedFormSpinorFn

logger = logging.getLogger(__name__)

OVERLAP_BREAKPOINTS = (-5.0, 0.0, 10.0, 45.0)
"""Integration range of overlaps in y, split where the integrands change character."""


def _check_parameters(kappa: float, lam: float):
    if kappa == 0:
        raise DomainError("κ must be nonzero")
    if not lam > 0:
        raise DomainError("λ must be positive, got %s" % lam)


def _as_array(y) -> np.ndarray:
    return np.atleast_1d(np.asarray(y, dtype=float))


def spin_coupling(kappa: float, p: float) -> float:
    """q = p/(2κ), the σ₃ weight of the superpotential."""
    return p / (2 * kappa)


def c_kappa(kappa: float, p: float) -> float:
    """c_κ = κ² + p²/(4κ²)."""
    return kappa ** 2 + spin_coupling(kappa, p) ** 2


def superpotential(kappa: float, p: float, lam: float, y) -> np.ndarray:
    """W_κ(y) with shape (P, 2, 2)."""
    z = lam * np.exp(-_as_array(y))
    return (-kappa * PAULI[0] + np.multiply.outer(z, PAULI[1]) - spin_coupling(kappa, p) * PAULI[3]).astype(complex)


def superpotential_derivative(lam: float, y) -> np.ndarray:
    """W_κ′ = -zσ₁, independent of κ and p."""
    z = lam * np.exp(-_as_array(y))
    return -np.multiply.outer(z, PAULI[1]).astype(complex)


def susy_potential(kappa: float, p: float, lam: float, y) -> np.ndarray:
    """V_κ = z² - (2κ - 1)zσ₁ + pσ₃ with shape (P, 2, 2)."""
    z = lam * np.exp(-_as_array(y))
    return (np.multiply.outer(z ** 2, PAULI[0]) - (2 * kappa - 1) * np.multiply.outer(z, PAULI[1])
            + p * PAULI[3]).astype(complex)


def shape_invariance_residual(kappa: float, p: float, lam: float, y, mutated: bool = False) -> float:
    """
    max |W_κ² + W_κ′ - W_{κ+1}² + W_{κ+1}′ - c_κ + c_{κ+1}| over the y samples.

    With ``mutated`` the constants are replaced by κ² (the σ₃ part dropped).
    """
    constant = (lambda value: value ** 2) if mutated else (lambda value: c_kappa(value, p))
    w, w_next = superpotential(kappa, p, lam, y), superpotential(kappa + 1, p, lam, y)
    derivative = superpotential_derivative(lam, y)
    residual = (w @ w + derivative - w_next @ w_next + derivative
                - (constant(kappa) - constant(kappa + 1)) * PAULI[0])
    return float(np.max(np.abs(residual)))


class BesselSeries:
    """
    Σ c_{ij} z^{s₀+i} K_{μ₀+j}(z) with integer offsets (i, j).
    """

    def __init__(self, power: float, order: float, terms: Optional[Dict[Tuple[int, int], float]] = None):
        self.power = power
        self.order = order
        self.terms: Dict[Tuple[int, int], float] = {key: value for key, value in (terms or {}).items() if value != 0}

    def _new(self, terms: Dict[Tuple[int, int], float]) -> BesselSeries:
        return BesselSeries(self.power, self.order, terms)

    def __add__(self, other: BesselSeries) -> BesselSeries:
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms.get(key, 0.0) + value
        return self._new(terms)

    def __sub__(self, other: BesselSeries) -> BesselSeries:
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> BesselSeries:
        return self._new({key: factor * value for key, value in self.terms.items()})

    def times_z(self) -> BesselSeries:
        return self._new({(i + 1, j): value for (i, j), value in self.terms.items()})

    def derivative(self) -> BesselSeries:
        """∂_y with z = λe^{-y}: ∂_y(z^s K_μ) = -(s + μ)z^s K_μ + z^{s+1}K_{μ+1}."""
        terms: Dict[Tuple[int, int], float] = {}
        for (i, j), value in self.terms.items():
            s, mu = self.power + i, self.order + j
            terms[(i, j)] = terms.get((i, j), 0.0) - (s + mu) * value
            terms[(i + 1, j + 1)] = terms.get((i + 1, j + 1), 0.0) + value
        return self._new(terms)

    def reduced(self) -> BesselSeries:
        """
        Rewrite every order in terms of K_{μ₀} and K_{μ₀+1}.

        Uses K_{μ+1} = K_{μ-1} + (2μ/z)K_μ in both directions.
        """
        pending = dict(self.terms)
        result: Dict[Tuple[int, int], float] = {}
        while pending:
            (i, j), value = pending.popitem()
            if j in (0, 1):
                result[(i, j)] = result.get((i, j), 0.0) + value
                continue
            if j > 1:
                # z^s K_{m} = z^s K_{m-2} + 2(m-1) z^{s-1} K_{m-1}
                updates = (((i, j - 2), value), ((i - 1, j - 1), 2 * (self.order + j - 1) * value))
            else:
                # z^s K_{m} = z^s K_{m+2} - 2(m+1) z^{s-1} K_{m+1}
                updates = (((i, j + 2), value), ((i - 1, j + 1), -2 * (self.order + j + 1) * value))
            for key, amount in updates:
                pending[key] = pending.get(key, 0.0) + amount
        return self._new(result)

    def __call__(self, z) -> np.ndarray:
        z = _as_array(z)
        result = np.zeros_like(z)
        bessel: Dict[int, np.ndarray] = {}
        for (i, j), value in self.terms.items():
            if j not in bessel:
                bessel[j] = bessel_k_array(self.order + j, z)
            result = result + value * z ** (self.power + i) * bessel[j]
        return result

    def __len__(self):
        return len(self.terms)


def _raise_state(kappa: float, p: float, upper: BesselSeries, lower: BesselSeries) \
        -> Tuple[BesselSeries, BesselSeries]:
    """a⁺_κ = -∂_y + W_κ applied to (F, G)."""
    q = spin_coupling(kappa, p)
    new_upper = upper.derivative().scale(-1) + upper.scale(-kappa - q) + lower.times_z()
    new_lower = lower.derivative().scale(-1) + lower.scale(-kappa + q) + upper.times_z()
    return new_upper.reduced(), new_lower.reduced()


@dataclasses.dataclass
class SusyState:
    """
    Φ_n(κ, y) = a⁺_κ ⋯ a⁺_{κ+n-1} Φ₀(κ + n, y) with Φ₀(N) = z^{½-N}(K_{ν+1}(z), -K_ν(z)), ν = p/(2N) - ½.
    """
    kappa: float
    p: float
    lam: float
    n: int
    upper: BesselSeries
    lower: BesselSeries

    @property
    def top(self) -> float:
        """N = κ + n, the parameter of the ground state the ladder starts from."""
        return self.kappa + self.n

    @property
    def bessel_order(self) -> float:
        """ν = p/(2N) - ½."""
        return spin_coupling(self.top, self.p) - 0.5

    @property
    def epsilon(self) -> float:
        """ε_n = -c_{κ+n} = -N² - p²/(4N²)."""
        return -c_kappa(self.top, self.p)

    @property
    def energy(self) -> float:
        """E = ε + p² + ¼ of the two dimensional state."""
        return self.epsilon + self.p ** 2 + 0.25

    def z(self, y) -> np.ndarray:
        return self.lam * np.exp(-_as_array(y))

    def derivative_series(self, order: int) -> Tuple[BesselSeries, BesselSeries]:
        upper, lower = self.upper, self.lower
        for _ in range(order):
            upper, lower = upper.derivative(), lower.derivative()
        return upper, lower

    def evaluate(self, y, order: int = 0) -> np.ndarray:
        """∂_y^order Φ_n with shape (2, P)."""
        upper, lower = self.derivative_series(order)
        z = self.z(y)
        return np.stack([upper(z), lower(z)])

    def __call__(self, y) -> np.ndarray:
        return self.evaluate(y)

    def boundary_value(self) -> np.ndarray:
        """Φ_n(0); the closed form does not vanish there in general."""
        return self.evaluate(0.0)[:, 0]

    def superpotential_action(self, y) -> np.ndarray:
        """W_κΦ with shape (2, P)."""
        return np.einsum("pij,jp->ip", superpotential(self.kappa, self.p, self.lam, y), self.evaluate(y))

    def annihilation_residual(self, y) -> float:
        """max |(∂_y + W_κ)Φ| relative to max |Φ|; vanishes for the ground state."""
        values = self.evaluate(y)
        residual = self.evaluate(y, 1) + self.superpotential_action(y)
        return float(np.max(np.abs(residual)) / np.max(np.abs(values)))

    def eigen_residual(self, y) -> float:
        """max |(-∂_y² + V_κ - ε)Φ| relative to the largest of its terms."""
        values = self.evaluate(y)
        kinetic = -self.evaluate(y, 2)
        potential = np.einsum("pij,jp->ip", susy_potential(self.kappa, self.p, self.lam, y), values)
        spectral = self.epsilon * values
        scale = max(np.max(np.abs(kinetic)), np.max(np.abs(potential)), np.max(np.abs(spectral)))
        return float(np.max(np.abs(kinetic + potential - spectral)) / scale)


def susy_ground_state(kappa: float, p: float, lam: float) -> SusyState:
    """
    Φ₀ = z^{½-κ}(K_{ν+1}(z), -K_ν(z)) with z = λe^{-y} and ν = p/(2κ) - ½, annihilated by a⁻_κ = ∂_y + W_κ.
    """
    _check_parameters(kappa, lam)
    order = spin_coupling(kappa, p) - 0.5
    upper = BesselSeries(0.5 - kappa, order, {(0, 1): 1.0})
    lower = BesselSeries(0.5 - kappa, order, {(0, 0): -1.0})
    return SusyState(kappa, p, lam, 0, upper, lower)


def susy_excited_state(kappa: float, p: float, lam: float, n: int) -> SusyState:
    """Φ_n by applying a⁺_{κ+n-1}, …, a⁺_κ to the ground state of parameter κ + n."""
    if n < 0:
        raise DomainError("Level index must be non-negative, got %d" % n)
    for step in range(n + 1):
        if kappa + step == 0:
            raise DomainError("The ladder from κ = %g passes through κ = 0" % kappa)
    ground = susy_ground_state(kappa + n, p, lam)
    upper, lower = ground.upper, ground.lower
    for step in reversed(range(n)):
        upper, lower = _raise_state(kappa + step, p, upper, lower)
    logger.debug("Φ_%d(κ = %g) has %d + %d Bessel terms" % (n, kappa, len(upper), len(lower)))
    return SusyState(kappa, p, lam, n, upper, lower)


def is_normalizable(kappa: float, p: float, n: int) -> bool:
    """½ - N - max(|ν|, |ν + 1|) > 0 with N = κ + n, so Φ_n decays for y → ∞."""
    top = kappa + n
    if top == 0:
        return False
    order = spin_coupling(top, p) - 0.5
    return 0.5 - top - max(abs(order), abs(order + 1)) > 0


def normalizable_levels(kappa: float, p: float, n_max: int = 20) -> List[int]:
    """Level indices n ≤ n_max with square integrable Φ_n, stopping before the ladder reaches κ + n = 0."""
    levels = []
    for n in range(n_max + 1):
        if kappa + n == 0:
            break
        if is_normalizable(kappa, p, n):
            levels.append(n)
    return levels


def _line_band(kappa: float, p: float, lam: float, y_range: Tuple[float, float], count: int) -> np.ndarray:
    """
    -∂_y² + V_κ on ``count`` interior nodes with Φ = 0 at both ends, in upper banded storage.

    Unknowns are interleaved as (F_1, G_1, F_2, G_2, ...), so σ₁ couples neighbours and the
    kinetic term couples entries two apart.
    """
    h = (y_range[1] - y_range[0]) / (count + 1)
    z = lam * np.exp(-(y_range[0] + h * np.arange(1, count + 1)))
    band = np.zeros((3, 2 * count))
    band[2, 0::2] = 2 / h ** 2 + z ** 2 + p
    band[2, 1::2] = 2 / h ** 2 + z ** 2 - p
    band[1, 1::2] = -(2 * kappa - 1) * z
    band[0, 2:] = -1 / h ** 2
    return band


def _lowest_line(kappa: float, p: float, lam: float, y_range: Tuple[float, float], count: int,
                 n_levels: int) -> np.ndarray:
    return scipy.linalg.eig_banded(_line_band(kappa, p, lam, y_range, count), lower=False, eigvals_only=True,
                                   select="i", select_range=(0, n_levels - 1))


def susy_fd_spectrum(kappa: float, p: float, lam: float, n_levels: int, y_range: Tuple[float, float] = (-4.0, 40.0),
                     count: int = 4000, tolerance: float = 1e-3,
                     convergence_log: Optional[list] = None) -> np.ndarray:
    """
    Lowest eigenvalues of -∂_y² + V_κ on the line by finite differences with N and 2N + 1 nodes,
    Richardson extrapolated. Below the continuum edge -|p| they are the ε_n of the normalizable ladder states.

    :raises ConvergenceFailure: If N and 2N + 1 nodes disagree by more than ``tolerance`` (relative).
    """
    _check_parameters(kappa, lam)
    if n_levels < 1:
        raise DomainError("At least one level is needed, got %d" % n_levels)
    coarse = _lowest_line(kappa, p, lam, y_range, count, n_levels)
    fine = _lowest_line(kappa, p, lam, y_range, 2 * count + 1, n_levels)
    change = float(np.max(np.abs(fine - coarse) / np.maximum(np.abs(fine), np.finfo(float).tiny)))
    if convergence_log is not None:
        for level in range(n_levels):
            convergence_log.append({"N": count, "level": level, "value": float(coarse[level])})
            convergence_log.append({"N": 2 * count + 1, "level": level, "value": float(fine[level])})
    logger.debug("Line FD with N = %d: relative change %.2e to 2N + 1" % (count, change))
    if change > tolerance:
        raise ConvergenceFailure("Line grid of %d nodes is not converged: relative change %.3e > %.1e"
                                 % (count, change, tolerance))
    return (4 * fine - coarse) / 3


def _inner_product(first: SusyState, second: SusyState) -> float:
    def integrand(y):
        return float(np.real(np.vdot(first.evaluate(y)[:, 0], second.evaluate(y)[:, 0])))

    total = 0.0
    for lower, upper in zip(OVERLAP_BREAKPOINTS[:-1], OVERLAP_BREAKPOINTS[1:]):
        value, _ = scipy.integrate.quad(integrand, lower, upper, limit=200, epsabs=1e-13, epsrel=1e-11)
        total += value
    return total


def overlap_matrix(kappa: float, p: float, lam: float, levels: List[int]) -> np.ndarray:
    """⟨Φ_m, Φ_n⟩/(‖Φ_m‖‖Φ_n‖) on the whole line."""
    states = [susy_excited_state(kappa, p, lam, n) for n in levels]
    size = len(states)
    gram = np.zeros((size, size))
    for i in range(size):
        for j in range(i, size):
            gram[i, j] = gram[j, i] = _inner_product(states[i], states[j])
    norms = np.sqrt(np.diag(gram))
    return gram / np.outer(norms, norms)


def full_state_2d(kappa: float, p: float, lam: float, n: int, c1: complex = 1.0, c2: complex = 0.0) \
        -> ClosedFormSpinorFn:
    """
    Ψ = C₁(e^{i(p+½)x1}F, e^{i(p-½)x1}G) + C₂(e^{i(½-p)x1}G, e^{-i(p+½)x1}F) with Φ_n = (F, G) in y = x2.

    Gradients and Hessians are analytic.
    """
    state = susy_excited_state(kappa, p, lam, n)
    # (coefficient, x1 frequency, source component) per output component
    parts = (((c1, p + 0.5, 0), (c2, 0.5 - p, 1)),
             ((c1, p - 0.5, 1), (c2, -p - 0.5, 0)))

    def derivatives(x1, x2, order: int) -> Dict[Tuple[int, int], np.ndarray]:
        x1, x2, _ = as_points(x1, x2)
        profiles = [state.evaluate(x2, m) for m in range(order + 1)]
        result = {}
        for a in range(order + 1):
            for b in range(order + 1 - a):
                value = np.zeros((2, x1.size), dtype=complex)
                for row, contributions in enumerate(parts):
                    for coefficient, frequency, source in contributions:
                        if coefficient == 0:
                            continue
                        value[row] += (coefficient * (1j * frequency) ** a * np.exp(1j * frequency * x1)
                                       * profiles[b][source])
                result[(a, b)] = value
        return result

    def value(x1, x2):
        return derivatives(x1, x2, 0)[(0, 0)]

    def gradient(x1, x2):
        data = derivatives(x1, x2, 1)
        return np.stack([data[(1, 0)], data[(0, 1)]])

    def hessian(x1, x2):
        data = derivatives(x1, x2, 2)
        return np.stack([np.stack([data[(2, 0)], data[(1, 1)]]), np.stack([data[(1, 1)], data[(0, 2)]])])

    return ClosedFormSpinorFn(value, gradient, hessian, Domain.PLANE, name="susy n=%d" % n)


def ep1_hamiltonian(kappa: float, p: float, lam: float) -> HamiltonianSpec:
    """The 2D Hamiltonian whose Q2 eigenvectors reduce to the ladder: μ = λ(1 - 2κ), B³ = 0, V = λ²e^{-2x2}."""
    _check_parameters(kappa, lam)
    params = FieldParams(mu=lam * (1 - 2 * kappa), f3=lambda s: sympy.Integer(0))
    return HamiltonianSpec(build_family(FamilyId.T1_5, params), 0.0, lam ** 2 * sympy.exp(-2 * X2))


def level_table(kappa: float, p: float, lam: float, n_max: int) -> List[Dict[str, float]]:
    """ε_n, E_n and the residuals of the first n_max + 1 ladder states on y ∈ [0, 12]."""
    y = np.linspace(0.0, 12.0, 121)
    rows = []
    for n in range(n_max + 1):
        state = susy_excited_state(kappa, p, lam, n)
        rows.append({"n": n, "epsilon": state.epsilon, "E": state.energy,
                     "eigen_residual": state.eigen_residual(y),
                     "normalizable": is_normalizable(kappa, p, n)})
    return rows


def closed_form_epsilon(kappa: float, p: float, n: int) -> float:
    """ε_n = -N² - p²/(4N²), N = κ + n."""
    top = kappa + n
    if top == 0:
        raise DomainError("ε is undefined at κ + n = 0")
    return -top ** 2 - p ** 2 / (4 * top ** 2)

