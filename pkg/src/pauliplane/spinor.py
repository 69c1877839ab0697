"""Pauli matrices, 2x2 complex matrix algebra and spinor valued functions of the plane."""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
import sympy

from .enums import Domain
from .failures import DomainError, MissingDerivativeError
from .jet import ExprJet, Jet, as_points, spinor_jet

logger = logging.getLogger(__name__)


def _frozen(matrix) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    return matrix


PAULI = (_frozen([[1, 0], [0, 1]]),
         _frozen([[0, 1], [1, 0]]),
         _frozen([[0, -1j], [1j, 0]]),
         _frozen([[1, 0], [0, -1]]))
"""σ⁰ = 1, σ¹, σ², σ³."""

EPSILON_2 = _frozen([[0, 1], [-1, 0]]).real
"""Two dimensional Levi-Civita symbol, ε¹² = 1 (0-based indices)."""


def pauli(index: int) -> np.ndarray:
    """Return σ^index for index in 0..3."""
    if index not in range(4):
        raise DomainError("Pauli index must be in 0..3, got %s" % index)
    return PAULI[index]


def levi_civita() -> np.ndarray:
    """Three dimensional Levi-Civita symbol with ε¹²³ = 1 (0-based indices)."""
    return np.array([[[float(sympy.LeviCivita(a, b, c)) for c in range(3)] for b in range(3)] for a in range(3)])


EPSILON_3 = levi_civita()


def sigma_dot(vector) -> np.ndarray:
    """
    σ·v for a real 3-vector, or a batch of them with shape (3, ...).

    :return: Array of shape (..., 2, 2).
    """
    vector = np.asarray(vector)
    if vector.shape[:1] != (3,):
        raise DomainError("σ·v needs a 3-vector, got shape %s" % (vector.shape,))
    if not np.all(np.isfinite(vector)):
        raise DomainError("σ·v of a non-finite vector %s" % vector)
    return np.einsum("k...,kij->...ij", vector.astype(complex), np.stack(PAULI[1:]))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


@dataclasses.dataclass(frozen=True)
class Spinor:
    """A two component complex spinor."""

    upper: complex
    lower: complex

    @classmethod
    def from_array(cls, values: Sequence[complex]) -> Spinor:
        return cls(complex(values[0]), complex(values[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.upper, self.lower], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.upper) ** 2 + abs(self.lower) ** 2

    def __add__(self, other: Spinor) -> Spinor:
        return Spinor(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other: Spinor) -> Spinor:
        return Spinor(self.upper - other.upper, self.lower - other.lower)

    def scaled(self, factor: complex) -> Spinor:
        return Spinor(factor * self.upper, factor * self.lower)


SpinorValues = Callable[[np.ndarray, np.ndarray], np.ndarray]

_FIRST_DERIVATIVE = ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12))
_SECOND_DERIVATIVE = ((-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2), (1, 4 / 3), (2, -1 / 12))


class ClosedFormSpinorFn:
    """
    Spinor valued function ψ: ℝ² → ℂ² given in closed form.

    Values are returned with shape (2, P), gradients with shape (2, 2, P) where
    the first axis is the derivative direction, Hessians with shape (2, 2, 2, P).
    Missing gradients or Hessians fall back to fourth order central differences;
    the stencil must stay inside the domain, otherwise a DomainError is raised.
    """

    gradient_step = 1e-4
    hessian_step = 1e-3

    def __init__(self, value: SpinorValues, gradient: Optional[Callable] = None, hessian: Optional[Callable] = None,
                 domain: Domain = Domain.PLANE, in_domain: Optional[Callable] = None, name: str = "psi"):
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.domain = domain
        self.in_domain = in_domain
        self.name = name

    @property
    def has_analytic_gradient(self) -> bool:
        return self._gradient is not None

    @property
    def has_analytic_hessian(self) -> bool:
        return self._hessian is not None

    def check_domain(self, x1: np.ndarray, x2: np.ndarray):
        if self.in_domain is None:
            return
        inside = np.asarray(self.in_domain(x1, x2), dtype=bool)
        if not np.all(inside):
            index = int(np.argmin(inside))
            raise DomainError("%s is not defined at (%g, %g)" % (self.name, x1[index], x2[index]))

    def __call__(self, x1, x2) -> np.ndarray:
        x1, x2, _ = as_points(x1, x2)
        self.check_domain(x1, x2)
        values = np.asarray(self._value(x1, x2), dtype=complex).reshape(2, -1)
        if not np.all(np.isfinite(values)):
            raise DomainError("%s is not finite at some of the requested points" % self.name)
        return values

    def evaluate(self, x1: float, x2: float) -> Spinor:
        return Spinor.from_array(self(x1, x2)[:, 0])

    def gradient(self, x1, x2) -> np.ndarray:
        x1, x2, _ = as_points(x1, x2)
        if self._gradient is not None:
            self.check_domain(x1, x2)
            return np.asarray(self._gradient(x1, x2), dtype=complex).reshape(2, 2, -1)
        h = self.gradient_step
        result = np.zeros((2, 2, x1.size), dtype=complex)
        for axis in range(2):
            for offset, weight in _FIRST_DERIVATIVE:
                shifted = (x1 + offset * h, x2) if axis == 0 else (x1, x2 + offset * h)
                result[axis] += weight * self(*shifted)
        return result / h

    def hessian(self, x1, x2) -> np.ndarray:
        x1, x2, _ = as_points(x1, x2)
        if self._hessian is not None:
            self.check_domain(x1, x2)
            return np.asarray(self._hessian(x1, x2), dtype=complex).reshape(2, 2, 2, -1)
        h = self.hessian_step
        result = np.zeros((2, 2, 2, x1.size), dtype=complex)
        for offset, weight in _SECOND_DERIVATIVE:
            result[0, 0] += weight * self(x1 + offset * h, x2)
            result[1, 1] += weight * self(x1, x2 + offset * h)
        for offset_1, weight_1 in _FIRST_DERIVATIVE:
            for offset_2, weight_2 in _FIRST_DERIVATIVE:
                result[0, 1] += weight_1 * weight_2 * self(x1 + offset_1 * h, x2 + offset_2 * h)
        result[1, 0] = result[0, 1]
        return result / h ** 2

    def jet(self, x1, x2, order: int) -> Jet:
        """Spinor jet up to second order from value, gradient and Hessian."""
        if order > 2:
            raise MissingDerivativeError("%s only provides derivatives up to second order" % self.name)
        data = {(0, 0): self(x1, x2)}
        if order >= 1:
            gradient = self.gradient(x1, x2)
            data[(1, 0)], data[(0, 1)] = gradient[0], gradient[1]
        if order >= 2:
            hessian = self.hessian(x1, x2)
            data[(2, 0)], data[(1, 1)], data[(0, 2)] = hessian[0, 0], hessian[0, 1], hessian[1, 1]
        return Jet(data, order)


class SymbolicSpinorFn(ClosedFormSpinorFn):
    """
    ClosedFormSpinorFn built from two sympy expressions in x1, x2, with exact jets of any order.
    """

    def __init__(self, upper: Union[sympy.Expr, complex], lower: Union[sympy.Expr, complex],
                 domain: Domain = Domain.PLANE, in_domain: Optional[Callable] = None, name: str = "psi"):
        self.expressions = (sympy.sympify(upper), sympy.sympify(lower))
        self._components = (ExprJet(self.expressions[0]), ExprJet(self.expressions[1]))
        super().__init__(self._symbolic_value, self._symbolic_gradient, self._symbolic_hessian, domain, in_domain,
                         name)

    @classmethod
    def from_expr(cls, upper, lower, domain: Domain = Domain.PLANE, in_domain: Optional[Callable] = None,
                  name: str = "psi") -> SymbolicSpinorFn:
        return cls(upper, lower, domain, in_domain, name)

    def _component_jet(self, x1, x2, order) -> Jet:
        return spinor_jet(self._components[0](x1, x2, order), self._components[1](x1, x2, order))

    def _symbolic_value(self, x1, x2):
        return self._component_jet(x1, x2, 0).value

    def _symbolic_gradient(self, x1, x2):
        jet = self._component_jet(x1, x2, 1)
        return np.stack([jet[(1, 0)], jet[(0, 1)]])

    def _symbolic_hessian(self, x1, x2):
        jet = self._component_jet(x1, x2, 2)
        return np.stack([np.stack([jet[(2, 0)], jet[(1, 1)]]), np.stack([jet[(1, 1)], jet[(0, 2)]])])

    def jet(self, x1, x2, order: int) -> Jet:
        x1, x2, _ = as_points(x1, x2)
        self.check_domain(x1, x2)
        return self._component_jet(x1, x2, order)
