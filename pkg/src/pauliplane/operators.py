"""Composable spinor differential operators acting on jets.

Every operator maps the jet of a spinor function to the jet of the result,
consuming as many derivative orders as its own order. Sums, compositions,
scalar multiples and powers are built with the usual Python operators, so
algebraic identities such as ``Q * Q - (H + c)`` can be evaluated pointwise.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import numbers
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
import sympy

from .failures import MissingDerivativeError
from .jet import ExprJet, Jet, as_points
from .spinor import PAULI, ClosedFormSpinorFn


class SpinorOperator:
    """Base class of all operators acting on spinor jets."""

    order: int = 0
    name: str = "operator"

    def apply_jet(self, psi: Jet, x1: np.ndarray, x2: np.ndarray) -> Jet:
        raise NotImplementedError

    def apply(self, function: ClosedFormSpinorFn, x1, x2) -> np.ndarray:
        """Evaluate (Op ψ)(x) at a batch of points, shape (2, P)."""
        x1, x2, _ = as_points(x1, x2)
        return self.apply_jet(function.jet(x1, x2, self.order), x1, x2).value

    def __add__(self, other) -> SpinorOperator:
        return OperatorSum((self, as_operator(other)))

    def __radd__(self, other) -> SpinorOperator:
        return OperatorSum((as_operator(other), self))

    def __sub__(self, other) -> SpinorOperator:
        return OperatorSum((self, ScaledOperator(as_operator(other), -1)))

    def __rsub__(self, other) -> SpinorOperator:
        return OperatorSum((as_operator(other), ScaledOperator(self, -1)))

    def __neg__(self) -> SpinorOperator:
        return ScaledOperator(self, -1)

    def __mul__(self, other) -> SpinorOperator:
        if isinstance(other, SpinorOperator):
            return Composition(self, other)
        if isinstance(other, numbers.Number):
            return ScaledOperator(self, other)
        return NotImplemented

    def __rmul__(self, other) -> SpinorOperator:
        if isinstance(other, numbers.Number):
            return ScaledOperator(self, other)
        return NotImplemented

    def __pow__(self, exponent: int) -> SpinorOperator:
        if not isinstance(exponent, int) or exponent < 1:
            raise ValueError("Only positive integer powers of operators are defined")
        result = self
        for _ in range(exponent - 1):
            result = Composition(result, self)
        return result

    def commutator(self, other: SpinorOperator) -> SpinorOperator:
        return self * other - other * self

    def _output_order(self, psi: Jet) -> int:
        remaining = psi.order - self.order
        if remaining < 0:
            raise MissingDerivativeError("%s needs a jet of order %d, got %d" % (self.name, self.order, psi.order))
        return remaining


def as_operator(value) -> SpinorOperator:
    """Turn numbers into multiples of the identity."""
    if isinstance(value, SpinorOperator):
        return value
    if isinstance(value, numbers.Number):
        return DifferentialOperator(potential={0: sympy.sympify(value)}, name=str(value))
    raise TypeError("Cannot interpret %r as an operator" % (value,))


class DifferentialOperator(SpinorOperator):
    """
    Operator c(-∇²) + σ^μ(X^{μa}(x) P_a + Y^μ(x)) with P_a = -i∂_a and the coefficients left of P.

    Coefficients are sympy expressions in x1, x2.
    """

    def __init__(self, laplacian: complex = 0, momentum: Optional[Mapping[int, Sequence]] = None,
                 potential: Optional[Mapping[int, object]] = None, name: str = "D"):
        self.laplacian = complex(laplacian)
        self.name = name
        self.momentum: Dict[int, tuple] = {}
        self.potential: Dict[int, sympy.Expr] = {}
        for mu, coefficients in (momentum or {}).items():
            expressions = tuple(sympy.sympify(c) for c in coefficients)
            if any(e.is_zero is not True for e in expressions):
                self.momentum[mu] = expressions
        for mu, coefficient in (potential or {}).items():
            expression = sympy.sympify(coefficient)
            if expression.is_zero is not True:
                self.potential[mu] = expression
        self._jets: Dict[sympy.Expr, ExprJet] = {}
        if self.laplacian != 0:
            self.order = 2
        elif self.momentum:
            self.order = 1
        else:
            self.order = 0

    def coefficient_jet(self, expression: sympy.Expr) -> ExprJet:
        if expression not in self._jets:
            self._jets[expression] = ExprJet(expression)
        return self._jets[expression]

    def apply_jet(self, psi: Jet, x1: np.ndarray, x2: np.ndarray) -> Jet:
        order = self._output_order(psi)
        result = Jet.zeros(psi.shape, order)
        if self.laplacian != 0:
            result = result + psi.laplacian().truncate(order).scale(-self.laplacian)
        for mu, coefficients in self.momentum.items():
            term = Jet.zeros(psi.shape, order)
            for axis, coefficient in enumerate(coefficients):
                if coefficient.is_zero is True:
                    continue
                derivative = psi.derivative(axis).truncate(order)
                term = term + derivative.times(self.coefficient_jet(coefficient)(x1, x2, order)).scale(-1j)
            result = result + term.pauli(PAULI[mu])
        for mu, coefficient in self.potential.items():
            term = psi.truncate(order).times(self.coefficient_jet(coefficient)(x1, x2, order))
            result = result + term.pauli(PAULI[mu])
        return result

    def __repr__(self):
        return "DifferentialOperator(%s)" % self.name


class OperatorSum(SpinorOperator):

    def __init__(self, terms: Sequence[SpinorOperator]):
        self.terms = tuple(terms)
        self.order = max(term.order for term in self.terms)
        self.name = " + ".join(term.name for term in self.terms)

    def apply_jet(self, psi: Jet, x1, x2) -> Jet:
        order = self._output_order(psi)
        result = Jet.zeros(psi.shape, order)
        for term in self.terms:
            result = result + term.apply_jet(psi, x1, x2)
        return result


class ScaledOperator(SpinorOperator):

    def __init__(self, operator: SpinorOperator, factor: complex):
        self.operator = operator
        self.factor = complex(factor)
        self.order = operator.order
        self.name = "%s*(%s)" % (factor, operator.name)

    def apply_jet(self, psi: Jet, x1, x2) -> Jet:
        return self.operator.apply_jet(psi, x1, x2).scale(self.factor)


class Composition(SpinorOperator):
    """The product left * right, right acting first."""

    def __init__(self, left: SpinorOperator, right: SpinorOperator):
        self.left = left
        self.right = right
        self.order = left.order + right.order
        self.name = "(%s)(%s)" % (left.name, right.name)

    def apply_jet(self, psi: Jet, x1, x2) -> Jet:
        self._output_order(psi)
        return self.left.apply_jet(self.right.apply_jet(psi, x1, x2), x1, x2)
