"""Truncated Taylor jets of functions on the plane.

A jet of order n at a batch of P points stores every partial derivative
∂₁ⁱ∂₂ʲf with i + j ≤ n. Scalar jets hold arrays of shape (P,), spinor jets
arrays of shape (2, P). Operators consume derivative orders: applying a first
order operator to a jet of order n yields a jet of order n - 1.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple, Union

import numpy as np
import sympy

X1, X2 = sympy.symbols("x1 x2", real=True)
"""Cartesian coordinates used by every closed-form expression of the package."""

RADIUS = sympy.sqrt(X1 ** 2 + X2 ** 2)
ANGLE = sympy.atan2(X2, X1)

MultiIndex = Tuple[int, int]


def multi_indices(order: int) -> List[MultiIndex]:
    """All multi-indices (i, j) with i + j <= order, sorted by total degree."""
    return [(i, total - i) for total in range(order + 1) for i in range(total, -1, -1)]


def as_points(x1, x2) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    Convert coordinates to flat float arrays.

    :return: The two coordinate arrays and whether the input was a single point.
    """
    scalar = np.ndim(x1) == 0 and np.ndim(x2) == 0
    x1, x2 = np.broadcast_arrays(np.atleast_1d(np.asarray(x1, dtype=float)),
                                 np.atleast_1d(np.asarray(x2, dtype=float)))
    return x1.ravel().copy(), x2.ravel().copy(), scalar


class Jet:
    """
    Derivatives of a (scalar or spinor valued) function at a batch of points up to a fixed order.
    """

    def __init__(self, data: Dict[MultiIndex, np.ndarray], order: int):
        missing = [index for index in multi_indices(order) if index not in data]
        if missing:
            raise ValueError("Jet of order %d is missing the derivatives %s" % (order, missing))
        self.data = {index: data[index] for index in multi_indices(order)}
        self.order = order

    @classmethod
    def zeros(cls, shape, order: int) -> Jet:
        return cls({index: np.zeros(shape, dtype=complex) for index in multi_indices(order)}, order)

    @property
    def value(self) -> np.ndarray:
        return self.data[(0, 0)]

    @property
    def shape(self):
        return self.value.shape

    def __getitem__(self, index: MultiIndex) -> np.ndarray:
        return self.data[index]

    def truncate(self, order: int) -> Jet:
        if order > self.order:
            raise ValueError("Cannot raise the order of a jet from %d to %d" % (self.order, order))
        return Jet(self.data, order)

    def derivative(self, axis: int) -> Jet:
        """The jet of ∂_axis f, one order lower."""
        if self.order < 1:
            raise ValueError("A jet of order 0 has no derivatives")
        shift = (1, 0) if axis == 0 else (0, 1)
        return Jet({(i, j): self.data[(i + shift[0], j + shift[1])] for i, j in multi_indices(self.order - 1)},
                   self.order - 1)

    def laplacian(self) -> Jet:
        return self.derivative(0).derivative(0) + self.derivative(1).derivative(1)

    def times(self, scalar: Jet) -> Jet:
        """Leibniz product with a scalar jet."""
        order = min(self.order, scalar.order)
        data = {}
        for i, j in multi_indices(order):
            total = 0
            for a in range(i + 1):
                for b in range(j + 1):
                    total = total + comb(i, a) * comb(j, b) * scalar[(a, b)] * self.data[(i - a, j - b)]
            data[(i, j)] = total
        return Jet(data, order)

    def pauli(self, matrix: np.ndarray) -> Jet:
        """Left multiplication of a spinor jet by a constant 2x2 matrix."""
        return Jet({index: np.einsum("ij,j...->i...", matrix, value) for index, value in self.data.items()},
                   self.order)

    def scale(self, factor: complex) -> Jet:
        return Jet({index: factor * value for index, value in self.data.items()}, self.order)

    def __add__(self, other: Jet) -> Jet:
        order = min(self.order, other.order)
        return Jet({index: self.data[index] + other.data[index] for index in multi_indices(order)}, order)

    def __sub__(self, other: Jet) -> Jet:
        return self + other.scale(-1)

    def __neg__(self) -> Jet:
        return self.scale(-1)

    def __repr__(self):
        return "Jet(order=%d, shape=%s)" % (self.order, self.shape)


@lru_cache(maxsize=None)
def _derivative(expression: sympy.Expr, index: MultiIndex) -> sympy.Expr:
    i, j = index
    if i > 0:
        return sympy.diff(_derivative(expression, (i - 1, j)), X1)
    if j > 0:
        return sympy.diff(_derivative(expression, (0, j - 1)), X2)
    return expression


@lru_cache(maxsize=None)
def _compiled(expression: sympy.Expr, index: MultiIndex):
    return sympy.lambdify((X1, X2), _derivative(expression, index), modules="numpy")


def _broadcast(value, x1: np.ndarray) -> np.ndarray:
    return np.array(np.broadcast_to(np.asarray(value, dtype=complex), x1.shape))


class ExprJet:
    """
    Jets of a sympy expression in (x1, x2).

    Derivatives are built lazily with sympy and compiled with lambdify. Both are
    cached per expression and multi-index, shared by all instances.
    """

    def __init__(self, expression: Union[sympy.Expr, float, complex]):
        self.expression = sympy.sympify(expression)
        unknown = self.expression.free_symbols - {X1, X2}
        if unknown:
            raise ValueError("Expression %s depends on symbols %s besides x1, x2" % (self.expression, unknown))

    @property
    def is_zero(self) -> bool:
        return self.expression.is_zero is True

    @property
    def is_constant(self) -> bool:
        return not self.expression.free_symbols

    def derivative_expression(self, index: MultiIndex) -> sympy.Expr:
        return _derivative(self.expression, index)

    def function(self, index: MultiIndex):
        return _compiled(self.expression, index)

    def evaluate(self, x1: np.ndarray, x2: np.ndarray, index: MultiIndex = (0, 0)) -> np.ndarray:
        return _broadcast(self.function(index)(x1, x2), x1)

    def __call__(self, x1: np.ndarray, x2: np.ndarray, order: int) -> Jet:
        return Jet({index: self.evaluate(x1, x2, index) for index in multi_indices(order)}, order)


def spinor_jet(upper: Jet, lower: Jet) -> Jet:
    """Stack two scalar jets into a spinor jet."""
    order = min(upper.order, lower.order)
    return Jet({index: np.stack([upper[index], lower[index]]) for index in multi_indices(order)}, order)
