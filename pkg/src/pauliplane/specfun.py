"""Special functions used by the closed-form solutions.

Scalar evaluations go through mpmath and come with an error estimate obtained by
repeating the evaluation at twice the working precision. Vectorized helpers for
grids use scipy where it is accurate and fall back to mpmath otherwise.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Callable, List

import mpmath
import numpy as np
import scipy.special

from .failures import DomainError, SpecialFunctionError

logger = logging.getLogger(__name__)

WORKING_DPS = 20
REFERENCE_DPS = 40
BESSEL_J_MAX_ARGUMENT = 50.0


@dataclasses.dataclass(frozen=True)
class SpecFunResult:
    value: float
    est_error: float

    def __float__(self):
        return self.value


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def _evaluate(name: str, function: Callable[[], mpmath.mpf]) -> SpecFunResult:
    """Evaluate ``function`` at two precisions; the difference bounds the error of the coarse one."""
    with mpmath.workdps(WORKING_DPS):
        coarse = function()
    with mpmath.workdps(REFERENCE_DPS):
        fine = function()
    if isinstance(fine, mpmath.mpc):
        if abs(fine.imag) > 1e-12 * max(abs(fine.real), 1e-300):
            raise SpecialFunctionError("%s returned a complex value %s for real input" % (name, fine))
        fine, coarse = fine.real, mpmath.re(coarse)
    value = float(fine)
    error = float(abs(coarse - fine)) + abs(value) * np.finfo(float).eps
    if not (math.isfinite(value) and math.isfinite(error)):
        raise SpecialFunctionError("%s is not finite" % name)
    return SpecFunResult(value, error)


def bessel_j(order: float, x: float) -> SpecFunResult:
    """Bessel function of the first kind J_ν(x) for ν ≥ 0 and 0 ≤ x ≤ 50."""
    if order < 0:
        raise DomainError("bessel_j supports orders ν ≥ 0, got %s" % order)
    if not 0 <= x <= BESSEL_J_MAX_ARGUMENT:
        raise DomainError("bessel_j supports 0 ≤ x ≤ %s, got %s" % (BESSEL_J_MAX_ARGUMENT, x))
    return _evaluate("J_%s(%s)" % (order, x), lambda: mpmath.besselj(order, x))


def bessel_k(order: float, z: float) -> SpecFunResult:
    """Modified Bessel function of the second kind K_ν(z), z > 0."""
    if not z > 0:
        raise DomainError("bessel_k needs z > 0, got %s" % z)
    return _evaluate("K_%s(%s)" % (order, z), lambda: mpmath.besselk(order, z))


def kummer_m(a: float, b: float, z: float) -> SpecFunResult:
    """Kummer's confluent hypergeometric function M(a, b, z)."""
    if _is_nonpositive_integer(b):
        raise DomainError("M(a, b, z) has a pole at b = %s" % b)
    return _evaluate("M(%s, %s, %s)" % (a, b, z), lambda: mpmath.hyp1f1(a, b, z))


def kummer_u(a: float, b: float, z: float) -> SpecFunResult:
    """Tricomi's confluent hypergeometric function U(a, b, z), z > 0."""
    if not z > 0:
        raise DomainError("U(a, b, z) needs z > 0, got %s" % z)
    return _evaluate("U(%s, %s, %s)" % (a, b, z), lambda: mpmath.hyperu(a, b, z))


def _whittaker_m(a, b, z):
    return mpmath.exp(-z / 2) * mpmath.power(z, b + 0.5) * mpmath.hyp1f1(b - a + 0.5, 1 + 2 * b, z)


def _whittaker_w(a, b, z):
    return mpmath.exp(-z / 2) * mpmath.power(z, b + 0.5) * mpmath.hyperu(b - a + 0.5, 1 + 2 * b, z)


def whittaker(kind: str, a: float, b: float, z: float) -> SpecFunResult:
    """
    Whittaker functions M_{a,b}(z) and W_{a,b}(z), built from the Kummer functions.

    :param kind: "M" or "W"
    """
    if not z > 0:
        raise DomainError("Whittaker functions need z > 0, got %s" % z)
    if kind == "M":
        if _is_nonpositive_integer(1 + 2 * b):
            raise DomainError("M_{a,b} has a pole at b = %s" % b)
        return _evaluate("M_{%s,%s}(%s)" % (a, b, z), lambda: _whittaker_m(a, b, z))
    if kind == "W":
        return _evaluate("W_{%s,%s}(%s)" % (a, b, z), lambda: _whittaker_w(a, b, z))
    raise DomainError("Unknown Whittaker kind %r" % kind)


def gamma(x: float) -> SpecFunResult:
    if _is_nonpositive_integer(x):
        raise DomainError("Γ has a pole at %s" % x)
    return _evaluate("Γ(%s)" % x, lambda: mpmath.gamma(x))


def bessel_k_array(order: float, z) -> np.ndarray:
    """K_ν on an array of positive arguments."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("bessel_k_array needs positive arguments")
    values = scipy.special.kv(order, z)
    if not np.all(np.isfinite(values)):
        raise SpecialFunctionError("K_%s overflows on the requested arguments (min z = %.3e)" % (order, z.min()))
    return values


def whittaker_array(kind: str, a: float, b: float, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    function = _whittaker_m if kind == "M" else _whittaker_w
    if kind not in ("M", "W"):
        raise DomainError("Unknown Whittaker kind %r" % kind)
    if np.any(z <= 0):
        raise DomainError("Whittaker functions need positive arguments")
    values = np.array([float(mpmath.re(function(a, b, mpmath.mpf(float(point))))) for point in z.ravel()])
    if not np.all(np.isfinite(values)):
        raise SpecialFunctionError("%s_{%s,%s} is not finite on the requested arguments" % (kind, a, b))
    return values.reshape(z.shape)


def bessel_zeros(order: float, count: int) -> List[float]:
    """The first ``count`` positive zeros j_{ν,m} of J_ν."""
    if order < 0:
        raise DomainError("bessel_zeros supports orders ν ≥ 0, got %s" % order)
    return [float(mpmath.besseljzero(order, m)) for m in range(1, count + 1)]
