"""Truncated power series used as independent references for the special functions.

The sums run in mpmath at a precision high enough to absorb the cancellation between terms,
so the results are exact to double precision on 1e-3 ≤ z ≤ 50.
"""

import mpmath

ORACLE_DPS = 120
MAX_TERMS = 2000


def _sum(first, ratio) -> mpmath.mpf:
    total, term = first, first
    for n in range(MAX_TERMS):
        term *= ratio(n)
        total += term
        if term == 0 or (n > 10 and abs(term) < mpmath.mpf(10) ** (-ORACLE_DPS) * abs(total)):
            return total
    raise RuntimeError("series did not converge within %d terms" % MAX_TERMS)


def _kummer(a, b, z) -> mpmath.mpf:
    return _sum(mpmath.mpf(1), lambda n: (a + n) / (b + n) * z / (n + 1))


def _bessel_i(order, z) -> mpmath.mpf:
    first = (z / 2) ** order / mpmath.gamma(order + 1)
    return _sum(first, lambda n: (z / 2) ** 2 / ((n + 1) * (n + 1 + order)))


def kummer_series(a: float, b: float, z: float) -> float:
    with mpmath.workdps(ORACLE_DPS):
        return float(_kummer(mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)))


def bessel_j_series(order: float, x: float) -> float:
    with mpmath.workdps(ORACLE_DPS):
        order, x = mpmath.mpf(order), mpmath.mpf(x)
        if x == 0:
            return 1.0 if order == 0 else 0.0
        first = (x / 2) ** order / mpmath.gamma(order + 1)
        return float(_sum(first, lambda n: -(x / 2) ** 2 / ((n + 1) * (n + 1 + order))))


def bessel_k_series(order: float, z: float) -> float:
    """K_ν = π(I_{-ν} - I_ν) / (2 sin νπ); ν must not be an integer."""
    with mpmath.workdps(ORACLE_DPS):
        order, z = mpmath.mpf(order), mpmath.mpf(z)
        return float(mpmath.pi * (_bessel_i(-order, z) - _bessel_i(order, z)) / (2 * mpmath.sin(order * mpmath.pi)))


def _whittaker_m(a, b, z) -> mpmath.mpf:
    return mpmath.exp(-z / 2) * z ** (b + mpmath.mpf(1) / 2) * _kummer(b - a + mpmath.mpf(1) / 2, 1 + 2 * b, z)


def whittaker_m_series(a: float, b: float, z: float) -> float:
    with mpmath.workdps(ORACLE_DPS):
        return float(_whittaker_m(mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)))


def whittaker_w_series(a: float, b: float, z: float) -> float:
    """W from the two M solutions; 2b must not be an integer."""
    with mpmath.workdps(ORACLE_DPS):
        a, b, z = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)
        half = mpmath.mpf(1) / 2
        return float(mpmath.gamma(-2 * b) / mpmath.gamma(half - b - a) * _whittaker_m(a, b, z)
                     + mpmath.gamma(2 * b) / mpmath.gamma(half + b - a) * _whittaker_m(a, -b, z))
