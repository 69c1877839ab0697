import math
import unittest

import numpy as np

from pauliplane import specfun
from pauliplane.failures import DomainError
from series_oracle import (bessel_j_series, bessel_k_series, kummer_series, whittaker_m_series,
                           whittaker_w_series)


class BesselTestCase(unittest.TestCase):

    def test_bessel_j(self):
        self.assertAlmostEqual(specfun.bessel_j(0, 0.0).value, 1.0)
        half = specfun.bessel_j(0.5, 1.0)
        self.assertAlmostEqual(half.value, math.sqrt(2 / math.pi) * math.sin(1.0), places=14)
        self.assertLess(half.est_error, 1e-14)
        for order, x in ((0, 2.5), (1.5, 4.0), (3, 7.5)):
            self.assertAlmostEqual(specfun.bessel_j(order, x).value, bessel_j_series(order, x), places=12)

    def test_bessel_j_domain(self):
        self.assertRaises(DomainError, specfun.bessel_j, -1, 1.0)
        self.assertRaises(DomainError, specfun.bessel_j, 0, 60.0)

    def test_bessel_k(self):
        expected = math.sqrt(math.pi / 4) * math.exp(-2.0)
        self.assertAlmostEqual(specfun.bessel_k(0.5, 2.0).value, expected, places=14)
        self.assertRaises(DomainError, specfun.bessel_k, 0.5, 0.0)

    def test_bessel_k_array(self):
        z = np.array([0.5, 1.0, 4.0])
        expected = np.sqrt(np.pi / (2 * z)) * np.exp(-z)
        self.assertTrue(np.allclose(specfun.bessel_k_array(0.5, z), expected, rtol=1e-12))
        self.assertRaises(DomainError, specfun.bessel_k_array, 0.5, np.array([1.0, -1.0]))

    def test_bessel_zeros(self):
        zeros = specfun.bessel_zeros(0, 2)
        self.assertAlmostEqual(zeros[0], 2.404825557695773, places=12)
        self.assertAlmostEqual(zeros[1], 5.520078110286311, places=12)
        self.assertAlmostEqual(specfun.bessel_j(0, zeros[0]).value, 0.0, places=14)


class ConfluentTestCase(unittest.TestCase):

    def test_kummer_m(self):
        self.assertAlmostEqual(specfun.kummer_m(1.0, 1.0, 0.7).value, math.exp(0.7), places=14)
        for a, b, z in ((-2.5, 1.5, 3.0), (0.3, 2.0, -1.2), (1.7, 0.6, 2.2)):
            self.assertAlmostEqual(specfun.kummer_m(a, b, z).value, kummer_series(a, b, z), places=10)
        self.assertRaises(DomainError, specfun.kummer_m, 1.0, -2.0, 1.0)

    def test_kummer_u(self):
        self.assertAlmostEqual(specfun.kummer_u(1.0, 2.0, 3.0).value, 1 / 3, places=14)
        self.assertRaises(DomainError, specfun.kummer_u, 1.0, 2.0, -1.0)

    def test_whittaker(self):
        self.assertAlmostEqual(specfun.whittaker("W", 1.5, 1.0, 2.0).value, math.exp(-1) * 2 ** 1.5, places=13)
        self.assertAlmostEqual(specfun.whittaker("M", 1.0, 0.5, 2.0).value, math.exp(-1) * 2, places=13)
        self.assertRaises(DomainError, specfun.whittaker, "V", 1.0, 0.5, 2.0)
        self.assertRaises(DomainError, specfun.whittaker, "M", 1.0, -1.0, 2.0)
        self.assertRaises(DomainError, specfun.whittaker, "W", 1.0, 0.5, 0.0)

    def test_whittaker_array(self):
        z = np.array([0.5, 2.0, 6.0])
        values = specfun.whittaker_array("W", 0.7, 0.3, z)
        for point, value in zip(z, values):
            self.assertAlmostEqual(value, specfun.whittaker("W", 0.7, 0.3, point).value, places=12)


class GammaTestCase(unittest.TestCase):

    def test_values(self):
        self.assertAlmostEqual(specfun.gamma(5).value, 24.0, places=12)
        self.assertAlmostEqual(specfun.gamma(0.5).value, math.sqrt(math.pi), places=14)
        self.assertEqual(float(specfun.gamma(3)), 2.0)

    def test_poles(self):
        self.assertRaises(DomainError, specfun.gamma, 0)
        self.assertRaises(DomainError, specfun.gamma, -3.0)


class RecurrenceTestCase(unittest.TestCase):

    def test_bessel_j_recurrence(self):
        left = specfun.bessel_j(0, 2.0).value + specfun.bessel_j(2, 2.0).value
        self.assertAlmostEqual(left, specfun.bessel_j(1, 2.0).value, delta=1e-10)
        self.assertAlmostEqual(specfun.bessel_j(0.5, 1.0).value, 0.6713967071418031, places=10)

    def test_bessel_k_even_in_order(self):
        self.assertAlmostEqual(specfun.bessel_k(-0.3, 2.0).value, specfun.bessel_k(0.3, 2.0).value, places=15)

    def test_bessel_k_recurrence(self):
        difference = specfun.bessel_k(2, 2.0).value - specfun.bessel_k(0, 2.0).value
        self.assertAlmostEqual(difference, specfun.bessel_k(1, 2.0).value, delta=1e-9)


class WhittakerEquationTestCase(unittest.TestCase):

    def residual(self, kind, a, b, z):
        h = 1e-3 * z
        u = [specfun.whittaker(kind, a, b, z + shift * h).value for shift in (-2, -1, 0, 1, 2)]
        curvature = (-u[0] + 16 * u[1] - 30 * u[2] + 16 * u[3] - u[4]) / (12 * h ** 2)
        potential = (-0.25 + a / z + (0.25 - b ** 2) / z ** 2) * u[2]
        return abs(curvature + potential) / (abs(curvature) + abs(potential))

    def test_defining_equation(self):
        for kind in ("M", "W"):
            for a, b in ((0.7, 0.3), (2.5, 1.2), (-0.4, 0.8)):
                for z in (0.5, 3.0, 12.0):
                    self.assertLess(self.residual(kind, a, b, z), 1e-6, "%s_{%g,%g}(%g)" % (kind, a, b, z))

    def test_small_argument_power(self):
        a, b = 0.1, 0.75
        slope = math.log(specfun.whittaker("M", a, b, 1e-2).value / specfun.whittaker("M", a, b, 1e-3).value) \
            / math.log(10)
        self.assertAlmostEqual(slope, b + 0.5, delta=1e-3)

    def test_large_argument_decay(self):
        a, b = 0.5, 0.25
        ratio = specfun.whittaker("W", a, b, 40.0).value / specfun.whittaker("W", a, b, 30.0).value
        expected = math.exp(-5.0) * (40.0 / 30.0) ** a
        self.assertAlmostEqual(ratio / expected, 1.0, delta=1e-3)


class SeriesOracleTestCase(unittest.TestCase):
    """Every function against the power series oracle over a grid; the error estimate must cover the deviation."""

    ARGUMENTS = (1e-3, 0.1, 1.0, 5.0, 12.5, 30.0, 50.0)

    def check(self, result, expected, rtol, label):
        self.assertTrue(math.isfinite(result.value) and math.isfinite(result.est_error), label)
        deviation = abs(result.value - expected)
        self.assertLessEqual(deviation, rtol * abs(expected), label)
        self.assertLessEqual(deviation, 10 * result.est_error, label)

    def test_bessel_j(self):
        for order in (0, 0.5, 1, 2.3, 5):
            for x in self.ARGUMENTS:
                self.check(specfun.bessel_j(order, x), bessel_j_series(order, x), 1e-10, "J_%g(%g)" % (order, x))

    def test_bessel_k(self):
        for order in (0.3, 0.5, 1.7, 2.5):
            for z in self.ARGUMENTS:
                self.check(specfun.bessel_k(order, z), bessel_k_series(order, z), 1e-10, "K_%g(%g)" % (order, z))

    def test_kummer_m(self):
        for a, b in ((-2.5, 1.5), (0.3, 2.0), (1.7, 0.6)):
            for z in (-1.2, 0.1, 2.2, 12.5, 30.0):
                self.check(specfun.kummer_m(a, b, z), kummer_series(a, b, z), 1e-10, "M(%g, %g, %g)" % (a, b, z))

    def test_whittaker(self):
        for a, b in ((0.7, 0.3), (2.5, 1.2), (-0.4, 0.8)):
            for z in self.ARGUMENTS:
                self.check(specfun.whittaker("M", a, b, z), whittaker_m_series(a, b, z), 1e-9,
                           "M_{%g,%g}(%g)" % (a, b, z))
                self.check(specfun.whittaker("W", a, b, z), whittaker_w_series(a, b, z), 1e-9,
                           "W_{%g,%g}(%g)" % (a, b, z))


if __name__ == '__main__':
    unittest.main()
