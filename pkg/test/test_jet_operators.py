import unittest

import numpy as np
import sympy

from pauliplane.failures import MissingDerivativeError
from pauliplane.jet import X1, X2, ExprJet, Jet, multi_indices
from pauliplane.operators import DifferentialOperator, as_operator
from pauliplane.spinor import SymbolicSpinorFn


class JetTestCase(unittest.TestCase):

    def test_multi_indices(self):
        self.assertEqual(multi_indices(1), [(0, 0), (1, 0), (0, 1)])
        self.assertEqual(len(multi_indices(3)), 10)

    def test_leibniz_product(self):
        x1 = np.array([1.5])
        jet = ExprJet(X1 ** 2)(x1, np.array([0.0]), 2)
        product = jet.times(ExprJet(X1)(x1, np.array([0.0]), 2))
        self.assertAlmostEqual(product[(0, 0)][0], 1.5 ** 3)
        self.assertAlmostEqual(product[(1, 0)][0], 3 * 1.5 ** 2)
        self.assertAlmostEqual(product[(2, 0)][0], 6 * 1.5)

    def test_derivative_lowers_order(self):
        jet = ExprJet(X1 * X2 ** 2)(np.array([2.0]), np.array([3.0]), 2)
        derivative = jet.derivative(1)
        self.assertEqual(derivative.order, 1)
        self.assertAlmostEqual(derivative.value[0], 12.0)
        self.assertAlmostEqual(derivative[(0, 1)][0], 4.0)

    def test_missing_derivatives(self):
        self.assertRaises(ValueError, Jet, {(0, 0): np.zeros(1)}, 1)

    def test_unknown_symbol(self):
        self.assertRaises(ValueError, ExprJet, sympy.Symbol("t") * X1)

    def test_equal_expressions_share_compiled_derivatives(self):
        first, second = ExprJet(X1 ** 2 * X2), ExprJet(X1 ** 2 * X2)
        self.assertIs(first.function((1, 0)), second.function((1, 0)))
        x1, x2 = np.array([0.5, 2.0]), np.array([3.0, -1.0])
        np.testing.assert_array_equal(first(x1, x2, 2)[(1, 1)], second(x1, x2, 2)[(1, 1)])
        np.testing.assert_allclose(first(x1, x2, 2)[(1, 1)], 2 * x1)


class DifferentialOperatorTestCase(unittest.TestCase):

    def setUp(self):
        self.p1 = DifferentialOperator(momentum={0: (1, 0)}, name="P1")
        self.position = DifferentialOperator(potential={0: X1}, name="x1")

    def test_angular_momentum(self):
        angular = DifferentialOperator(momentum={0: (-X2, X1)}, name="L")
        result = angular.apply(SymbolicSpinorFn.from_expr(X1, 0), 0.0, 1.0)
        self.assertAlmostEqual(result[0, 0], 1j)
        self.assertAlmostEqual(result[1, 0], 0)

    def test_plane_wave_eigenvalue(self):
        wave = SymbolicSpinorFn.from_expr(sympy.exp(sympy.I * 0.7 * X1), 0)
        x1, x2 = np.linspace(-1, 1, 5), np.zeros(5)
        self.assertTrue(np.allclose(self.p1.apply(wave, x1, x2), 0.7 * wave(x1, x2)))
        self.assertTrue(np.allclose((self.p1 ** 2).apply(wave, x1, x2), 0.49 * wave(x1, x2)))

    def test_canonical_commutator(self):
        psi = SymbolicSpinorFn.from_expr(sympy.exp(-X1 ** 2) * X2, sympy.cos(X1))
        x1, x2 = np.array([0.2, -0.9]), np.array([1.0, 0.4])
        commutator = self.position.commutator(self.p1)
        self.assertTrue(np.allclose(commutator.apply(psi, x1, x2), 1j * psi(x1, x2)))

    def test_spin_term(self):
        spin = DifferentialOperator(potential={3: sympy.Rational(1, 2)})
        psi = SymbolicSpinorFn.from_expr(1, 1)
        self.assertTrue(np.allclose(spin.apply(psi, 0.0, 0.0)[:, 0], [0.5, -0.5]))

    def test_numbers_as_operators(self):
        psi = SymbolicSpinorFn.from_expr(X1, X2)
        shifted = self.position + 2.5
        self.assertTrue(np.allclose(shifted.apply(psi, 1.0, 2.0)[:, 0], [3.5, 7.0]))
        self.assertTrue(np.allclose(as_operator(3).apply(psi, 1.0, 2.0)[:, 0], [3.0, 6.0]))
        self.assertRaises(TypeError, as_operator, "H")

    def test_orders(self):
        laplacian = DifferentialOperator(laplacian=1)
        self.assertEqual(laplacian.order, 2)
        self.assertEqual((laplacian * self.p1).order, 3)
        self.assertEqual(self.position.order, 0)

    def test_insufficient_jet(self):
        jet = ExprJet(X1)(np.array([0.0]), np.array([0.0]), 0)
        spinor = Jet({(0, 0): np.stack([jet.value, jet.value])}, 0)
        self.assertRaises(MissingDerivativeError, self.p1.apply_jet, spinor, np.array([0.0]), np.array([0.0]))

    def test_negative_power(self):
        self.assertRaises(ValueError, lambda: self.p1 ** 0)


if __name__ == '__main__':
    unittest.main()
