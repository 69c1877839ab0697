import unittest

import numpy as np
import sympy

from pauliplane.catalog import FieldParams, build_family
from pauliplane.determining import (ConditionSet, FirstOrderOperator, NumericField, ReducedConstants,
                                    ResidualReport, apply_operator, determining_report, lie_reduction_check,
                                    residual_de, residual_e1, sample_points)
from pauliplane.enums import FamilyId, OperatorId, Regime, SymmetryKind
from pauliplane.failures import DomainError, InvalidRegimeError
from pauliplane.jet import X1
from pauliplane.spinor import Spinor, SymbolicSpinorFn


class ConditionSetTestCase(unittest.TestCase):

    def test_regimes(self):
        self.assertEqual(ConditionSet.classify(ReducedConstants(a=1, b=2)).regime, Regime.ROTATION_AND_SPIN)
        self.assertEqual(ConditionSet.classify(ReducedConstants(b=2, c3=1)).regime, Regime.SPIN_ROTATION)
        self.assertEqual(ConditionSet.classify(ReducedConstants(a=1)).regime, Regime.ROTATION)
        self.assertEqual(ConditionSet.classify(ReducedConstants(c1=1, d1=3)).regime, Regime.SPIN_TRANSLATION)

    def test_no_regime(self):
        self.assertRaises(InvalidRegimeError, ConditionSet.classify, ReducedConstants())
        self.assertRaises(InvalidRegimeError, ConditionSet.classify, ReducedConstants(a=1, c3=1))


class FirstOrderOperatorTestCase(unittest.TestCase):

    def test_reduced_constants(self):
        operator = FirstOrderOperator.from_constants(a=2, b=-1, c1=0.5, c2=0.25, c3=3, c4=4, d1=5, d2=6)
        self.assertEqual(operator.rotation, (-2.0, 0.0, 0.0, 1.0))
        self.assertEqual(operator.reduced_constants(),
                         ReducedConstants(a=2, b=-1, c1=0.5, c2=0.25, c3=3, c4=4, d1=5, d2=6))

    def test_not_reduced(self):
        operator = FirstOrderOperator(rotation=(0, 1, 0, 0))
        self.assertRaises(InvalidRegimeError, operator.reduced_constants)

    def test_invalid_constants(self):
        self.assertRaises(DomainError, FirstOrderOperator, rotation=(0, 0, 0))
        self.assertRaises(DomainError, FirstOrderOperator, rotation=(np.inf, 0, 0, 0))
        self.assertRaises(DomainError, FirstOrderOperator().perturbed, "C9", 1.0)

    def test_perturbed(self):
        operator = FirstOrderOperator(rotation=(1, 0, 0, 0), name="L").perturbed("C31", 0.5)
        self.assertEqual(operator.translation[3], (0.5, 0.0))
        self.assertEqual(operator.rotation[0], 1.0)

    def test_lie_reduction(self):
        angular = FirstOrderOperator(rotation=(1, 0, 0, 0), omega=(0, 0, 0, 0.5))
        self.assertEqual(lie_reduction_check(angular), SymmetryKind.LIE)
        spin_dependent = FirstOrderOperator(translation=((0, 0), (0, 0), (0, 0), (1, 0)))
        self.assertEqual(lie_reduction_check(spin_dependent), SymmetryKind.HIGHER)
        varying = FirstOrderOperator(omega=(0, 0, 0, X1))
        self.assertEqual(lie_reduction_check(varying), SymmetryKind.HIGHER)

    def test_apply_angular_momentum(self):
        angular = FirstOrderOperator(rotation=(1, 0, 0, 0), name="L")
        result = apply_operator(angular, SymbolicSpinorFn.from_expr(X1, 0), 0.0, 1.0)
        self.assertIsInstance(result, Spinor)
        self.assertAlmostEqual(result.upper, 1j)
        self.assertAlmostEqual(result.lower, 0)


class ResidualTestCase(unittest.TestCase):

    def test_catalog_operators_satisfy_determining_equations(self):
        for family_id in FamilyId:
            family = build_family(family_id)
            for descriptor in family.operators:
                report = determining_report(family, descriptor.operator, 3, 40, 1e-8, family.sampling_annulus(),
                                            family.center, family=family.name)
                self.assertTrue(report.passed, "%s of %s: %s" % (descriptor.operator.name, family.name,
                                                                  report.max_residual))

    def test_perturbation_is_detected(self):
        family = build_family(FamilyId.T1_8)
        operator = family.operator(OperatorId.L).operator.perturbed("C01", 1e-3)
        x1, x2 = sample_points(0, 30, *family.sampling_annulus())
        self.assertGreater(residual_de(family, operator, x1, x2).max_abs(), 1e-5)

    def test_potential_slot(self):
        family = build_family(FamilyId.T1_8)
        rotation = family.operator(OperatorId.L).operator
        x1, x2 = sample_points(1, 30)
        radial = residual_de(family, rotation, x1, x2, potential=sympy.sqrt(X1 ** 2 + 1))
        self.assertGreater(radial.max_abs(), 1e-3)
        self.assertIn("potential", radial.summary())

    def test_reduced_system(self):
        family = build_family(FamilyId.T2_3, FieldParams(mu=0.8, nu=1.5))
        q5 = family.operator(OperatorId.Q5).operator
        x1, x2 = sample_points(2, 40, *family.sampling_annulus())
        residual = residual_e1(family, q5.omega[1:], q5.reduced_constants(), x1, x2)
        self.assertEqual(residual.condition_set.regime, Regime.SPIN_TRANSLATION)
        self.assertEqual(residual.components.shape, (10, 40))
        self.assertLess(residual.max_abs(), 1e-10)

    def test_domain_is_checked(self):
        family = build_family(FamilyId.T2_3)
        operator = family.operator(OperatorId.Q5).operator
        self.assertRaises(DomainError, residual_de, family, operator, 2.0, 0.0)


class NumericFieldTestCase(unittest.TestCase):

    def test_finite_difference_jacobian(self):
        field = NumericField(lambda x1, x2: np.stack([np.sin(x1 * x2), np.zeros_like(x1), x1 ** 2]))
        jacobian = field.jacobian(np.array([0.3]), np.array([1.1]))
        self.assertAlmostEqual(jacobian[0, 0, 0], 1.1 * np.cos(0.33), places=8)
        self.assertAlmostEqual(jacobian[0, 1, 0], 0.3 * np.cos(0.33), places=8)
        self.assertAlmostEqual(jacobian[2, 0, 0], 0.6, places=8)
        self.assertAlmostEqual(jacobian[2, 1, 0], 0.0, places=8)

    def test_uniform_field(self):
        field = NumericField(lambda x1, x2: np.stack([np.zeros_like(x1), np.zeros_like(x1), np.ones_like(x1)]))
        spin = FirstOrderOperator(omega=(0, 0, 0, 1), name="σ3")
        x1, x2 = sample_points(0, 10)
        self.assertLess(residual_de(field, spin, x1, x2).max_abs(), 1e-12)


class SamplingTestCase(unittest.TestCase):

    def test_annulus(self):
        x1, x2 = sample_points(7, 500, 0.5, 1.5, center=(1.0, -2.0))
        distance = np.hypot(x1 - 1.0, x2 + 2.0)
        self.assertTrue(np.all((distance >= 0.5) & (distance <= 1.5)))

    def test_seeded(self):
        first, second = sample_points(11, 20), sample_points(11, 20)
        self.assertTrue(np.array_equal(first[0], second[0]))
        self.assertFalse(np.array_equal(first[0], sample_points(12, 20)[0]))

    def test_invalid_annulus(self):
        self.assertRaises(DomainError, sample_points, 0, 10, 2.0, 1.0)


class ResidualReportTestCase(unittest.TestCase):

    def test_passed(self):
        report = ResidualReport("T1.8", "L", "determining", 0, 10, 1e-12, 1e-13, 1e-8)
        self.assertTrue(report.passed)
        self.assertTrue(report.to_json()["pass"])
        self.assertFalse(ResidualReport("T1.8", "L", "determining", 0, 10, np.nan, np.nan, 1e-8).passed)
        self.assertFalse(ResidualReport("T1.8", "L", "determining", 0, 10, 1e-6, 1e-7, 1e-8).passed)


if __name__ == '__main__':
    unittest.main()
