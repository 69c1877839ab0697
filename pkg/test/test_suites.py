import unittest

import anytree

import pauliplane.task
from pauliplane.catalog import FieldParams
from pauliplane.determining import ResidualReport
from pauliplane.enums import CheckStatus, FamilyId, RelationId
from pauliplane.failures import AdmissibilityError
from pauliplane.suites import (MutationReport, SpectrumRow, family_relations, mutation_control, periodic_spectrum,
                               radial_spectrum, susy_spectrum, verify_family)


class CatalogSuiteTestCase(unittest.TestCase):

    def setUp(self):
        pauliplane.task.reset_tree()

    def test_decoupled_family(self):
        report = verify_family(FamilyId.T1_8, samples=30, probe_count=2, point_count=10)
        self.assertTrue(report.passed)
        self.assertEqual([r.kind for r in report.reports], ["determining", "determining", "commutator",
                                                              "commutator"])
        self.assertLess(report.max_residual, 1e-8)
        self.assertEqual(report.to_json()["family"], report.family)

    def test_relations_and_mutations(self):
        report = verify_family(FamilyId.T2_1, FieldParams(mu=1.3, nu=0.4), samples=30, probe_count=4,
                               point_count=15, seed=1)
        self.assertTrue(report.passed)
        subjects = [r.subject for r in report.reports if r.kind == "mutation"]
        self.assertEqual(len(subjects), 2)
        self.assertTrue(all(isinstance(r, MutationReport) for r in report.reports if r.kind == "mutation"))
        self.assertFalse(report.divergence_free)

    def test_mutation_control_needs_passing_relation(self):
        params = FieldParams(mu=1.3, nu=0.4)
        broken = ResidualReport(family="T2.1", subject="QR", kind="relation", seed=1, n_points=10, max_residual=0.5,
                                mean_residual=0.5, tolerance=1e-8)
        control = mutation_control(RelationId.QR, params, 3, 10, 1, base=broken)
        self.assertGreater(control.max_residual, 1e-5)
        self.assertFalse(control.base_passed)
        self.assertFalse(control.passed)
        self.assertFalse(control.to_json()["base_pass"])
        self.assertTrue(mutation_control(RelationId.QR, params, 3, 10, 1).passed)

    def test_check_tree(self):
        verify_family(FamilyId.T1_8, samples=30, probe_count=2, point_count=10, mutation_controls=False)
        names = [node.call.function.__name__ for node in anytree.PreOrderIter(pauliplane.task.check_tree)]
        self.assertEqual(names, ["no_operation", "verify_family", "verify_operator", "verify_operator",
                                 "verify_commutators"])
        self.assertTrue(pauliplane.task.check_tree.passed)

    def test_admissibility_is_recorded(self):
        self.assertRaises(AdmissibilityError, verify_family, FamilyId.T1_1, FieldParams(k=1.5))
        node = pauliplane.task.check_tree.children[0]
        self.assertEqual(node.status, CheckStatus.FAILED)
        self.assertIsInstance(node.reason, AdmissibilityError)

    def test_divergence_claim(self):
        report = verify_family(FamilyId.T1_2, FieldParams(k=2), samples=30, probe_count=2, point_count=10)
        self.assertTrue(report.divergence_claim)
        self.assertTrue(report.divergence_free)
        self.assertTrue(report.to_json()["divergence_claim"])
        self.assertFalse(verify_family(FamilyId.T1_8, samples=30, probe_count=2, point_count=10).divergence_claim)

    def test_family_relations(self):
        self.assertEqual(family_relations(FamilyId.T2_1), [RelationId.QR, RelationId.QR2])
        self.assertEqual(family_relations(FamilyId.T1_1), [])


class SpectrumSuiteTestCase(unittest.TestCase):

    def setUp(self):
        pauliplane.task.reset_tree()

    def test_periodic(self):
        table = periodic_spectrum(1.0, 0.0, 1)
        self.assertTrue(table.passed)
        self.assertEqual(table.rows[0].closed_form, 0.25)
        self.assertTrue(all(row.numeric is not None for row in table.rows))
        self.assertEqual(table.header()[:4], ["model", "mu", "nu", "omega"])

    def test_radial(self):
        table = radial_spectrum(2.0, 0.5, 0.0, 1, n_levels=2)
        self.assertTrue(table.passed)
        self.assertAlmostEqual(table.rows[0].closed_form, -4.0)
        self.assertEqual(len(table.convergence), 6)

    def test_susy(self):
        table = susy_spectrum(-3, -1, 1.0, 4)
        self.assertEqual([row.label for row in table.rows], ["n=0", "n=1", "n=2"])
        self.assertTrue(table.passed)
        self.assertAlmostEqual(table.rows[1].closed_form, -4.0625)

    def test_susy_without_bound_states(self):
        table = susy_spectrum(1, -1, 1.0, 2)
        self.assertTrue(all(row.numeric is None for row in table.rows))
        self.assertTrue(table.passed)
        self.assertEqual(table.csv_rows()[0][-3:], [None, None, None])

    def test_row_errors(self):
        row = SpectrumRow("n=0", -4.0, -3.9, 1e-2, relative=True)
        self.assertAlmostEqual(row.abs_err, 0.1)
        self.assertAlmostEqual(row.rel_err, 0.025)
        self.assertFalse(row.passed)
        self.assertEqual(row.to_json()["pass"], False)


if __name__ == '__main__':
    unittest.main()
