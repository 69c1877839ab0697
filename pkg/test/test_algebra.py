import unittest

import numpy as np

from pauliplane.algebra import (RELATION_FAMILIES, GaussianProbe, check_relation, commutes, dilation_operator,
                                identity_residual, mutual_commutativity, random_probes, relation_definition)
from pauliplane.catalog import FieldParams, build_family
from pauliplane.determining import sample_points
from pauliplane.enums import FamilyId, RelationId
from pauliplane.failures import DomainError
from pauliplane.operators import DifferentialOperator


class ProbeTestCase(unittest.TestCase):

    def test_seeded(self):
        first, second = random_probes(2, 5), random_probes(2, 5)
        x1, x2 = np.array([0.1, 0.7]), np.array([-0.4, 1.2])
        self.assertTrue(np.array_equal(first[1](x1, x2), second[1](x1, x2)))

    def test_exact_derivatives(self):
        probe = random_probes(1, 0)[0]
        x1, x2 = np.array([0.3]), np.array([-0.6])
        step = 1e-5
        numeric = (probe(x1 + step, x2) - probe(x1 - step, x2)) / (2 * step)
        self.assertTrue(np.allclose(probe.gradient(x1, x2)[0], numeric, atol=1e-7))

    def test_coefficient_shape(self):
        self.assertRaises(DomainError, GaussianProbe, np.zeros((2, 3)), 0.2, (0.0, 0.0))


class RelationTestCase(unittest.TestCase):

    def check(self, relation, params=FieldParams()):
        report = check_relation(relation, params, probe_count=4, point_count=15, seed=1)
        self.assertTrue(report.passed, "%s: %s" % (relation.value, report.details))
        return report

    def test_periodic_relations(self):
        report = self.check(RelationId.QR, FieldParams(mu=1.3, nu=0.4))
        self.assertGreater(report.printed_residual, 1e-3)
        self.check(RelationId.QR2, FieldParams(mu=1.3, nu=0.4))

    def test_periodic_identities_act_on_x1_dependence(self):
        report = self.check(RelationId.QR, FieldParams(mu=1.0, nu=0.5))
        self.assertLess(report.details["Q3² = H - 2νQ2 + ν² + μ²"], 1e-8)
        self.assertLess(report.details["H = Q2² - Q3 - 1/4"], 1e-8)
        self.assertLess(report.details["[Q2, Q3] = 0"], 1e-8)

    def test_angular_relation(self):
        report = self.check(RelationId.AL, FieldParams(mu=0.8, nu=0.6, k=2))
        self.assertGreater(report.printed_residual, 1e-3)

    def test_conformal_algebra(self):
        report = self.check(RelationId.CA, FieldParams(mu=0.8, nu=0.6, k=1))
        self.assertGreater(report.printed_residual, 1e-3)

    def test_disc_relations(self):
        self.check(RelationId.SA3, FieldParams(mu=0.5, nu=1.5))
        self.check(RelationId.SA31, FieldParams(mu=0.5, nu=1.5))

    def test_profile_relations(self):
        for relation in (RelationId.SA1, RelationId.SA2, RelationId.SA11):
            self.check(relation, FieldParams(mu=0.7, nu=0.3, c=1.2))

    def test_mutation_is_detected(self):
        for relation in (RelationId.QR, RelationId.AL, RelationId.CA, RelationId.SA3, RelationId.SA1):
            report = check_relation(relation, probe_count=3, point_count=10, seed=2, tolerance=np.inf,
                                    mutation=1e-3)
            self.assertGreater(report.max_residual, 1e-5, relation.value)

    def test_mutation_blind_relation(self):
        report = check_relation(RelationId.SA2, probe_count=3, point_count=10, seed=2, mutation=1e-3)
        self.assertTrue(report.passed)

    def test_definitions(self):
        for relation in RelationId:
            definition = relation_definition(relation)
            self.assertEqual(definition.family.family_id, RELATION_FAMILIES[relation])
            self.assertTrue(len(definition.identities) > 0)

    def test_report_serialization(self):
        report = self.check(RelationId.QR2)
        document = report.to_json()
        self.assertEqual(document["subject"], "QR2")
        self.assertEqual(document["family"], "T2.1")
        self.assertIn("printed_residual", document)


class CommutativityTestCase(unittest.TestCase):

    def test_decoupled_family(self):
        residuals = mutual_commutativity(build_family(FamilyId.T1_8), probe_count=3, point_count=10)
        self.assertEqual(set(residuals), {("L", "σ3"), ("L", "H"), ("σ3", "H")})
        self.assertLess(max(residuals.values()), 1e-10)

    def test_without_hamiltonian(self):
        residuals = mutual_commutativity(build_family(FamilyId.T2_1), probe_count=3, point_count=10,
                                         with_hamiltonian=False)
        self.assertEqual(len(residuals), 3)
        self.assertLess(max(residuals.values()), 1e-10)

    def test_commutes(self):
        probes = random_probes(2, 0)
        x1, x2 = sample_points(0, 10)
        momentum = DifferentialOperator(momentum={0: (1, 0)})
        self.assertLess(commutes(momentum, 2.0, probes, x1, x2), 1e-12)
        self.assertGreater(commutes(momentum, dilation_operator(), probes, x1, x2), 1e-3)

    def test_identity_residual_shape(self):
        definition = relation_definition(RelationId.QR)
        x1, x2 = sample_points(0, 5)
        values = identity_residual(definition.identities[0], random_probes(3, 0), x1, x2)
        self.assertEqual(values.shape, (3,))

    def test_shared_jets_leave_residuals_unchanged(self):
        definition = relation_definition(RelationId.QR)
        probes = random_probes(3, 0)
        x1, x2 = sample_points(0, 5)
        jets = {}
        shared = [identity_residual(identity, probes, x1, x2, jets) for identity in definition.identities]
        fresh = [identity_residual(identity, probes, x1, x2) for identity in definition.identities]
        self.assertEqual(set(jets), {identity.order for identity in definition.identities})
        for a, b in zip(shared, fresh):
            np.testing.assert_array_equal(a, b)


if __name__ == '__main__':
    unittest.main()
