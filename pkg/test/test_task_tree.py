import unittest

import anytree

import pauliplane.task
from pauliplane.determining import ResidualReport
from pauliplane.enums import CheckStatus, FamilyId
from pauliplane.failures import DomainError
from pauliplane.task import CheckCall, assess, with_check


def report(residual: float, tolerance: float = 1e-3) -> ResidualReport:
    return ResidualReport("T1.1", "Q1", "unit", 0, 1, residual, residual, tolerance)


@with_check
def passing_check(residual: float):
    return report(residual)


@with_check
def failing_check(residual: float):
    return [report(1e-6), report(residual)]


@with_check
def suite():
    passing_check(1e-4)
    failing_check(0.5)


class CheckTreeTestCase(unittest.TestCase):

    def setUp(self):
        pauliplane.task.reset_tree()

    def test_tree_creation(self):
        suite()
        tree = pauliplane.task.check_tree

        self.assertEqual(4, len(tree.root))
        self.assertEqual(2, len(tree.root.leaves))
        names = [node.call.function.__name__ for node in anytree.PreOrderIter(tree.root)]
        self.assertEqual(names, ["no_operation", "suite", "passing_check", "failing_check"])

    def test_statuses(self):
        suite()
        tree = pauliplane.task.check_tree
        suite_node = tree.children[0]
        passing, failing = suite_node.children
        self.assertEqual(passing.status, CheckStatus.PASSED)
        self.assertAlmostEqual(passing.residual, 1e-4)
        self.assertEqual(failing.status, CheckStatus.FAILED)
        self.assertAlmostEqual(failing.residual, 0.5)
        self.assertEqual(failing.tolerance, 1e-3)
        self.assertFalse(tree.passed)
        self.assertTrue(passing.passed)

    def test_exception(self):
        """A toolkit failure marks the node and is re-raised."""

        @with_check
        def broken_check():
            raise DomainError("outside of the domain")

        self.assertRaises(DomainError, broken_check)
        tree = pauliplane.task.check_tree
        self.assertEqual(len(tree), 2)
        node = tree.children[0]
        self.assertEqual(node.status, CheckStatus.FAILED)
        self.assertIsInstance(node.reason, DomainError)
        self.assertIsNotNone(node.end_time)
        self.assertIs(pauliplane.task.check_tree, tree)

    def test_reset(self):
        suite()
        pauliplane.task.reset_tree()
        tree = pauliplane.task.check_tree
        self.assertEqual(len(tree), 1)
        self.assertEqual(tree.status, CheckStatus.RUNNING)

    def test_to_json(self):
        suite()
        document = pauliplane.task.check_tree.to_json(timestamps=False)
        self.assertNotIn("start_time", document)
        failing = document["children"][0]["children"][1]
        self.assertEqual(failing["call"], {"function": "failing_check", "kwargs": {"residual": 0.5}})
        self.assertEqual(failing["status"], "FAILED")
        self.assertIn("start_time", pauliplane.task.check_tree.to_json())


class CheckCallTestCase(unittest.TestCase):

    def test_kwargs_to_json(self):
        call = CheckCall(passing_check, {"family": FamilyId.T2_1, "residual": 0.1, "opaque": object()})
        self.assertEqual(call.kwargs_to_json(), {"family": "T2.1", "residual": 0.1})

    def test_equality(self):
        self.assertEqual(CheckCall(passing_check, {"residual": 1}), CheckCall(passing_check, {"residual": 1}))
        self.assertNotEqual(CheckCall(passing_check, {"residual": 1}), CheckCall(failing_check, {"residual": 1}))
        self.assertEqual(str(CheckCall(passing_check, {"residual": 1})), "passing_check(residual)")

    def test_no_operation(self):
        self.assertIsNone(CheckCall().execute())


class AssessTestCase(unittest.TestCase):

    def test_single_report(self):
        self.assertEqual(assess(report(1e-4)), (True, 1e-4, 1e-3))

    def test_nested_results(self):
        passed, residual, tolerance = assess({"a": [report(1e-5)], "b": (report(2.0, 1.0), "text")})
        self.assertFalse(passed)
        self.assertEqual(residual, 2.0)
        self.assertEqual(tolerance, 1.0)

    def test_no_reports(self):
        self.assertEqual(assess(None), (None, None, None))
        self.assertEqual(assess([1, 2]), (None, None, None))


if __name__ == '__main__':
    unittest.main()
