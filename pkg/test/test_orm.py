import unittest

import sqlalchemy
import sqlalchemy.orm

import pauliplane.orm.base
import pauliplane.orm.check
import pauliplane.orm.records
import pauliplane.task
from pauliplane.determining import ResidualReport
from pauliplane.enums import CheckStatus, ModelKind
from pauliplane.suites import SpectrumRow, SpectrumTable
from pauliplane.task import with_check


@with_check
def tolerance_check(residual: float):
    return ResidualReport("T1.8", "L", "determining", 3, 10, residual, residual / 2, 1e-8)


@with_check
def catalog_suite():
    tolerance_check(1e-10)
    tolerance_check(1e-6)


class ORMTestSchema(unittest.TestCase):
    engine: sqlalchemy.engine.Engine
    session: sqlalchemy.orm.Session

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.engine = sqlalchemy.create_engine("sqlite+pysqlite:///:memory:", echo=False)

    def setUp(self):
        super().setUp()
        pauliplane.orm.base.RunMetaData.reset()
        pauliplane.orm.base.Base.metadata.create_all(self.engine)
        self.session = sqlalchemy.orm.Session(bind=self.engine)
        self.session.commit()

    def tearDown(self):
        super().tearDown()
        self.session.close()
        pauliplane.orm.base.Base.metadata.drop_all(self.engine)
        pauliplane.orm.base.RunMetaData.reset()

    def test_schema_creation(self):
        tables = list(pauliplane.orm.base.Base.metadata.tables.keys())
        self.assertTrue("RunMetaData" in tables)
        self.assertTrue("CheckNodeRecord" in tables)
        self.assertTrue("ResidualRecord" in tables)
        self.assertTrue("SpectrumRecord" in tables)

    def test_metadata_singleton(self):
        first = pauliplane.orm.base.RunMetaData()
        self.assertIs(first, pauliplane.orm.base.RunMetaData())
        first.insert(self.session)
        self.assertTrue(first.committed())
        first.insert(self.session)
        self.assertEqual(len(self.session.scalars(sqlalchemy.select(pauliplane.orm.base.RunMetaData)).all()), 1)

    def test_residual_insert(self):
        report = ResidualReport("T2.1", "Q3", "determining", 0, 20, 1e-12, 1e-13, 1e-8)
        record = report.insert(self.session)
        stored = self.session.scalars(sqlalchemy.select(pauliplane.orm.records.ResidualRecord)).all()
        self.assertEqual(len(stored), 1)
        self.assertEqual(stored[0].subject, "Q3")
        self.assertTrue(stored[0].passed)
        self.assertEqual(record.run_metadata_id, pauliplane.orm.base.RunMetaData().id)

    def test_check_tree_insert(self):
        pauliplane.task.reset_tree()
        catalog_suite()
        pauliplane.task.check_tree.insert(self.session, use_progress_bar=False)
        nodes = self.session.scalars(sqlalchemy.select(pauliplane.orm.check.CheckNodeRecord)).all()
        self.assertEqual(len(nodes), 4)
        self.assertEqual([node.function for node in nodes],
                         ["no_operation", "catalog_suite", "tolerance_check", "tolerance_check"])
        self.assertEqual(nodes[2].status, CheckStatus.PASSED)
        self.assertEqual(nodes[3].status, CheckStatus.FAILED)
        self.assertEqual(nodes[3].parent.function, "catalog_suite")
        self.assertIsNone(nodes[0].parent_id)

    def test_spectrum_insert(self):
        table = SpectrumTable(ModelKind.RADIAL, {"alpha": 2.0}, [SpectrumRow("n=0", -4.0, -4.0001, 1e-4, True),
                                                                 SpectrumRow("n=1", -0.5, None, 1e-4)])
        self.session.add_all(table.to_sql())
        self.session.commit()
        rows = self.session.scalars(sqlalchemy.select(pauliplane.orm.records.SpectrumRecord)).all()
        self.assertEqual([row.label for row in rows], ["n=0", "n=1"])
        self.assertIsNone(rows[1].numeric)
        self.assertAlmostEqual(rows[0].rel_err, 2.5e-5)


if __name__ == '__main__':
    unittest.main()
