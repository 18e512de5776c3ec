"""
Tests for the published table regeneration.
"""

import unittest

from gfcodebook.core.errors import ParameterError
from gfcodebook.utils.tables import (
    SECTION_2,
    SECTION_3,
    cell_matches,
    cell_tolerance,
    flatten,
    published_rows,
    regenerate_table,
)

BUDGET = 10 ** 5


class TestCells(unittest.TestCase):
    """Printed cell comparison."""

    def test_tolerance(self):
        self.assertAlmostEqual(cell_tolerance("0.1667"), 1e-4)
        self.assertAlmostEqual(cell_tolerance("6.5028e-05"), 1e-9)
        self.assertAlmostEqual(cell_tolerance("1.19158e+20"), 1e15)
        self.assertEqual(cell_tolerance("80"), 1.0)

    def test_matches(self):
        self.assertTrue(cell_matches("0.1667", 1 / 6))
        self.assertTrue(cell_matches("0.0555", 0.055486))
        self.assertFalse(cell_matches("0.0555", 0.0557))
        self.assertTrue(cell_matches("36", 36))
        self.assertFalse(cell_matches("36", 37))

    def test_row_selection(self):
        construction, rows = published_rows(3, [1, 2])
        self.assertEqual(construction, "II")
        self.assertEqual([row.index for row in rows], [1, 2])
        self.assertEqual(len(SECTION_2), 9)
        self.assertEqual(len(SECTION_3), 9)
        with self.assertRaises(ParameterError):
            published_rows(4)
        with self.assertRaises(ParameterError):
            published_rows(2, [10])


class TestRegeneration(unittest.TestCase):
    """Recomputed rows and disagreement flags."""

    def test_construction_I_table(self):
        results = {r["row"]: r for r in regenerate_table(2, [1, 2, 6, 7, 8], budget=BUDGET)}
        self.assertFalse(results[1]["flagged"])
        self.assertFalse(results[2]["flagged"])
        self.assertEqual(results[1]["tier"], "exhaustive")
        for row in (6, 7, 8):
            self.assertTrue(results[row]["flagged"], row)
            self.assertIn("N", results[row]["mismatched"])
        self.assertEqual(results[7]["tier"], "formula")

    def test_construction_II_table(self):
        progress = []
        results = {r["row"]: r for r in regenerate_table(3, [1, 2, 3, 5], budget=BUDGET,
                                                          progress=progress.append)}
        self.assertEqual(progress, [25, 50, 75, 100])
        self.assertFalse(results[1]["flagged"])
        self.assertFalse(results[2]["flagged"])
        self.assertAlmostEqual(results[1]["imax_empirical"], 45 / 2952)
        self.assertEqual(results[3]["mismatched"], ["K"])
        self.assertEqual(results[5]["mismatched"], ["welch"])

    def test_flatten(self):
        flat = flatten(regenerate_table(3, [1], budget=BUDGET)[0])
        self.assertEqual(flat["K_published"], "2952")
        self.assertEqual(flat["K_recomputed"], 2952)
        self.assertEqual(flat["mismatched"], "")
        self.assertNotIn("cells", flat)


if __name__ == "__main__":
    unittest.main()
