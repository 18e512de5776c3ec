"""
Tests for characters, CycloSum and Gauss sums.
"""

import math
import unittest

import numpy as np

from gfcodebook.core.characters import (
    DENSE_LIMIT,
    AdditiveChar,
    CycloSum,
    MultiplicativeChar,
    cyclo_eval,
    cyclo_rational,
    eta,
    eval_additive,
    eval_multiplicative,
    gauss_matrix,
    gauss_matrix_bytes,
    gauss_sum,
    verify_additive_orthogonality,
    verify_fourier_expansion,
    verify_gauss_properties,
    verify_multiplicative_orthogonality,
    verify_restriction,
)
from gfcodebook.core.errors import BudgetExceededError, ParameterError
from gfcodebook.core.field import build_tower


class TestCycloSum(unittest.TestCase):
    """Exact root-of-unity sums."""

    def test_full_orbit_is_zero(self):
        s = CycloSum.from_exponents(3, [0, 1, 2])
        self.assertEqual(cyclo_rational(s), 0)
        self.assertAlmostEqual(abs(cyclo_eval(s)), 0.0, places=12)

    def test_rational_detection(self):
        self.assertEqual(CycloSum.from_counts([5, 2, 2]).rational(), 3)
        self.assertEqual(CycloSum.from_counts([4, 0, 0]).rational(), 4)
        self.assertIsNone(CycloSum.from_counts([0, 0, 1]).rational())

    def test_rational_needs_prime_order(self):
        with self.assertRaises(ParameterError):
            cyclo_rational(CycloSum.from_counts([1, 0, 0, 0]))

    def test_value_equality_for_prime_order(self):
        a = CycloSum.from_counts([1, 0, 0])
        b = CycloSum.from_counts([2, 1, 1])
        self.assertTrue(a.same_value(b))
        self.assertNotEqual(a, b)
        self.assertFalse(a.same_value(CycloSum.from_counts([0, 1, 0])))

    def test_signed_arithmetic(self):
        a = CycloSum.from_counts([3, 1, 0])
        b = CycloSum.from_counts([1, 1, 1])
        diff = a - b
        np.testing.assert_array_equal(diff.counts, [2, 0, -1])
        np.testing.assert_array_equal((diff + b).counts, a.counts)
        self.assertEqual(diff.scale(2).total, 2)

    def test_evaluation(self):
        s = CycloSum.from_counts([0, 1, 0, 0])
        self.assertAlmostEqual(cyclo_eval(s), 1j)
        lifted = s.lift(8)
        self.assertEqual(lifted.count(2), 1)
        self.assertTrue(lifted.same_value(s))

    def test_sparse_large_order(self):
        m = DENSE_LIMIT * 2 + 1
        s = CycloSum.from_exponents(m, [0, 5, 5, m + 5])
        self.assertEqual(s.count(5), 3)
        self.assertEqual(s.count(7), 0)
        self.assertEqual(s.total, 4)

    def test_mismatched_orders(self):
        with self.assertRaises(ParameterError):
            CycloSum.from_counts([1, 0, 0]) + CycloSum.from_counts([1, 0, 0, 0, 0])


class TestCharacters(unittest.TestCase):
    """Character evaluation and Gauss sums."""

    def setUp(self):
        self.tower = build_tower((3, 1, 2))
        self.tower5 = build_tower((5, 1, 1))

    def test_eta(self):
        self.assertEqual(eta(self.tower, 0), 0)
        self.assertEqual(eta(self.tower, 1), 1)
        values = eta(self.tower5, np.arange(1, 5))
        self.assertEqual(int((values == -1).sum()), 2)

    def test_out_of_range_elements(self):
        with self.assertRaises(ParameterError):
            eta(self.tower, 3)
        with self.assertRaises(ParameterError):
            eta(self.tower, np.array([1, 9]))
        with self.assertRaises(ParameterError):
            eval_multiplicative(self.tower, MultiplicativeChar("q", 1), 9)

    def test_eval_characters(self):
        self.assertEqual(eval_additive(self.tower, AdditiveChar("q", 0), 5), 0)
        self.assertEqual(eval_multiplicative(self.tower, MultiplicativeChar("q", 0), 5), 0)
        ctx = self.tower.ctx_q
        self.assertEqual(eval_multiplicative(self.tower, MultiplicativeChar("q", 1), ctx.primitive), 1)
        with self.assertRaises(ParameterError):
            eval_multiplicative(self.tower, MultiplicativeChar("q", 1), 0)
        with self.assertRaises(ParameterError):
            eval_additive(self.tower, AdditiveChar("x", 1), 1)

    def test_trivial_gauss_sums(self):
        cyclo, value = gauss_sum(self.tower, "q", 0, 0)
        self.assertEqual(cyclo.total, 8)
        self.assertAlmostEqual(value, 8)
        _, value = gauss_sum(self.tower, "q", 0, 1)
        self.assertAlmostEqual(value, -1)

    def test_quadratic_gauss_sum(self):
        # r = 3: eta(-1) = -1, so G(eta, psi)^2 = -3
        _, value = gauss_sum(self.tower, "r", 1, 1)
        self.assertAlmostEqual(value ** 2, -3)

    def test_gauss_sum_matches_matrix(self):
        G = gauss_matrix(self.tower, "q")
        for j in range(8):
            for a in range(9):
                _, value = gauss_sum(self.tower, "q", j, a)
                self.assertAlmostEqual(value, G[j, a], places=9)

    def test_gauss_properties(self):
        for tower in (self.tower, self.tower5, build_tower((3, 2, 2))):
            for level in ("r", "q"):
                report = verify_gauss_properties(tower, level)
                self.assertTrue(report.passed, report.counterexample)
        for tower in (self.tower, self.tower5):
            report = verify_gauss_properties(tower, "q2")
            self.assertTrue(report.passed, report.counterexample)
            self.assertTrue(report.details["full_grid"])
        self.assertEqual(verify_gauss_properties(self.tower5, "q2").details["q"], 25)

    def test_gauss_blocks(self):
        np.testing.assert_allclose(gauss_matrix(self.tower, "q2", block_rows=7),
                                   gauss_matrix(self.tower, "q2"), atol=1e-9)
        blocked = verify_gauss_properties(self.tower, "q2", block_rows=5)
        self.assertTrue(blocked.passed, blocked.counterexample)
        self.assertEqual(blocked.checked, verify_gauss_properties(self.tower, "q2").checked)

    def test_gauss_byte_limit(self):
        self.assertEqual(gauss_matrix_bytes(self.tower.ctx_q), 9 * 8 * 16)
        with self.assertRaises(BudgetExceededError):
            verify_gauss_properties(self.tower, "q", max_bytes=100)

    def test_gauss_magnitude_729(self):
        tower = build_tower((3, 3, 2), with_q2=False)
        report = verify_gauss_properties(tower, "q")
        self.assertTrue(report.passed, report.counterexample)

    def test_fourier_expansion(self):
        for level in ("r", "q", "q2"):
            report = verify_fourier_expansion(self.tower, level)
            self.assertTrue(report.passed, report.counterexample)
        report = verify_fourier_expansion(self.tower, "q", j=3, c=5)
        self.assertEqual(report.checked, 1)
        self.assertTrue(report.passed)
        with self.assertRaises(ParameterError):
            verify_fourier_expansion(self.tower, "q", c=0)

    def test_orthogonality(self):
        for level in ("r", "q", "q2"):
            self.assertTrue(verify_additive_orthogonality(self.tower, level).passed)
            self.assertTrue(verify_multiplicative_orthogonality(self.tower, level).passed)

    def test_restriction_nontrivial(self):
        report = verify_restriction(self.tower)
        self.assertTrue(report.passed, report.counterexample)
        self.assertTrue(report.details["chi_star_nontrivial"])

    def test_restriction_trivial_when_p_divides_s(self):
        report = verify_restriction(build_tower((3, 1, 3), with_q2=False))
        self.assertTrue(report.passed, report.counterexample)
        self.assertFalse(report.details["chi_star_nontrivial"])

    def test_gauss_budget(self):
        with self.assertRaises(BudgetExceededError):
            gauss_matrix(self.tower, "q2", budget=100)
        self.assertTrue(math.isfinite(abs(gauss_sum(self.tower, "q2", 1, 1)[1])))


if __name__ == "__main__":
    unittest.main()
