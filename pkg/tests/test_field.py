"""
Tests for the finite field tower.
"""

import unittest

import numpy as np

from gfcodebook.core.errors import BudgetExceededError, ParameterError
from gfcodebook.core.field import (
    TowerParams,
    add,
    build_field,
    build_tower,
    find_modulus,
    inv,
    mul,
    neg,
    norm_table,
    power,
    sub,
    trace,
    trace_table,
    verify_embedding,
    verify_trace_properties,
    verify_trace_transitivity,
)


class TestTowerParams(unittest.TestCase):
    """Parameter validation and derived orders."""

    def test_derived_orders(self):
        params = TowerParams(3, 2, 2)
        self.assertEqual((params.r, params.q, params.q2), (9, 81, 6561))
        self.assertEqual(params.degree("q2"), 8)

    def test_rejects_bad_parameters(self):
        for p, t, s in [(2, 1, 1), (9, 1, 1), (3, 0, 1), (3, 1, 0)]:
            with self.assertRaises(ParameterError):
                TowerParams(p, t, s)
        with self.assertRaises(ParameterError):
            TowerParams(True, 1, 1)

    def test_unknown_level(self):
        with self.assertRaises(ParameterError):
            TowerParams(3, 1, 1).degree("z")


class TestFieldArithmetic(unittest.TestCase):
    """Arithmetic on GF(9) and GF(25)."""

    def setUp(self):
        self.f9 = build_field(3, 2)
        self.f25 = build_field(5, 2)

    def test_smallest_modulus_and_primitive(self):
        self.assertEqual(find_modulus(3, 2), (1, 0, 1))
        self.assertEqual(self.f9.modulus, (1, 0, 1))
        self.assertEqual(self.f9.primitive, 4)
        self.assertEqual(build_field(3, 1).primitive, 2)

    def test_log_tables(self):
        for ctx in (self.f9, self.f25):
            self.assertEqual(ctx.log[0], -1)
            x = np.arange(1, ctx.order)
            np.testing.assert_array_equal(ctx.antilog[ctx.log[x]], x)
            self.assertEqual(len(set(ctx.antilog.tolist())), ctx.group_order)

    def test_inverse_and_negation(self):
        for ctx in (self.f9, self.f25):
            x = np.arange(1, ctx.order)
            np.testing.assert_array_equal(mul(ctx, x, inv(ctx, x)), np.ones_like(x))
            y = ctx.elements()
            np.testing.assert_array_equal(add(ctx, y, neg(ctx, y)), np.zeros_like(y))
            np.testing.assert_array_equal(sub(ctx, y, y), np.zeros_like(y))

    def test_distributive(self):
        ctx = self.f9
        x = ctx.elements()
        a, b, c = np.meshgrid(x, x, x, indexing="ij")
        lhs = mul(ctx, a, add(ctx, b, c))
        rhs = add(ctx, mul(ctx, a, b), mul(ctx, a, c))
        np.testing.assert_array_equal(lhs, rhs)

    def test_scalar_in_scalar_out(self):
        self.assertIsInstance(mul(self.f9, 4, 4), int)
        self.assertEqual(power(self.f9, 4, 8), 1)
        self.assertEqual(power(self.f9, 0, 0), 1)

    def test_zero_has_no_inverse(self):
        with self.assertRaises(ParameterError):
            inv(self.f9, 0)

    def test_out_of_range_element(self):
        with self.assertRaises(ParameterError):
            add(self.f9, 9, 1)

    def test_rebuild_is_identical(self):
        again = build_field(3, 2)
        self.assertEqual(again.modulus, self.f9.modulus)
        np.testing.assert_array_equal(again.antilog, self.f9.antilog)

    def test_budget(self):
        with self.assertRaises(BudgetExceededError):
            build_field(3, 8, budget=1000)


class TestTower(unittest.TestCase):
    """Embeddings, traces and norms."""

    def setUp(self):
        self.tower = build_tower(TowerParams(3, 1, 2))
        self.tower22 = build_tower((3, 2, 2))

    def test_embeddings_are_homomorphisms(self):
        for tower in (self.tower, self.tower22):
            report = verify_embedding(tower)
            self.assertTrue(report.passed, report.counterexample)

    def test_trace_of_one_is_s(self):
        self.assertEqual(trace(self.tower, "q", "r", 1), 2)
        self.assertEqual(trace(self.tower22, "q", "r", 1), 2)

    def test_trace_transitivity(self):
        for tower in (self.tower, self.tower22):
            report = verify_trace_transitivity(tower)
            self.assertTrue(report.passed, report.counterexample)

    def test_trace_linear_and_balanced(self):
        report = verify_trace_properties(self.tower22)
        self.assertTrue(report.passed, report.counterexample)
        self.assertEqual(report.details["fibre_size"], 9)

    def test_trace_values_lie_in_subfield(self):
        table = trace_table(self.tower22, "q2", "r")
        self.assertTrue(((table >= 0) & (table < 9)).all())

    def test_norm(self):
        norms = norm_table(self.tower)
        self.assertEqual(norms[0], 0)
        self.assertEqual(norms[1], 1)
        counts = np.bincount(norms[1:], minlength=self.tower.params.q)
        np.testing.assert_array_equal(counts[1:], np.full(self.tower.params.q - 1, self.tower.params.q + 1))

    def test_subfield_order_checks(self):
        with self.assertRaises(ParameterError):
            trace_table(self.tower, "r", "q")
        with self.assertRaises(ParameterError):
            self.tower.embedding("q", "r")

    def test_tower_without_quadratic_extension(self):
        tower = build_tower((3, 1, 2), with_q2=False)
        self.assertIsNone(tower.ctx_q2)
        with self.assertRaises(ParameterError):
            tower.field("q2")

    def test_budget(self):
        with self.assertRaises(BudgetExceededError):
            build_tower((3, 2, 2), budget=1000)


if __name__ == "__main__":
    unittest.main()
