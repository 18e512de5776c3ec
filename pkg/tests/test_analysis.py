"""
Tests for I_max, the Welch bound, the correlation distribution and the lemma verifiers.
"""

import unittest

import numpy as np

from gfcodebook.core.analysis import (
    brute_force_distribution,
    brute_force_imax,
    chain_bound,
    closed_form_parameters,
    distribution_II,
    expected_distribution,
    imax,
    imax_bound,
    inner_product_I,
    inner_product_II,
    inner_products_I,
    ratio_report,
    verify_bent,
    verify_decomposition_I,
    verify_decomposition_II,
    verify_distribution,
    verify_lemma_A,
    verify_lemma_B,
    verify_P_Q,
    welch_bound,
)
from gfcodebook.core.characters import cyclo_eval
from gfcodebook.core.constructions import build_set_I, build_set_II, codebook_I, codebook_II
from gfcodebook.core.errors import BudgetExceededError, ParameterError
from gfcodebook.core.field import build_tower


class TestClosedForms(unittest.TestCase):
    """Welch bound and closed-form parameters."""

    def test_welch(self):
        self.assertAlmostEqual(welch_bound(80, 36), 0.12438, places=5)
        self.assertEqual(welch_bound(5, 5), 0.0)
        for N, K in [(1, 1), (4, 0), (4, 5)]:
            with self.assertRaises(ParameterError):
                welch_bound(N, K)

    def test_bounds(self):
        self.assertAlmostEqual(imax_bound("I", (3, 2, 2)), 1 / 6)
        self.assertAlmostEqual(imax_bound("I", (19, 1, 2)), 0.068302, places=6)
        self.assertAlmostEqual(imax_bound("II", (3, 2, 2)), 0.015244, places=6)
        self.assertAlmostEqual(imax_bound("II", (19, 1, 2)), 0.003069, places=6)
        with self.assertRaises(ParameterError):
            imax_bound("I", (3, 1, 3))

    def test_closed_form_parameters(self):
        closed = closed_form_parameters("II", (3, 2, 2))
        self.assertEqual((closed["N"], closed["K"]), (6561, 2952))
        self.assertAlmostEqual(closed["welch"], 0.013652, places=6)
        closed = closed_form_parameters("I", (19, 1, 2))
        self.assertEqual((closed["N"], closed["K"]), (360, 171))
        self.assertAlmostEqual(closed["welch"], 0.055486, places=6)

    def test_ratio_stays_below_chain_bound(self):
        for construction in ("I", "II"):
            for t in (1, 2, 3):
                closed = closed_form_parameters(construction, (3, t, 2))
                ratio = closed["imax_bound"] / closed["welch"]
                self.assertGreater(ratio, 1)
                self.assertLess(ratio, chain_bound(construction, (3, t, 2)))

    def test_construction_II_ratio_decreases_with_t(self):
        ratios = []
        for t in (1, 2, 3):
            closed = closed_form_parameters("II", (3, t, 2))
            ratios.append(closed["imax_bound"] / closed["welch"])
        self.assertGreater(ratios[0], ratios[1])
        self.assertGreater(ratios[1], ratios[2])
        np.testing.assert_allclose(ratios, [1.37199, 1.11664, 1.03770], atol=1e-5)

    def test_expected_distribution(self):
        self.assertEqual(expected_distribution((3, 1, 1)), [(-2, 36), (1, 36)])
        self.assertEqual(expected_distribution((3, 1, 2)), [(-6, 2430), (3, 4050)])
        self.assertEqual(expected_distribution((3, 2, 2)), [(-45, 19368072), (36, 23672088)])


class TestConstructionICorrelations(unittest.TestCase):
    """Construction I inner products and lemma sums."""

    def setUp(self):
        self.tower = build_tower((3, 2, 2), with_q2=False)
        self.dset = build_set_I(self.tower)

    def test_exact_matches_fft(self):
        fast = inner_products_I(self.dset)
        for j in (1, 7, 40, 79):
            self.assertAlmostEqual(cyclo_eval(inner_product_I(self.dset, j)), fast[j], places=9)
        with self.assertRaises(ParameterError):
            inner_product_I(self.dset, 0)

    def test_imax_matches_brute_force(self):
        codebook = codebook_I(self.dset)
        self.assertAlmostEqual(imax("I", self.dset), brute_force_imax(codebook), places=9)

    def test_imax_kind_checked(self):
        with self.assertRaises(ParameterError):
            imax("II", self.dset)

    def test_lemmas(self):
        for params in [(3, 1, 2), (3, 2, 2), (5, 1, 2)]:
            tower = build_tower(params, with_q2=False)
            for verifier in (verify_lemma_A, verify_lemma_B):
                report = verifier(tower)
                self.assertTrue(report.passed, report.counterexample)
                self.assertEqual(report.details["method"], "exact")

    def test_lemmas_by_fft(self):
        report = verify_lemma_A(self.tower, exact_limit=0)
        self.assertTrue(report.passed, report.counterexample)
        self.assertEqual(report.details["method"], "fft")
        self.assertTrue(verify_lemma_B(self.tower, exact_limit=0).passed)

    def test_lemma_rejects_p_dividing_s(self):
        with self.assertRaises(ParameterError):
            verify_lemma_A(build_tower((3, 1, 3), with_q2=False))

    def test_decomposition(self):
        report = verify_decomposition_I(self.dset)
        self.assertTrue(report.passed, report.counterexample)
        self.assertEqual(report.checked, 79)


class TestConstructionIICorrelations(unittest.TestCase):
    """Construction II distribution and lemma sums."""

    def setUp(self):
        self.tower = build_tower((3, 1, 2))
        self.dset = build_set_II(self.tower)

    def test_small_distribution(self):
        dset = build_set_II(build_tower((3, 1, 1)))
        self.assertEqual(distribution_II(dset), [(-2, 36), (1, 36)])

    def test_distribution_matches_closed_form(self):
        for params in [(3, 1, 1), (3, 1, 2), (5, 1, 1), (3, 2, 1)]:
            report = verify_distribution(build_set_II(build_tower(params)))
            self.assertTrue(report.passed, report.counterexample)
            self.assertTrue(report.details["signs_match_closed_form"])

    def test_reduced_matches_full_and_brute_force(self):
        reduced = distribution_II(self.dset)
        self.assertEqual(reduced, distribution_II(self.dset, reduced=False))
        self.assertEqual(reduced, brute_force_distribution(codebook_II(self.dset)))

    def test_reduced_imax_matches_brute_force_on_small_towers(self):
        for params in [(3, 1, 1), (3, 1, 2), (5, 1, 1)]:
            tower = build_tower(params)
            dset = build_set_II(tower)
            codebook = codebook_II(dset)
            self.assertEqual(distribution_II(dset), brute_force_distribution(codebook), params)
            self.assertAlmostEqual(imax("II", dset), brute_force_imax(codebook), places=9, msg=params)
            dset_i = build_set_I(tower)
            self.assertAlmostEqual(imax("I", dset_i), brute_force_imax(codebook_I(dset_i)),
                                   places=9, msg=params)

    def test_brute_force_budget(self):
        with self.assertRaises(BudgetExceededError):
            brute_force_distribution(codebook_II(self.dset), max_entries=1000)

    def test_inner_product(self):
        value = inner_product_II(self.dset, 5).rational()
        self.assertIn(value, (-6, 3))
        with self.assertRaises(ParameterError):
            inner_product_II(self.dset, 0)

    def test_imax(self):
        self.assertAlmostEqual(imax("II", self.dset), 6 / 30)
        codebook = codebook_II(self.dset)
        self.assertAlmostEqual(brute_force_imax(codebook), 6 / 30, places=9)

    def test_bent_and_pq(self):
        for params in [(3, 1, 1), (3, 1, 2), (5, 1, 1)]:
            tower = build_tower(params)
            bent = verify_bent(tower)
            self.assertTrue(bent.passed, bent.counterexample)
            pq = verify_P_Q(tower)
            self.assertTrue(pq.passed, pq.counterexample)

    def test_trace_zero_shift_count(self):
        self.assertEqual(verify_P_Q(self.tower).details["trace_zero_shifts"], 20)

    def test_quartic_budget(self):
        with self.assertRaises(BudgetExceededError):
            verify_bent(self.tower, budget=1000)

    def test_decomposition(self):
        report = verify_decomposition_II(self.dset)
        self.assertTrue(report.passed, report.counterexample)
        self.assertEqual(report.checked, 80)


class TestRatioReport(unittest.TestCase):
    """End-to-end analysis of one parameter set."""

    def test_construction_I(self):
        report = ratio_report((3, 2, 2), "I")
        self.assertEqual(report.tier, "exhaustive")
        self.assertAlmostEqual(report.ratio_bound_over_welch, 1.3399, places=4)
        self.assertLessEqual(report.imax_empirical, report.imax_bound + 1e-9)
        self.assertGreaterEqual(report.imax_empirical, report.welch)
        report = ratio_report((19, 1, 2), "I")
        self.assertAlmostEqual(report.ratio_bound_over_welch, 1.2310, places=4)

    def test_construction_II(self):
        report = ratio_report((3, 2, 2), "II")
        self.assertAlmostEqual(report.ratio_bound_over_welch, 1.1166, places=4)
        self.assertAlmostEqual(report.imax_empirical, report.imax_bound, places=9)
        self.assertEqual(report.distribution, [(-45, 19368072), (36, 23672088)])
        self.assertEqual(report.to_dict()["distribution"][0], [-45, 19368072])

    def test_construction_II_q361_exhaustive(self):
        report = ratio_report((19, 1, 2), "II")
        self.assertEqual(report.tier, "exhaustive")
        self.assertEqual((report.N, report.K), (130321, 61902))
        self.assertAlmostEqual(report.imax_empirical, 190 / 61902, places=12)
        self.assertAlmostEqual(report.imax_empirical, 0.0031, places=4)
        self.assertAlmostEqual(report.welch, 0.0029, places=4)
        self.assertAlmostEqual(report.ratio_bound_over_welch, 1.0539, places=4)
        self.assertEqual(report.distribution, [(-190, 8067130542), (171, 8916302178)])

    def test_formula_tier(self):
        report = ratio_report((3, 4, 2), "I", budget=1000)
        self.assertEqual(report.tier, "formula")
        self.assertIsNone(report.imax_empirical)
        self.assertIsNone(report.to_row()["ratio_empirical"])
        self.assertTrue(report.notes)

    def test_invalid_parameters(self):
        with self.assertRaises(ParameterError):
            ratio_report((3, 1, 3), "I")
        with self.assertRaises(ParameterError):
            ratio_report((3, 1, 1), "III")


if __name__ == "__main__":
    unittest.main()
