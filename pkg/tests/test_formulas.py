import math
import unittest

import numpy as np

from mulab import formulas as F
from mulab.errors import DomainError


class TestSecondOrder(unittest.TestCase):
    def test_q(self):
        self.assertEqual(F.q(0.5), 0.5)
        self.assertEqual(F.q(0.0), 1.0)
        self.assertAlmostEqual(F.q(0.1), 0.82)

    def test_alpha_beta(self):
        self.assertAlmostEqual(F.alpha_n(100, 0.5), 50.0)
        self.assertAlmostEqual(F.beta_n(100, 0.5), math.sqrt(100 * math.log(100)))
        self.assertEqual(F.beta_n(1, 0.5), 0.0)
        self.assertAlmostEqual(F.second_order_prediction(100, 0.5), 50.0 + math.sqrt(100 * math.log(100)))

    def test_xi_moments(self):
        self.assertAlmostEqual(F.xi_pair_mean(10, 0.5), 4.0)
        self.assertAlmostEqual(F.xi_pair_variance(10, 0.5), 2.0)


class TestWindows(unittest.TestCase):
    def test_subset_window(self):
        lo, hi = F.subset_window(100)
        r = math.sqrt(100 * math.log(100))
        self.assertAlmostEqual(lo, 50 - r)
        self.assertAlmostEqual(hi, 50 + r)

    def test_degree_window(self):
        lo, hi = F.degree_window(100, 0.5)
        r = math.sqrt(2 * 100 * 0.25 * math.log(100))
        self.assertAlmostEqual(lo, 50 - r)
        self.assertAlmostEqual(hi, 50 + r)


class TestComponents(unittest.TestCase):
    def test_isolated_vertices(self):
        self.assertAlmostEqual(F.expected_tree_components(10, 1, 0.1), 10 * 0.9**9)

    def test_single_edges(self):
        self.assertAlmostEqual(F.expected_tree_components(5, 2, 0.2), 10 * 0.2 * 0.8**6)

    def test_out_of_range(self):
        self.assertEqual(F.expected_tree_components(5, 0, 0.2), 0.0)
        self.assertEqual(F.expected_tree_components(5, 6, 0.2), 0.0)

    def test_outside_isolated(self):
        self.assertAlmostEqual(F.expected_outside_isolated(10, 4, 0.5), 0.375)

    def test_threshold_k(self):
        self.assertEqual(F.tree_threshold_k(100), 13)

    def test_c1(self):
        self.assertAlmostEqual(F.c1(0.5), 1 + 3 * (0.5 + math.log(0.5)))
        with self.assertRaises(DomainError):
            F.c1(0.0)

    def test_class_bounds(self):
        self.assertEqual(F.tree_class_bound(3), 192)
        self.assertEqual(F.small_class_bound(2), 128)


class TestBranching(unittest.TestCase):
    def test_conjugate_core_fraction(self):
        lam, lp = 2.0, 0.40637574
        self.assertLess(F.conjugate_fixed_point_residual(lam, lp), 1e-7)
        self.assertAlmostEqual(F.core_fraction(lam, lp), (1 - lp) * (1 - lp / lam))
        self.assertAlmostEqual(F.giant_fraction(lam, lp), 1 - lp / lam)

    def test_progeny(self):
        self.assertAlmostEqual(F.gw_total_progeny_mean(0.5), 2.0)
        with self.assertRaises(DomainError):
            F.gw_total_progeny_mean(1.0)

    def test_gw_bounds(self):
        self.assertAlmostEqual(F.gw_main_bound(0.1), 0.03)
        self.assertAlmostEqual(F.gw_many_bound(10, 0.1), 0.2)


class TestMisc(unittest.TestCase):
    def test_spectral(self):
        self.assertAlmostEqual(F.regular_spectral_bound(3), 2 * math.sqrt(2) + 1)

    def test_comb_floor(self):
        self.assertEqual(F.comb_log2_floor(10), 7.0)

    def test_moved_edges(self):
        with self.assertRaises(DomainError):
            F.moved_edges_log_bound(10, 0.1, 1.0)
        self.assertLess(F.moved_edges_log_bound(10000, 0.5, 0.5), 0.0)


class TestBoring(unittest.TestCase):
    def test_gap_matches_direct_difference(self):
        for p in (0.05, 0.3, 0.5, 0.9):
            self.assertAlmostEqual(F.boring_gap(p), F.boring_rhs(p) - F.boring_lhs(p))

    def test_gap_positive_inside(self):
        grid = np.linspace(1e-6, 1 - 1e-6, 2001)
        self.assertTrue(bool(np.all(F.boring_gap(grid) > 0)))

    def test_gap_zero_at_origin(self):
        self.assertAlmostEqual(float(F.boring_gap(0.0)), 0.0)

    def test_majorant_below_gap(self):
        grid = np.linspace(0.01, 0.99, 99)
        self.assertTrue(bool(np.all(F.boring_majorant_gap(grid) <= F.boring_gap(grid) + 1e-12)))


if __name__ == "__main__":
    unittest.main()
