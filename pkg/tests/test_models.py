import math
import unittest

import numpy as np

from mulab.errors import DomainError, RetryLimit
from mulab.formulas import subset_window
from mulab.graph import complete_graph, empty_graph, is_regular
from mulab.models import (
    GWConfig,
    sample_gnp,
    sample_gw_tree,
    sample_max_degree_gnp,
    sample_regular,
    sample_subset,
    sample_subset_in_window,
)
from mulab.rng import Seed, as_seed


class TestSeed(unittest.TestCase):
    def test_same_seed_same_stream(self):
        a = Seed(7).generator().random(4)
        b = Seed(7).generator().random(4)
        np.testing.assert_array_equal(a, b)

    def test_substreams_differ(self):
        s = Seed(7)
        self.assertNotEqual(s.spawn(0), s.spawn(1))
        self.assertNotEqual(s.substream("a"), s.substream("b"))
        self.assertEqual(s.substream("a", 3), Seed(7).substream("a", 3))
        self.assertEqual(s.spawn(2).value, 7)

    def test_as_seed(self):
        self.assertEqual(as_seed("5:9"), Seed(5, 9))
        self.assertEqual(as_seed(5), Seed(5))
        self.assertEqual(as_seed(None), Seed(0))
        self.assertEqual(str(Seed(5, 9)), "5:9")
        with self.assertRaises(ValueError):
            as_seed("x")
        with self.assertRaises(ValueError):
            Seed(-1)


class TestGnp(unittest.TestCase):
    def test_deterministic(self):
        self.assertEqual(sample_gnp(50, 0.3, Seed(1)), sample_gnp(50, 0.3, Seed(1)))
        self.assertEqual(sample_gnp(500, 0.004, Seed(1)), sample_gnp(500, 0.004, Seed(1)))
        self.assertNotEqual(sample_gnp(50, 0.3, Seed(1)), sample_gnp(50, 0.3, Seed(2)))

    def test_extremes(self):
        self.assertEqual(sample_gnp(6, 0.0, Seed(1)), empty_graph(6))
        self.assertEqual(sample_gnp(6, 1.0, Seed(1)), complete_graph(6))
        with self.assertRaises(DomainError):
            sample_gnp(6, 1.5, Seed(1))

    def test_edge_count_near_mean_dense(self):
        n, p = 300, 0.3
        g = sample_gnp(n, p, Seed(3)).validate()
        mean = p * n * (n - 1) / 2
        sd = math.sqrt(mean * (1 - p))
        self.assertLess(abs(g.edge_count() - mean), 6 * sd)

    def test_edge_count_near_mean_sparse(self):
        n, p = 2000, 0.002
        g = sample_gnp(n, p, Seed(4)).validate()
        mean = p * n * (n - 1) / 2
        self.assertLess(abs(g.edge_count() - mean), 6 * math.sqrt(mean))


class TestMaxDegree(unittest.TestCase):
    def test_respects_bound(self):
        g = sample_max_degree_gnp(30, 2 / 30, 3, Seed(9))
        self.assertLessEqual(max(g.degrees()), 3)

    def test_gives_up(self):
        with self.assertRaises(RetryLimit):
            sample_max_degree_gnp(10, 0.9, 1, Seed(9), retry_limit=5)


class TestRegular(unittest.TestCase):
    def test_degrees(self):
        for i in range(3):
            g = sample_regular(40, 3, Seed(2).spawn(i)).validate()
            self.assertTrue(is_regular(g))
            self.assertEqual(g.degree(0), 3)

    def test_invalid_parameters(self):
        with self.assertRaises(DomainError):
            sample_regular(5, 3, Seed(0))
        with self.assertRaises(DomainError):
            sample_regular(4, 4, Seed(0))


class TestSubsets(unittest.TestCase):
    def test_uniform_subset_size(self):
        sizes = [sample_subset(200, Seed(1).spawn(i)).bit_count() for i in range(50)]
        self.assertLess(abs(sum(sizes) / 50 - 100), 10)
        self.assertEqual(sample_subset(0, Seed(1)), 0)

    def test_window(self):
        lo, hi = subset_window(100)
        for i in range(20):
            s = sample_subset_in_window(100, lo, hi, Seed(6).spawn(i))
            self.assertTrue(lo <= s.bit_count() <= hi)
            self.assertLess(s, 1 << 100)

    def test_window_retry_limit(self):
        with self.assertRaises(RetryLimit):
            sample_subset_in_window(100, 99, 100, Seed(0), retry_limit=3)


class TestGaltonWatson(unittest.TestCase):
    def test_config_validation(self):
        with self.assertRaises(DomainError):
            GWConfig(0.0)
        with self.assertRaises(DomainError):
            GWConfig(0.5, 0)

    def test_subcritical_mean_size(self):
        cfg = GWConfig(0.5, 10_000)
        sizes = [sample_gw_tree(cfg, Seed(12).spawn(i)).size for i in range(2000)]
        # total progeny mean 1 / (1 - 0.5) = 2, variance lambda / (1 - lambda)^3 = 4
        self.assertLess(abs(sum(sizes) / len(sizes) - 2.0), 6 * math.sqrt(4.0 / len(sizes)))

    def test_truncation_flag(self):
        cfg = GWConfig(5.0, 1)
        trees = [sample_gw_tree(cfg, Seed(1).spawn(i)) for i in range(10)]
        self.assertTrue(all(t.size == 1 for t in trees))
        self.assertTrue(any(t.truncated for t in trees))

    def test_deterministic(self):
        cfg = GWConfig(0.9, 10_000)
        self.assertEqual(sample_gw_tree(cfg, Seed(4)), sample_gw_tree(cfg, Seed(4)))


if __name__ == "__main__":
    unittest.main()
