import math
import unittest

from mulab.defaults import slow_tests_enabled
from mulab.errors import CapExceeded, GraphFormatError
from mulab.models import GWConfig, sample_gw_tree
from mulab.rng import Seed
from mulab.trees import (
    RootedTree,
    ahu_code,
    class_product_bound,
    count_subtrees_bruteforce,
    count_subtrees_exact,
    estimate_log_f,
    ln_big,
    log_product_f,
    multichoose,
    recursive_f_plus_bound,
    parse_ahu,
    product_f_lower_bound,
    rooted_at,
    subtree_count_lower,
    subtree_counts_per_node,
    summarize,
    tree_center,
    unrooted_code,
)

# root with a leaf child and a two-node path child
LEAF_AND_CHERRY = RootedTree.from_parents([-1, 0, 0, 2])


def _random_trees(count, size, seed):
    out = []
    for i in range(count):
        rng = Seed(seed).spawn(i).generator()
        parents = [-1] + [int(rng.integers(v)) for v in range(1, size)]
        out.append(RootedTree.from_parents(parents))
    return out


class TestRootedTree(unittest.TestCase):
    def test_from_parents_relabels_bfs(self):
        t = RootedTree.from_parents([2, 2, -1])
        self.assertEqual(t.children[0], (1, 2))
        self.assertEqual(t.parents(), [-1, 0, 0])

    def test_bad_parent_arrays(self):
        with self.assertRaises(GraphFormatError):
            RootedTree.from_parents([])
        with self.assertRaises(GraphFormatError):
            RootedTree.from_parents([-1, -1])
        with self.assertRaises(GraphFormatError):
            RootedTree.from_parents([-1, 2, 1])

    def test_add_leaf(self):
        t = RootedTree.single().add_leaf(0).add_leaf(1)
        self.assertEqual(ahu_code(t), ahu_code(RootedTree.path(3)))


class TestAhu(unittest.TestCase):
    def test_codes(self):
        self.assertEqual(ahu_code(RootedTree.single()), "()")
        self.assertEqual(ahu_code(RootedTree.star(2)), "(()())")
        self.assertEqual(ahu_code(RootedTree.path(3)), "((()))")

    def test_child_order_irrelevant(self):
        a = RootedTree.from_parents([-1, 0, 0, 1])
        b = RootedTree.from_parents([-1, 0, 0, 2])
        self.assertEqual(ahu_code(a), ahu_code(b))

    def test_parse_round_trip(self):
        for t in _random_trees(10, 9, 3):
            self.assertEqual(ahu_code(parse_ahu(ahu_code(t))), ahu_code(t))

    def test_parse_errors(self):
        for bad in ("", "(()", "())", "()()", "(x)"):
            with self.assertRaises(GraphFormatError):
                parse_ahu(bad)


class TestUnrooted(unittest.TestCase):
    def test_center(self):
        path4 = {0: [1], 1: [0, 2], 2: [1, 3], 3: [2]}
        self.assertEqual(tree_center(path4), [1, 2])
        path5 = {0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4], 4: [3]}
        self.assertEqual(tree_center(path5), [2])

    def test_unrooted_code_ignores_labels(self):
        a = {0: [1], 1: [0, 2, 3], 2: [1], 3: [1]}
        b = {5: [9], 9: [5, 7, 8], 7: [9], 8: [9]}
        self.assertEqual(unrooted_code(a), unrooted_code(b))
        self.assertNotEqual(unrooted_code(a), unrooted_code({0: [1], 1: [0, 2], 2: [1, 3], 3: [2]}))

    def test_rooted_at(self):
        tree, order = rooted_at({4: [6], 6: [4, 8], 8: [6]}, 6)
        self.assertEqual(order, [6, 4, 8])
        self.assertEqual(ahu_code(tree), "(()())")


class TestArithmetic(unittest.TestCase):
    def test_multichoose(self):
        self.assertEqual(multichoose(3, 2), 6)
        self.assertEqual(multichoose(1, 5), 1)
        self.assertEqual(multichoose(4, 0), 1)
        self.assertEqual(multichoose(2, -1), 0)

    def test_ln_big(self):
        self.assertAlmostEqual(ln_big(10), math.log(10))
        self.assertAlmostEqual(ln_big(3 << 200), math.log(3) + 200 * math.log(2), places=9)
        with self.assertRaises(ValueError):
            ln_big(0)


class TestSubtreeCounts(unittest.TestCase):
    def test_small_families(self):
        self.assertEqual(count_subtrees_exact(RootedTree.single()).f, 1)
        self.assertEqual(count_subtrees_exact(RootedTree.path(6)).f, 6)
        self.assertEqual(count_subtrees_exact(RootedTree.star(4)).f, 5)

    def test_shared_subtrees_across_classes(self):
        # per-class product gives 6; the leaf child and the path child share a one-node subtree
        t = LEAF_AND_CHERRY
        self.assertEqual(count_subtrees_exact(t).f, 5)
        self.assertEqual(count_subtrees_bruteforce(t).f, 5)
        counts = subtree_counts_per_node(t)
        self.assertEqual(class_product_bound(t, counts, 0), 6)

    def test_exact_matches_brute_force(self):
        for t in _random_trees(25, 12, 7):
            self.assertEqual(count_subtrees_exact(t).f, count_subtrees_bruteforce(t).f, ahu_code(t))

    def test_f_plus(self):
        c = count_subtrees_exact(RootedTree.path(3))
        self.assertEqual(c.f_plus, 4)
        self.assertAlmostEqual(c.ln_f, math.log(3))

    def test_cap_and_lower_bound(self):
        for t in _random_trees(15, 14, 9):
            exact = count_subtrees_exact(t).f
            lower = subtree_count_lower(t, type_cap=2)
            self.assertLessEqual(lower.f, exact)
            self.assertGreaterEqual(lower.f, 1)
            if not lower.exact:
                with self.assertRaises(CapExceeded):
                    count_subtrees_exact(t, type_cap=2)

    def test_lower_bound_dominates_recursive_inequality(self):
        # two isomorphic path children: f_plus >= (3 * 3) / 2! + 1
        t = RootedTree.from_parents([-1, 0, 0, 1, 2])
        self.assertEqual(recursive_f_plus_bound([2, 2]), 6)
        self.assertGreaterEqual(count_subtrees_exact(t).f_plus, recursive_f_plus_bound([2, 2]))

    def test_brute_force_cap(self):
        with self.assertRaises(CapExceeded):
            count_subtrees_bruteforce(RootedTree.path(30))

    def test_forest_products(self):
        trees = [RootedTree.path(3), RootedTree.star(3)]
        self.assertEqual(product_f_lower_bound(trees), 12)
        self.assertAlmostEqual(log_product_f(trees), math.log(12))


class TestGaltonWatsonEstimate(unittest.TestCase):
    def test_summarize(self):
        self.assertEqual(summarize([2.0]), (2.0, 0.0))
        mean, se = summarize([1.0, 3.0])
        self.assertEqual(mean, 2.0)
        self.assertAlmostEqual(se, 1.0)
        self.assertTrue(math.isnan(summarize([])[0]))

    def test_estimate_is_reproducible(self):
        cfg = GWConfig(0.8, 5000)
        a = estimate_log_f(cfg, 200, Seed(3))
        b = estimate_log_f(cfg, 200, Seed(3))
        self.assertEqual(a, b)
        self.assertEqual(a.used + a.truncated_count, 200)
        self.assertGreater(a.mean, 0.0)

    def test_worker_count_does_not_change_result(self):
        cfg = GWConfig(0.8, 5000)
        self.assertEqual(estimate_log_f(cfg, 64, Seed(5), workers=1), estimate_log_f(cfg, 64, Seed(5), workers=2))

    def test_keep_values(self):
        est = estimate_log_f(GWConfig(0.5, 1000), 20, Seed(1), keep_values=True)
        self.assertEqual(len(est.values), est.used)
        self.assertAlmostEqual(sum(est.values) / est.used, est.mean)

    def test_truncated_trees_are_excluded(self):
        est = estimate_log_f(GWConfig(5.0, 3), 20, Seed(2))
        self.assertGreater(est.truncated_count, 0)
        self.assertEqual(est.used + est.truncated_count, 20)

    def test_gw_tree_counts_match_brute_force(self):
        cfg = GWConfig(0.9, 16)
        for i in range(20):
            t = sample_gw_tree(cfg, Seed(30).spawn(i))
            if not t.truncated:
                self.assertEqual(count_subtrees_exact(t).f, count_subtrees_bruteforce(t).f)

    @unittest.skipUnless(slow_tests_enabled(), "set MULAB_SLOW_TESTS=1")
    def test_thousand_random_trees_match_brute_force(self):
        cfg = GWConfig(1.0, 14)
        checked = 0
        for i in range(5000):
            t = sample_gw_tree(cfg, Seed(31).spawn(i))
            if t.truncated:
                continue
            self.assertEqual(count_subtrees_exact(t).f, count_subtrees_bruteforce(t).f, ahu_code(t))
            checked += 1
            if checked == 1000:
                break
        self.assertEqual(checked, 1000)

    @unittest.skipUnless(slow_tests_enabled(), "set MULAB_SLOW_TESTS=1")
    def test_main_bound_at_eps_point_two(self):
        eps = 0.2
        est = estimate_log_f(GWConfig(1 - eps, 1_000_000), 100_000, Seed(0))
        self.assertGreater(est.mean - 5 * est.stderr, 0.003 / eps)


if __name__ == "__main__":
    unittest.main()
