import json
import unittest

from mulab.defaults import slow_tests_enabled
from mulab.errors import CapExceeded, UsageError
from mulab.experiments import (
    REGISTRY,
    check_boring_inequality,
    run_experiment,
    structured_instance,
)
from mulab.graph import is_regular
from mulab.runspec import EXPERIMENT_DEFAULTS, ExperimentSpec, default_spec

SLOW = slow_tests_enabled()


def _run(name, workers=1, **overrides):
    return run_experiment(default_spec(name, **overrides), workers=workers)


class TestRegistry(unittest.TestCase):
    def test_every_experiment_has_defaults(self):
        self.assertEqual(set(REGISTRY), set(EXPERIMENT_DEFAULTS))

    def test_unknown_name(self):
        with self.assertRaises(UsageError):
            run_experiment(ExperimentSpec(name="nope"))


class TestBoring(unittest.TestCase):
    def test_check_passes(self):
        check = check_boring_inequality(10_000)
        self.assertTrue(check.passed)
        self.assertGreater(check.worst_margin, 0.0)
        self.assertGreater(check.majorant_margin, 0.0)
        self.assertGreater(check.direct_margin, 0.0)
        self.assertEqual(check.grid_points, 10_001)
        self.assertLessEqual(check.worst_p, 0.5)

    def test_grid_too_small(self):
        with self.assertRaises(UsageError):
            check_boring_inequality(1)

    def test_runner(self):
        res = _run("boring", grid_points="2000")
        self.assertTrue(res.passed)
        self.assertEqual(res.verdict_lines(), ["inequality: pass"])

    @unittest.skipUnless(SLOW, "set MULAB_SLOW_TESTS=1")
    def test_full_grid(self):
        self.assertTrue(check_boring_inequality(1_000_000).passed)


class TestXi(unittest.TestCase):
    def test_rows_and_summary(self):
        res = _run("xi", n="60", p="0.5", replicas="3")
        self.assertEqual(len(res.rows), 3)
        self.assertEqual([r["replica"] for r in res.rows], [0, 1, 2])
        self.assertAlmostEqual(res.summary["alpha"], 30.0)
        self.assertIn("median_in_window", res.verdicts)
        for row in res.rows:
            self.assertLessEqual(row["xi_max"], 58)

    def test_worker_count_does_not_change_output(self):
        a = _run("xi", n="40", p="0.3", replicas="4", workers=1)
        b = _run("xi", n="40", p="0.3", replicas="4", workers=2)
        self.assertEqual(a.to_json(), b.to_json())

    def test_provenance(self):
        spec = default_spec("xi", n="30", replicas="1", seed="9")
        res = run_experiment(spec)
        self.assertEqual(res.provenance.spec_hash, spec.spec_hash())
        self.assertEqual(res.provenance.seed, "9:0")
        self.assertEqual(res.to_frame()["spec_hash"].iloc[0], spec.spec_hash())

    def test_needs_two_vertices(self):
        with self.assertRaises(UsageError):
            _run("xi", n="1")


class TestSecondOrder(unittest.TestCase):
    def test_small_grid(self):
        spec = default_spec("second-order", **{"n_grid": "6,8", "p_grid": "0,0.5", "verdict.alpha_slack": "2"})
        res = run_experiment(spec, workers=1)
        self.assertEqual(len(res.rows), 4)
        self.assertEqual(res.summary["grid_points"], 4)
        self.assertTrue(res.passed)
        empty = [r for r in res.rows if r["p"] == 0.0 and r["n"] == 6][0]
        self.assertEqual(empty["mu"], 7)
        self.assertEqual(empty["gap"], 57)

    def test_alpha_check_has_no_slack_by_default(self):
        self.assertEqual(default_spec("second-order").threshold("alpha_slack"), 0.0)
        res = _run("second-order", n_grid="6", p_grid="0.5")
        row = res.rows[0]
        self.assertEqual(row["gap_above_alpha"], row["log2_gap"] is not None and row["log2_gap"] >= row["alpha"])

    def test_grid_above_exact_cap(self):
        with self.assertRaises(CapExceeded):
            _run("second-order", n_grid="10,99")


class TestUniqueness(unittest.TestCase):
    def test_below_threshold_has_verdict(self):
        res = _run("uniqueness", n="400", replicas="4")
        self.assertEqual(len(res.rows), 4)
        self.assertIsInstance(res.verdicts["fraction_both"], bool)
        for row in res.rows:
            self.assertGreaterEqual(row["eta"], 0)
            self.assertGreaterEqual(row["eta_prime"], 0)

    def test_above_threshold_descriptive(self):
        res = _run("uniqueness", n="400", p="3*ln(n)/n", replicas="2")
        self.assertIsNone(res.verdicts["fraction_both"])
        self.assertTrue(res.passed)


class TestThreshold(unittest.TestCase):
    def test_exact_track(self):
        res = _run("threshold", n="8", c_grid="0.5,1,3", replicas="2")
        self.assertEqual(len(res.rows), 6)
        flags = {r["c"]: r["proven_regime"] for r in res.rows}
        self.assertEqual(flags, {0.5: True, 1.0: False, 3.0: True})
        for row in res.rows:
            self.assertLessEqual(row["mu"], 256)
            self.assertGreaterEqual(row["mu"], 9)

    def test_exact_track_cap(self):
        with self.assertRaises(CapExceeded):
            _run("threshold", n="99")

    def test_certificate_track(self):
        res = _run("threshold", n="200", track="certificate", c_grid="0.5,3", replicas="2", path_tries="5")
        self.assertEqual(len(res.rows), 4)
        self.assertTrue(res.verdicts["lower_positive_supercritical"])
        self.assertTrue(res.verdicts["upper_subcritical"])
        for row in res.rows:
            self.assertLessEqual(row["best_lower"], row["best_upper"])

    def test_supercritical_verdict_needs_tree_components(self):
        # G(24, 1/2) is connected: no tree components
        res = _run("threshold", n="24", track="certificate", c_grid="12", replicas="1", path_tries="5")
        self.assertEqual(len(res.rows), 1)
        row = res.rows[0]
        self.assertEqual(row["tree_components"], 0.0)
        self.assertGreater(row["best_lower"], 0.0)
        self.assertFalse(res.verdicts["lower_positive_supercritical"])
        self.assertIsNone(res.verdicts["upper_subcritical"])
        self.assertFalse(res.passed)

    def test_bad_track(self):
        with self.assertRaises(UsageError):
            _run("threshold", track="magic")


class TestTreeComponents(unittest.TestCase):
    def test_counts(self):
        res = _run("tree-components", n="2000", replicas="30", k_list="1,2")
        self.assertEqual(res.summary["dup_k"], 22)
        self.assertAlmostEqual(res.summary["expected_X_1"], 2000 * (1 - 0.5 / 2000) ** 1999)
        self.assertTrue(res.verdicts["Y_22_unique"])
        self.assertIn("X_1_matches_expectation", res.verdicts)
        self.assertIn("Y_2", res.rows[0])

    def test_explicit_dup_k(self):
        res = _run("tree-components", n="500", replicas="3", k_list="1", dup_k="4")
        self.assertEqual(res.summary["dup_k"], 4)
        self.assertIn("X_4", res.rows[0])


class TestGW(unittest.TestCase):
    def test_rows_per_eps(self):
        res = _run("gw", replicas="50", eps_grid="0.3,0.6", max_nodes="5000")
        self.assertEqual([r["eps"] for r in res.rows], [0.3, 0.6])
        self.assertIsNone(res.verdicts["eps_0.6"])
        self.assertIn("eps_0.3", res.verdicts)
        self.assertAlmostEqual(res.rows[0]["bound"], 0.01)

    def test_forests(self):
        res = _run("gw", replicas="20", eps_grid="0.3", forest_replicas="2", forest_size="10", max_nodes="5000")
        self.assertIn("forest_fraction_eps_0.3", res.summary)
        self.assertIn("forest_eps_0.3", res.verdicts)

    def test_workers(self):
        a = _run("gw", replicas="40", eps_grid="0.3", max_nodes="5000", workers=1)
        b = _run("gw", replicas="40", eps_grid="0.3", max_nodes="5000", workers=2)
        self.assertEqual(a.to_json(), b.to_json())

    def test_bad_eps(self):
        with self.assertRaises(UsageError):
            _run("gw", replicas="2", eps_grid="1.5")


class TestAnatomy(unittest.TestCase):
    def test_core_fraction(self):
        res = _run("anatomy", n="2000", replicas="3")
        self.assertAlmostEqual(res.summary["lambda_prime"], 0.40637574, places=6)
        self.assertTrue(res.verdicts["core_fraction"])
        self.assertEqual(res.summary["aut_skipped"], 3)
        for row in res.rows:
            self.assertGreater(row["core_size"], 0)

    def test_lambda_range(self):
        with self.assertRaises(UsageError):
            _run("anatomy", n="100", p="0.5/n")


class TestRegular(unittest.TestCase):
    def test_small(self):
        res = _run("regular", n="200", replicas="2", path_tries="5", edge_trials="50")
        self.assertEqual(len(res.rows), 2)
        self.assertTrue(res.verdicts["spectral"])
        for row in res.rows:
            self.assertGreaterEqual(row["c_empirical"], 0.0)
            self.assertLessEqual(row["second_eigenvalue"], 3.0 + 1e-6)

    def test_degree_checked(self):
        with self.assertRaises(UsageError):
            _run("regular", n="20", d="2")
        with self.assertRaises(UsageError):
            _run("regular", n="21", d="3")


class TestBoundedDegree(unittest.TestCase):
    def test_rows(self):
        res = _run("bounded-degree", n="10", replicas="2", structured="path,matching,empty,paths")
        self.assertEqual([r["family"] for r in res.rows], ["random", "random", "path", "matching", "empty", "paths"])
        for row in res.rows:
            self.assertLessEqual(row["max_degree"], 3)
        empty = [r for r in res.rows if r["family"] == "empty"][0]
        self.assertEqual(empty["mu"], 11)
        for row in res.rows[2:]:
            self.assertLess(row["log2_mu_per_n"], 0.9)

    def test_structured_instances(self):
        self.assertEqual(structured_instance("comb", 8).n, 8)
        self.assertEqual(structured_instance("matching", 6).edge_count(), 3)
        self.assertTrue(is_regular(structured_instance("matching", 6)))
        with self.assertRaises(UsageError):
            structured_instance("comb", 7)
        with self.assertRaises(UsageError):
            structured_instance("star", 7)

    def test_cap(self):
        with self.assertRaises(CapExceeded):
            _run("bounded-degree", n="40")


class TestFailures(unittest.TestCase):
    def test_replica_failure_recorded(self):
        # max degree 0 on a dense graph never succeeds within the retry limit
        res = _run("bounded-degree", n="8", p="0.9", replicas="1", max_degree="0", structured="empty")
        self.assertEqual(res.failure_count, 1)
        self.assertEqual(res.summary["failed_replicas"], 1)
        data = json.loads(res.to_json())
        self.assertEqual(data["failures"][0]["category"], "sampling")
        self.assertEqual(len(res.rows), 1)


class TestDeterminism(unittest.TestCase):
    CASES = (
        ("xi", {"n": "40", "p": "0.3", "replicas": "4"}),
        ("tree-components", {"n": "500", "replicas": "6", "k_list": "1,2"}),
        ("gw", {"replicas": "40", "eps_grid": "0.3", "max_nodes": "5000"}),
        ("threshold", {"n": "8", "c_grid": "0.5,3", "replicas": "2"}),
    )

    def test_worker_counts_give_identical_output(self):
        for name, overrides in self.CASES:
            spec = default_spec(name, **overrides)
            ref = run_experiment(spec, workers=1)
            for workers in (4, 16):
                res = run_experiment(spec, workers=workers)
                with self.subTest(experiment=name, workers=workers):
                    self.assertEqual(res.to_json(), ref.to_json())
                    self.assertEqual(res.to_csv(), ref.to_csv())


@unittest.skipUnless(SLOW, "set MULAB_SLOW_TESTS=1")
class TestAcceptanceRuns(unittest.TestCase):
    """Default specs at full scale; minutes each with four workers."""

    def test_gw_mean_log_subtree_count(self):
        res = _run("gw", workers=4)
        for eps in ("0.05", "0.1", "0.2"):
            self.assertTrue(res.verdicts[f"eps_{eps}"], eps)

    def test_core_size(self):
        res = _run("anatomy", workers=4)
        self.assertTrue(res.verdicts["core_fraction"])
        self.assertLessEqual(abs(res.summary["mean_core_fraction"] - res.summary["expected_core_fraction"]), 0.05)

    def test_xi_concentration_in_every_replica(self):
        res = _run("xi", workers=4)
        self.assertEqual(len(res.rows), 5)
        for row in res.rows:
            self.assertGreaterEqual(row["normalized"], 0.5)
            self.assertLessEqual(row["normalized"], 1.3)

    def test_tree_component_counts(self):
        res = _run("tree-components", workers=4)
        for k in (1, 2, 3):
            self.assertTrue(res.verdicts[f"X_{k}_matches_expectation"], k)
        self.assertTrue(res.verdicts[f"Y_{res.summary['dup_k']}_unique"])

    def test_isolated_vertex_regime(self):
        res = _run("uniqueness", workers=4)
        self.assertTrue(res.verdicts["fraction_both"])

    def test_regular_spectral_bound_and_comb(self):
        res = _run("regular", workers=4)
        self.assertEqual(len(res.rows), 10)
        for row in res.rows:
            self.assertLess(row["second_eigenvalue"], 3.829)
        self.assertTrue(res.verdicts["comb"])


if __name__ == "__main__":
    unittest.main()
