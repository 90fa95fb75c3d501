import json
import math
import pickle
import tempfile
import unittest
from pathlib import Path

import numpy as np

from mulab.errors import CapExceeded, DomainError, ErrorCategory, RetryLimit, UsageError, failure_from_exception
from mulab.graph import path_graph
from mulab.mu import mu_exact
from mulab.origin import Provenance
from mulab.parallel import indexed_map
from mulab.results import ExperimentResult, clean_value, fraction, median
from mulab.rng import Seed
from mulab.runspec import (
    EXPERIMENT_DEFAULTS,
    PSpec,
    build_spec,
    default_spec,
    load_spec,
    parse_kv,
    spec_help,
)


class TestPSpec(unittest.TestCase):
    def test_parse_forms(self):
        self.assertEqual(PSpec.parse("0.3"), PSpec("const", 0.3))
        self.assertEqual(PSpec.parse("2/n"), PSpec("per_n", 2.0))
        self.assertEqual(PSpec.parse("1.5 * ln(n) / n"), PSpec("log_per_n", 1.5))

    def test_value(self):
        self.assertAlmostEqual(PSpec.parse("2/n").value(100), 0.02)
        self.assertAlmostEqual(PSpec.parse("1*ln(n)/n").value(100), math.log(100) / 100)
        self.assertEqual(PSpec.parse("0.5").value(7), 0.5)

    def test_str(self):
        self.assertEqual(str(PSpec.parse("1/n")), "1/n")
        self.assertEqual(str(PSpec.parse("1.5*ln(n)/n")), "1.5*ln(n)/n")
        self.assertEqual(str(PSpec.parse("0.3")), "0.3")

    def test_errors(self):
        with self.assertRaises(UsageError):
            PSpec.parse("n/2")
        with self.assertRaises(DomainError):
            PSpec.parse("5/n").value(3)


class TestSpec(unittest.TestCase):
    def test_parse_kv(self):
        values = parse_kv("# header\nn = 10  # inline\n\np = 1/n\n")
        self.assertEqual(values, {"n": "10", "p": "1/n"})
        with self.assertRaises(UsageError):
            parse_kv("n = 1\nn = 2\n")
        with self.assertRaises(UsageError):
            parse_kv("just words\n")

    def test_defaults_filled(self):
        spec = default_spec("xi")
        self.assertEqual(spec.n, EXPERIMENT_DEFAULTS["xi"]["n"])
        self.assertEqual(spec.option("block_rows"), "256")
        self.assertEqual(spec.threshold("median_lo"), 0.5)
        self.assertEqual(spec.seed, Seed(0))

    def test_overrides(self):
        spec = load_spec("experiment = xi\nn = 50\nseed = 3:1\nblock_rows = 8\nverdict.median_hi = 2\n")
        self.assertEqual(spec.n, 50)
        self.assertEqual(spec.seed, Seed(3, 1))
        self.assertEqual(spec.opt_int("block_rows"), 8)
        self.assertEqual(spec.threshold("median_hi"), 2.0)

    def test_unknown_keys_rejected(self):
        with self.assertRaises(UsageError) as cm:
            build_spec("xi", {"bogus": "1", "verdict.nope": "2"})
        self.assertIn("bogus", str(cm.exception))
        self.assertIn("verdict.nope", str(cm.exception))
        with self.assertRaises(UsageError):
            build_spec("no-such-experiment", {})
        with self.assertRaises(UsageError):
            build_spec(None, {})
        with self.assertRaises(UsageError):
            build_spec("xi", {"experiment": "gw"})

    def test_bad_values(self):
        with self.assertRaises(UsageError):
            default_spec("xi", n="ten")
        with self.assertRaises(UsageError):
            default_spec("xi", seed="x")
        with self.assertRaises(DomainError):
            default_spec("xi", replicas="0")

    def test_hash_is_canonical(self):
        a = load_spec("experiment = xi\nn = 50\nblock_rows = 8\n")
        b = load_spec("block_rows = 8\nn = 50\nexperiment = xi\n")
        self.assertEqual(a.to_text(), b.to_text())
        self.assertEqual(a.spec_hash(), b.spec_hash())
        self.assertNotEqual(a.spec_hash(), default_spec("xi", n="51").spec_hash())
        self.assertEqual(load_spec(a.to_text()), a)

    def test_option_access(self):
        spec = default_spec("threshold")
        self.assertEqual(spec.opt_floats("c_grid")[0], 0.2)
        self.assertEqual(spec.opt_list("track"), ["exact"])
        with self.assertRaises(UsageError):
            spec.option("missing")
        self.assertAlmostEqual(spec.p_value(), 1 / 12)
        self.assertIsNone(default_spec("regular").p)

    def test_help_lists_experiments(self):
        text = spec_help()
        for name in EXPERIMENT_DEFAULTS:
            self.assertIn(f"  {name}:", text)
        self.assertIn("block_rows=256", spec_help("xi"))
        self.assertNotIn("gw:", spec_help("xi"))


def _result(verdicts):
    prov = Provenance(experiment="demo", spec_text="experiment = demo\n", spec_hash="abc123", seed="0:0")
    rows = [
        {"replica": 0, "x": 1.23456789, "ok": True},
        {"replica": 1, "x": float("nan"), "ok": False, "extra": 2},
    ]
    failure = failure_from_exception(CapExceeded("mu_exact", 30, 24), replica=2)
    return ExperimentResult("demo", rows, {"mean_x": np.float64(1.5)}, verdicts, [failure], prov)


class TestResults(unittest.TestCase):
    def test_clean_value(self):
        self.assertEqual(clean_value(np.int64(3)), 3)
        self.assertIsInstance(clean_value(np.bool_(True)), bool)
        self.assertIsNone(clean_value(float("inf")))
        self.assertEqual(clean_value((1, np.float64(0.5))), [1, 0.5])
        self.assertEqual(clean_value(1 / 3, 3), 0.333)
        self.assertEqual(clean_value(np.arange(3)), [0, 1, 2])

    def test_passed_ignores_descriptive(self):
        self.assertTrue(_result({"a": True, "b": None}).passed)
        self.assertFalse(_result({"a": True, "b": False}).passed)

    def test_verdict_lines(self):
        lines = _result({"b": None, "a": True, "c": False}).verdict_lines()
        self.assertEqual(lines, ["a: pass", "b: n/a", "c: FAIL"])

    def test_csv(self):
        text = _result({"a": True}).to_csv()
        lines = text.splitlines()
        self.assertEqual(lines[0], "replica,x,ok,extra,spec_hash")
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[1].endswith("abc123"))

    def test_json(self):
        data = json.loads(_result({"a": True}).to_json())
        self.assertEqual(data["experiment"], "demo")
        self.assertEqual(data["summary"], {"mean_x": 1.5})
        self.assertIsNone(data["rows"][1]["x"])
        self.assertEqual(data["failure_count"], 1)
        self.assertEqual(data["failures"][0]["category"], ErrorCategory.CAP.value)
        self.assertEqual(data["failures"][0]["details"]["cap"], 24)
        self.assertEqual(data["provenance"]["spec_hash"], "abc123")
        self.assertNotIn("elapsed", json.dumps(data))

    def test_render_and_save(self):
        res = _result({"a": True})
        with self.assertRaises(UsageError):
            res.render("xml")
        with tempfile.TemporaryDirectory() as tmp:
            path = res.save(Path(tmp) / "sub" / "out.csv", fmt="csv")
            self.assertEqual(path.read_text(encoding="utf-8"), res.to_csv())

    def test_helpers(self):
        self.assertEqual(fraction([True, False, True, True]), 0.75)
        self.assertTrue(math.isnan(fraction([])))
        self.assertEqual(median([1.0, float("nan"), 3.0]), 2.0)


class TestErrors(unittest.TestCase):
    def test_errors_survive_pickling(self):
        for exc in (CapExceeded("mu_exact", 30, 24), RetryLimit("regular", 10)):
            copy = pickle.loads(pickle.dumps(exc))
            self.assertIs(type(copy), type(exc))
            self.assertEqual(str(copy), str(exc))
            self.assertEqual(vars(copy), vars(exc))

    def test_cap_error_crosses_process_pool(self):
        with self.assertRaises(CapExceeded) as ctx:
            indexed_map(mu_exact, [path_graph(70), path_graph(71)], workers=2)
        self.assertEqual(ctx.exception.size, 70)
        self.assertEqual(ctx.exception.what, "mu_exact")


if __name__ == "__main__":
    unittest.main()
