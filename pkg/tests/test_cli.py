import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

from mulab.cli import main


def _call(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class CliCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text, encoding="ascii")
        return str(path)


class TestMuCommand(CliCase):
    def test_exact_prints_plain_integers(self):
        path = self.write("g.g6", "D~{\nCh\n")
        code, out, _ = _call(["mu", "exact", path])
        self.assertEqual(code, 0)
        self.assertEqual(out, "6\n7\n")

    def test_bounds_json(self):
        path = self.write("p4.g6", "Ch\n")
        code, out, _ = _call(["mu", "bounds", path, "--exact", "--format", "json"])
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertEqual(data["exact"], 7)
        self.assertTrue(data["upper_bounds"])

    def test_sample_record(self):
        path = self.write("k5.g6", "D~{\n")
        code, out, _ = _call(["mu", "sample", path, "--samples", "50", "--seed", "4"])
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("n=5 "))
        self.assertIn("distinct-sample:", out)

    def test_cap_is_usage_error(self):
        path = self.write("k5.g6", "D~{\n")
        code, _, err = _call(["mu", "exact", path, "--cap", "4"])
        self.assertEqual(code, 2)
        self.assertIn("mu-lab: error:", err)

    def test_missing_file(self):
        code, _, err = _call(["mu", "exact", str(self.tmp / "absent.g6")])
        self.assertEqual(code, 2)
        self.assertTrue(err)

    def test_output_file(self):
        path = self.write("k5.g6", "D~{\n")
        target = self.tmp / "out" / "mu.txt"
        code, out, _ = _call(["mu", "exact", path, "-o", str(target)])
        self.assertEqual(code, 0)
        self.assertEqual(out, "")
        self.assertEqual(target.read_text(encoding="utf-8"), "6\n")


class TestGenCommand(CliCase):
    def test_generated_graph_feeds_mu(self):
        code, out, _ = _call(["gen", "gnp", "--n", "8", "--p", "0.5", "--seed", "3", "--graph-format", "edges"])
        self.assertEqual(code, 0)
        path = self.write("g.txt", out)
        code, out, _ = _call(["mu", "exact", path])
        self.assertEqual(code, 0)
        self.assertGreaterEqual(int(out), 9)

    def test_reproducible(self):
        argv = ["gen", "regular", "--n", "10", "--d", "3", "--seed", "5", "--count", "3"]
        first = _call(argv)[1]
        self.assertEqual(first, _call(argv)[1])
        self.assertEqual(len(first.splitlines()), 3)

    def test_comb(self):
        code, out, _ = _call(["gen", "comb", "--n", "3"])
        self.assertEqual(code, 0)
        path = self.write("comb.g6", out)
        self.assertEqual(_call(["anatomy", "core", path])[0], 0)


class TestTreeCommand(CliCase):
    def test_count_subtrees(self):
        path = self.write("trees.txt", "# cherry\n(()())\n")
        code, out, _ = _call(["tree", "count-subtrees", path])
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "size,f,ln_f,exact")
        self.assertTrue(out.splitlines()[1].startswith("3,4,"))

    def test_brute_json(self):
        path = self.write("trees.txt", "(()())\n")
        code, out, _ = _call(["tree", "count-subtrees", path, "--brute", "--format", "json"])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)[0]["f"], 4)


class TestAnatomyCommand(CliCase):
    def test_lambda_prime(self):
        code, out, _ = _call(["anatomy", "lambda-prime", "--lambda", "2"])
        self.assertEqual(code, 0)
        self.assertAlmostEqual(float(out), 0.40637574, places=6)

    def test_lambda_prime_needs_value(self):
        self.assertEqual(_call(["anatomy", "lambda-prime"])[0], 2)

    def test_core_needs_file(self):
        self.assertEqual(_call(["anatomy", "core"])[0], 2)


class TestExpCommand(CliCase):
    def test_boring(self):
        code, out, err = _call(["exp", "boring", "--set", "grid_points=1000"])
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("passed,worst_margin"))
        self.assertIn("inequality: pass", err)
        self.assertIn("experiment = boring", err)

    def test_spec_file_json(self):
        spec = self.write("spec.txt", "experiment = xi\nn = 30\nreplicas = 2\n")
        code, out, _ = _call(["exp", "xi", "--spec", spec, "--format", "json", "--seed", "2"])
        self.assertIn(code, (0, 1))
        data = json.loads(out)
        self.assertEqual(data["provenance"]["seed"], "2:0")
        self.assertEqual(len(data["rows"]), 2)

    def test_unknown_key_prints_help(self):
        code, _, err = _call(["exp", "xi", "--set", "bogus=1"])
        self.assertEqual(code, 2)
        self.assertIn("bogus", err)
        self.assertIn("spec keys", err)

    def test_malformed_set(self):
        self.assertEqual(_call(["exp", "xi", "--set", "oops"])[0], 2)


class TestCheckCommand(CliCase):
    def test_boring(self):
        code, out, _ = _call(["check", "boring", "--grid-points", "1000"])
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("passed=true "))


class TestParser(unittest.TestCase):
    def test_version(self):
        with contextlib.redirect_stdout(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["--version"])
        self.assertEqual(cm.exception.code, 0)

    def test_missing_command(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main([])
        self.assertEqual(cm.exception.code, 2)


if __name__ == "__main__":
    unittest.main()
