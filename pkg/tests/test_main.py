"""
Tests for the command-line entry point.
"""

import csv
import json
import os
import shutil
import tempfile
import unittest

from gfcodebook.main import build_parser, run
from gfcodebook.utils.report import format_value, render


class TestCommandLine(unittest.TestCase):
    """Exit codes and report output of run()."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _path(self, name):
        return os.path.join(self.temp_dir, name)

    def test_parser_defaults(self):
        args = build_parser().parse_args(["analyze"])
        self.assertEqual((args.construction, args.p, args.t, args.s), ("II", 3, 1, 1))
        self.assertEqual(args.fmt, "json")

    def test_bad_arguments_are_usage_errors(self):
        self.assertEqual(run(["analyze", "--construction", "III", "-q"]), 2)
        self.assertEqual(run(["build", "--construction", "I", "--s", "3", "-q",
                              "--out", self._path("x.txt")]), 2)
        self.assertEqual(run(["analyze", "--p", "4", "-q"]), 2)

    def test_builds_are_byte_identical(self):
        first, second = self._path("a.txt"), self._path("b.txt")
        for path in (first, second):
            self.assertEqual(run(["build", "--s", "2", "--out", path, "-q"]), 0)
        with open(first, "rb") as f, open(second, "rb") as g:
            self.assertEqual(f.read(), g.read())

    def test_json_and_csv_agree(self):
        json_path, csv_path = self._path("r.json"), self._path("r.csv")
        base = ["analyze", "--p", "3", "--t", "2", "--s", "2", "--construction", "I", "-q"]
        self.assertEqual(run(base + ["--out", json_path]), 0)
        self.assertEqual(run(base + ["--format", "csv", "--out", csv_path]), 0)
        with open(json_path) as f:
            data = json.load(f)
        with open(csv_path, newline="") as f:
            row = next(csv.DictReader(f))
        self.assertEqual((data["N"], data["K"]), (80, 36))
        self.assertEqual(data["ratio_bound"], 1.3399)
        for key in ("imax_bound", "welch", "ratio_bound", "imax_empirical"):
            self.assertEqual(float(row[key]), data[key])

    def test_verify_exit_code(self):
        out = self._path("v.json")
        self.assertEqual(run(["verify", "--suite", "PQ", "--out", out, "-q"]), 0)
        with open(out) as f:
            self.assertTrue(json.load(f)["passed"])

    def test_table_csv(self):
        out = self._path("t.csv")
        self.assertEqual(run(["table", "--section", "3", "--rows", "1", "--budget", "100000",
                              "--format", "csv", "--out", out, "-q"]), 0)
        with open(out, newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(rows[0]["K_published"], "2952")


class TestReport(unittest.TestCase):
    """Cell formatting."""

    def test_format_value(self):
        self.assertEqual(format_value(6.5028e-05), "6.5028e-05")
        self.assertEqual(format_value(0.16666), "0.1667")
        self.assertEqual(format_value(36), "36")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(True), "true")

    def test_render(self):
        text = render([{"a": 1, "b": 0.5, "c": [1, 2]}], fmt="csv", precision=2)
        self.assertEqual(text, "a,b\n1,0.50\n")
        self.assertEqual(json.loads(render({"x": 1 / 3}, precision=3)), {"x": 0.333})
        with self.assertRaises(ValueError):
            render({}, fmt="xml")


if __name__ == "__main__":
    unittest.main()
