"""End-to-end runs of the command-line tool; every JSON it prints is checked
against the shipped schemas.

usage: cli_test.py PATH_TO_CLI SCHEMA_DIR
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI = None
SCHEMAS = None


def schema(kind):
    with open(os.path.join(SCHEMAS, kind + ".json")) as f:
        return json.load(f)


def run(*args, cwd=None):
    p = subprocess.run([CLI, *args], cwd=cwd, capture_output=True, timeout=600)
    return p.returncode, p.stdout.decode(), p.stderr.decode()


def checked(out):
    doc = json.loads(out)
    jsonschema.validate(doc, schema(doc["kind"]))
    return doc


class Cli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.dir, name)

    def test_exemplar_then_bivariate_discovery(self):
        code, out, _ = run("exemplar", "urn2", "--kb0", "11", "--kr0", "11", "--rounds", "1",
                           "--seed", "7", "--out", self.path("data.csv"))
        self.assertEqual(code, 0)
        doc = checked(out)
        self.assertEqual(doc["seed"], 7)
        with open(self.path("data.csv")) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "Kb,Kr")
        self.assertEqual(len(lines), 10001)
        with open(self.path("data.json")) as f:
            side = json.load(f)
        jsonschema.validate(side, schema("exemplar"))
        self.assertEqual(side["exemplar"]["ground_truth"]["edges"], [["Kb", "Kr"]])

        code, out, _ = run("discover", "--method", "bivariate", "--in", self.path("data.csv"))
        self.assertEqual(code, 0)
        res = checked(out)["result"]
        self.assertEqual(res["verdict"], "XcausesY")
        self.assertTrue(-1.05 <= res["coefficient"] <= -0.95)

    def test_large_urn_is_written(self):
        # rounds = 100 makes the noise nearly Gaussian; only the plumbing is checked
        code, out, _ = run("exemplar", "urn2", "--kb0", "1000", "--kr0", "1000", "--rounds", "100",
                           "--seed", "7", "--rows", "2000", "--out", self.path("big.csv"))
        self.assertEqual(code, 0)
        checked(out)
        with open(self.path("big.csv")) as f:
            self.assertEqual(f.readline().strip(), "Kb,Kr")
        self.assertTrue(os.path.exists(self.path("big.json")))

    def test_multivariate_and_shift(self):
        run("exemplar", "urnN", "--n", "3", "--seed", "2", "--rows", "30000", "--out", self.path("chain.csv"))
        code, out, _ = run("discover", "--method", "multivariate", "--in", self.path("chain.csv"), "--seed", "2")
        self.assertEqual(code, 0)
        edges = sorted(map(tuple, checked(out)["result"]["dag"]["edges"]))
        self.assertEqual(edges, [("K2", "K1"), ("K3", "K1"), ("K3", "K2")])

        run("exemplar", "urn2", "--seed", "5", "--out", self.path("e0.csv"))
        run("exemplar", "urn2", "--seed", "6", "--bias", "0.5,0.5,0.8,0.5", "--out", self.path("e1.csv"))
        code, out, _ = run("discover", "--method", "shift", "--in", self.path("e0.csv"),
                           "--in", self.path("e1.csv"), "--graph", "Kb->Kr")
        self.assertEqual(code, 0)
        self.assertEqual(checked(out)["environments"][0]["changed"], ["Kr"])

    def test_verify(self):
        code, out, _ = run("verify", "--which", "boundary", "--trials", "500", "--seed", "1")
        self.assertEqual(code, 0)
        doc = checked(out)
        self.assertTrue(doc["pass"])
        self.assertEqual(doc["verifiers"]["boundary"]["run"], 500)
        code, out, _ = run("verify", "--which", "all", "--trials", "5", "--seed", "3", "--entries")
        self.assertEqual(code, 0)
        doc = checked(out)
        self.assertEqual(len(doc["entries"]), 20)
        code, text, _ = run("verify", "--which", "prop1", "--trials", "10", "--seed", "3", "--text")
        self.assertEqual(code, 0)
        self.assertTrue(text.startswith("verification: PASS"))

    def test_classify_and_report(self):
        for name in ["urn2", "urnN", "bundles", "rabbits1", "rabbits2", "macro1", "macro2", "balltrack", "farmers"]:
            code, out, err = run("classify", name, "--seed", "1")
            self.assertEqual(code, 0, err)
            doc = checked(out)
            self.assertTrue(all(r["valid"] for r in doc["reports"]), name)
            code, out, err = run("report", name, "--seed", "1", "--rows", "5000")
            self.assertEqual(code, 0, err)
            checked(out)
        code, out, _ = run("classify", "urn2", "--seed", "1", "--graph", "Kr->Kb", "--mode", "statistical")
        doc = checked(out)
        self.assertFalse(doc["reports"][0]["valid"])
        self.assertEqual(doc["direction"], "XcausesY")

    def test_determinism(self):
        args = [["verify", "--which", "all", "--trials", "20", "--seed", "11", "--entries"],
                ["report", "urnN", "--seed", "4", "--rows", "3000"],
                ["exemplar", "bundles", "--seed", "9", "--rows", "100", "--out", "b.csv"]]
        for a in args:
            _, first, _ = run(*a, cwd=self.dir)
            _, second, _ = run(*a, cwd=self.dir)
            self.assertEqual(first, second, a)
        _, one, _ = run("verify", "--which", "all", "--trials", "20", "--seed", "11", "--entries", "--jobs", "4")
        _, two, _ = run("verify", "--which", "all", "--trials", "20", "--seed", "11", "--entries")
        self.assertEqual(one, two)

    def test_usage_errors(self):
        self.assertEqual(run("exemplar", "nope", "--seed", "1")[0], 2)
        self.assertEqual(run("verify", "--which", "all")[0], 2)
        self.assertEqual(run("exemplar", "urn2")[0], 2)
        self.assertEqual(run("frobnicate")[0], 2)
        self.assertEqual(run()[0], 2)
        self.assertEqual(run("exemplar", "urn2", "--kb0", "1", "--rounds", "3", "--seed", "1")[0], 2)
        self.assertEqual(run("classify", "urn2", "--seed", "1", "--graph", "Kb->Nope")[0], 2)
        self.assertEqual(run("exemplar", "urn2", "--seed", "1", "--bias", "0.5")[0], 2)
        self.assertEqual(run("--help")[0], 0)


if __name__ == "__main__":
    CLI, SCHEMAS = os.path.abspath(sys.argv[1]), os.path.abspath(sys.argv[2])
    unittest.main(argv=sys.argv[:1], verbosity=2)
