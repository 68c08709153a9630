"""End-to-end checks of the crowdrank command line tool.

Usage: python3 cli_test.py /path/to/crowdrank
"""

import csv
import json
import os
import subprocess
import sys
import tempfile
import unittest

CLI = None


def run(*args, check=None):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check is not None and proc.returncode != check:
        raise AssertionError(f"{args}: exit {proc.returncode}, expected {check}\n{proc.stderr}")
    return proc


def write(path, text):
    with open(path, "w") as f:
        f.write(text)
    return path


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return os.path.join(self.dir, name)

    def synth(self, name, *flags):
        out = self.path(name)
        run("synth", "--outdir", out, *flags, check=0)
        return out

    def test_check_even_and_odd_rings(self):
        even = self.synth("even", "--family", "ring", "--workers", 6, "--tasks", 60, "--seed", 1)
        rep = json.loads(run("check", os.path.join(even, "observations.csv"), check=0).stdout)
        self.assertFalse(rep["identifiable"])
        self.assertEqual(rep["components"][0]["lambda_min"], 0.0)

        odd = self.synth("odd", "--family", "ring", "--workers", 11, "--tasks", 110, "--seed", 1)
        rep = json.loads(run("check", os.path.join(odd, "observations.csv"), check=0).stdout)
        self.assertTrue(rep["identifiable"])
        self.assertGreater(rep["components"][0]["lambda_min"], 0.0)

    def test_isolated_worker_is_not_estimable(self):
        f = write(self.path("iso.csv"),
                  "worker_id,task_id,label\na,t1,1\nb,t1,1\nc,t1,-1\na,t2,1\nb,t2,-1\n"
                  "c,t2,1\nlonely,t3,1\n")
        rep = json.loads(run("check", f, check=0).stdout)
        single = [c for c in rep["components"] if c["size"] == 1]
        self.assertEqual(len(single), 1)
        self.assertFalse(single[0]["estimable"])

    def test_exit_codes(self):
        bad = write(self.path("bad.csv"), "worker_id,task_id,label\na,t,1\nb,t\n")
        proc = run("check", bad, check=3)
        self.assertIn("bad.csv:3", proc.stderr)
        run("check", write(self.path("empty.csv"), ""), check=3)
        run("check", self.path("missing.csv"), check=3)
        run("estimate", bad, "--eta", "fast", check=2)
        run("estimate", bad, "--method", "newton", check=2)
        run("frobnicate", check=2)

        even = self.synth("even", "--family", "ring", "--workers", 4, "--tasks", 40)
        obs = os.path.join(even, "observations.csv")
        proc = run("estimate", obs, check=4)
        self.assertIn("--force", proc.stderr)
        run("estimate", obs, "--force", check=0)

    def test_synth_contents(self):
        d = self.synth("clique", "--family", "clique", "--workers", 11, "--tasks", 330, "--seed", 4)
        with open(os.path.join(d, "truth.csv")) as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(len(rows), 330)
        with open(os.path.join(d, "skills.json")) as f:
            self.assertEqual(len(json.load(f)["workers"]), 11)

        b = self.synth("beta", "--skills", "beta:1,3", "--workers", 40, "--tasks", 100)
        with open(os.path.join(b, "skills.json")) as f:
            self.assertLess(json.load(f)["meta"]["mean_s"], 0.0)

    def test_determinism(self):
        a = self.synth("a", "--family", "star3", "--tasks", 110, "--seed", 9)
        b = self.synth("b", "--family", "star3", "--tasks", 110, "--seed", 9)
        for name in ("observations.csv", "truth.csv", "skills.json"):
            self.assertEqual(read_bytes(os.path.join(a, name)), read_bytes(os.path.join(b, name)))
        obs = os.path.join(a, "observations.csv")
        run("estimate", obs, "--seed", 3, "-o", self.path("s1.json"), check=0)
        run("estimate", obs, "--seed", 3, "-o", self.path("s2.json"), check=0)
        self.assertEqual(read_bytes(self.path("s1.json")), read_bytes(self.path("s2.json")))

    def test_estimate_infer_eval(self):
        d = self.synth("run", "--family", "clique", "--tasks", 330, "--seed", 3)
        obs = os.path.join(d, "observations.csv")
        truth = os.path.join(d, "truth.csv")
        skills = self.path("skills.json")
        run("estimate", obs, "-o", skills, check=0)
        with open(skills) as f:
            est = json.load(f)
        self.assertEqual(len(est["workers"]), 11)
        for key in ("method", "iterations", "final_loss", "perturbation_bound", "hoeffding_radius"):
            self.assertIn(key, est["meta"])

        pred = self.path("pred.json")
        run("infer", obs, "--skills", skills, "--baseline", "-o", pred, check=0)
        metrics = json.loads(run("eval", "--pred", pred, "--truth", truth,
                                 "--skills-est", skills,
                                 "--skills-true", os.path.join(d, "skills.json"),
                                 "--x", 330, "--series", "clique",
                                 "--csv", self.path("plot.csv"), check=0).stdout)
        self.assertLess(metrics["pe_mean"], 0.1)
        self.assertLess(metrics["skill_error"]["inf"], 0.2)
        with open(self.path("plot.csv")) as f:
            self.assertEqual(f.readline().strip(), "x,mean,std,series")

        # Predictions equal to the truth score 0, flipped ones score 1.
        with open(truth) as f:
            rows = list(csv.DictReader(f))
        def pred_doc(flip):
            tasks = []
            for r in rows:
                lab = int(r["label"])
                if flip:
                    lab = -lab
                cls = 0 if lab == 1 else 1
                tasks.append({"id": r["task_id"], "abstain": False, "label": str(lab), "class": cls})
            return {"tasks": tasks, "meta": {"class_count": 2, "encoding": "pm1"}}
        for flip, expected in ((False, 0.0), (True, 1.0)):
            p = write(self.path(f"p{flip}.json"), json.dumps(pred_doc(flip)))
            m = json.loads(run("eval", "--pred", p, "--truth", truth, check=0).stdout)
            self.assertEqual(m["pe_mean"], expected)

        # Task ids that do not line up are refused.
        doc = pred_doc(False)
        doc["tasks"][0]["id"] = "nope"
        p = write(self.path("mismatch.json"), json.dumps(doc))
        proc = run("eval", "--pred", p, "--truth", truth)
        self.assertNotEqual(proc.returncode, 0)
        self.assertIn("nope", proc.stderr)

    def test_infer_class_mismatch(self):
        d = self.synth("m", "--classes", 3, "--tasks", 200, "--encoding", "class")
        obs = os.path.join(d, "observations.csv")
        skills = self.path("skills3.json")
        run("estimate", obs, "--encoding", "class", "-o", skills, check=0)
        proc = run("infer", obs, "--encoding", "class", "--classes", 4, "--skills", skills)
        self.assertNotEqual(proc.returncode, 0)
        run("infer", obs, "--encoding", "class", "--skills", skills, check=0)

    def test_sweep(self):
        spec = write(self.path("spec.json"), json.dumps({
            "family": "ring", "workers": 11, "task_counts": [33, 110], "seeds": 3, "label": "ring"}))
        out = self.path("sweep.csv")
        run("sweep", spec, "--threads", 2, "-o", out, check=0)
        with open(out) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0].split(",")[:4], ["x", "mean", "std", "series"])
        self.assertEqual(len(lines), 1 + 2 * 3)


if __name__ == "__main__":
    CLI = os.path.abspath(sys.argv.pop(1))
    unittest.main()
