from __future__ import annotations

import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from twistedconj.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run
from twistedconj.makelist import GOLDEN_ENV, golden_dir

from .conftest import SCHEMAS


def schema(name: str) -> dict:
    return json.loads((SCHEMAS / f"{name}.json").read_text())


def ok_json(argv, name=None):
    code, out = run(argv)
    assert code == EXIT_OK, out
    doc = json.loads(out)
    if name:
        jsonschema.validate(doc, schema(name))
    return doc


class TestMakelist:
    def test_json(self):
        doc = ok_json(["makelist", "--k", "0,0,0,1"], "makelist")
        assert len(doc["rows"]) == 24 and doc["k"] == [0, 0, 0, 1]

    def test_parity_reduction(self):
        assert run(["makelist", "--k", "2,4,6,3"])[1] == run(["makelist", "--k", "0,0,0,1"])[1]

    def test_md(self):
        code, out = run(["makelist", "--k", "0,0,0,1", "--format", "md"])
        assert code == EXIT_OK
        body = [ln for ln in out.splitlines() if ln.startswith("| [")]
        assert len(body) == 24
        assert body[0] == "| [0 1; 1 0] | (0, 0) | 4N |"

    def test_csv(self):
        code, out = run(["makelist", "--k", "0,0,1,0", "--format", "csv"])
        assert code == EXIT_OK and len(out.strip().splitlines()) == 5

    def test_swapped(self):
        doc = ok_json(["makelist", "--k", "0,1,0,0"], "makelist")
        assert len(doc["rows"]) == 4 and "(0, 0, 1, 0)" in doc["note"]
        rows = ok_json(["makelist", "--k", "0,0,1,0"])["rows"]
        assert doc["rows"] == rows

    @pytest.mark.parametrize("k", ["0,0,1", "a,b,c,d", ""])
    def test_usage(self, k):
        assert run(["makelist", "--k", k])[0] == EXIT_USAGE

    def test_bad_format(self):
        assert run(["makelist", "--k", "0,0,0,1", "--format", "xml"])[0] == EXIT_USAGE


class TestVerify:
    def test_all(self):
        code, out = run(["verify", "--all"])
        assert code == EXIT_OK and "12/12" in out and "0 findings" in out

    def test_parallel(self):
        assert run(["verify", "--tables", "--parallel", "4"]) == run(["verify", "--tables"])

    def test_corrupted(self, tmp_path, monkeypatch):
        shutil.copytree(golden_dir(), tmp_path, dirs_exist_ok=True)
        path = tmp_path / "makelist_0110.json"
        doc = json.loads(path.read_text())
        doc["rows"][0]["d"] = [0, 1]
        path.write_text(json.dumps(doc))
        code, out = run(["verify", "--tables", "--golden-dir", str(tmp_path)])
        assert code == EXIT_FAIL
        assert '0110: golden row not produced {"M": [[0, 1], [1, 0]], "d": [0, 1]' in out
        monkeypatch.setenv(GOLDEN_ENV, str(tmp_path))
        assert run(["verify", "--tables"])[0] == EXIT_FAIL
        assert run(["verify", "--witnesses"])[0] == EXIT_OK

    def test_default_is_all(self):
        assert run(["verify"]) == run(["verify", "--all"])


class TestRnumber:
    def test_closed_form(self):
        doc = ok_json(["rnumber", "--family", "d3f2", "--k", "0,0,0,1", "--M", "0,1,1,3", "--d", "0,0"], "rnumber")
        assert doc["R"] == 6 and doc["method"] == "closed-form"

    def test_infinite(self):
        doc = ok_json(["rnumber", "--family", "d3f2", "--k", "0,0,0,1", "--M", "1,0,0,-1", "--d", "0,0"], "rnumber")
        assert doc["R"] == "infinity"

    def test_condition_d(self):
        code, out = run(["rnumber", "--family", "d3f2", "--k", "0,0,0,1", "--M", "1,0,0,1", "--d", "0,0"])
        assert code == EXIT_FAIL and json.loads(out)["failed"] == ["d"]

    def test_condition_a(self):
        code, out = run(["rnumber", "--family", "d3f2", "--k", "0,0,1,0", "--M", "0,1,1,1", "--d", "0,0"])
        assert code == EXIT_FAIL and "a" in json.loads(out)["failed"]

    @pytest.mark.parametrize("fam,m,R", [("d4f5", 2, 16), ("d4f3", 3, 12), ("d4f3", 1, 4)])
    def test_phi_m(self, fam, m, R):
        doc = ok_json(["rnumber", "--family", fam, "--phi-m", str(m)], "rnumber")
        assert doc["R"] == R and doc["method"] == "averaging"

    @pytest.mark.parametrize("argv", [
        ["rnumber", "--family", "nope"],
        ["rnumber", "--family", "d3f2", "--M", "0,1,1,3"],
        ["rnumber", "--family", "d3f2", "--k", "0,0,0,1", "--M", "0,1,1"],
        ["rnumber", "--family", "d3f2", "--k", "0,0,0,1", "--M", "0,1,1,3", "--d", "x"],
    ])
    def test_usage(self, argv):
        assert run(argv)[0] == EXIT_USAGE


class TestSpectrum:
    def test_d3f2(self):
        doc = ok_json(["spectrum", "--family", "d3f2", "--k", "1,1,1,1"], "spectrum")
        assert doc["progressions"] == [{"step": 4, "offset": -2}] and doc["infinity"] is True

    @pytest.mark.parametrize("fam", ["d3f1", "d4f1", "d4f2", "d4f143", "d4f146"])
    def test_other_families(self, fam):
        doc = ok_json(["spectrum", "--family", fam], "spectrum")
        assert doc["infinity"] is True

    def test_not_available(self):
        assert run(["spectrum", "--family", "d4f4", "--k", "1,1,0,0"])[0] == EXIT_FAIL

    def test_usage(self):
        assert run(["spectrum", "--family", "d3f2"])[0] == EXIT_USAGE
        assert run(["spectrum", "--family", "d9"])[0] == EXIT_USAGE


class TestRinfty:
    def test_sample(self):
        doc = ok_json(["rinfty", "--family", "d4f143", "--sample", "30", "--seed", "7"], "evidence")
        assert doc["counterexamples"] == [] and doc["valid"] == 30

    def test_deterministic(self):
        argv = ["rinfty", "--family", "d4f2", "--sample", "10", "--seed", "3"]
        assert run(argv) == run(argv)

    def test_usage(self):
        assert run(["rinfty", "--family", "d3f2"])[0] == EXIT_USAGE


class TestOracle:
    def test_saturates(self):
        doc = ok_json(["oracle", "--family", "d3f2", "--k", "0,0,0,1", "--M", "0,1,1,1", "--d", "0,0"], "oracle")
        assert doc["closed_form"] == 2 and doc["levels"][-1]["count"] == 2 and doc["ok"]

    def test_infinite_is_failure(self):
        code, _ = run(["oracle", "--family", "d3f2", "--k", "0,0,0,1", "--M", "1,0,0,-1", "--d", "0,0"])
        assert code == EXIT_FAIL

    def test_usage(self):
        assert run(["oracle", "--family", "d4f3", "--k", "2,0,0,1", "--M", "0,1,1,1"])[0] == EXIT_USAGE


def test_help_has_worked_example():
    out = subprocess.run([sys.executable, "-m", "twistedconj.cli", "rnumber", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "--M 0,1,1,3" in out and "[[0,1],[1,3]]" in out


def test_no_command():
    assert run([])[0] == EXIT_USAGE


def test_console_script():
    exe = shutil.which("twistedconj")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "spectrum", "--family", "d3f2", "--k", "0,0,0,1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["progressions"] == [{"step": 2, "offset": 0}]
