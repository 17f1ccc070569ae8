import csv
import io
import json
import subprocess
import sys

import pytest

from fairstream.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestRun:
    def test_greedy_identical_has_no_adjustments(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--algo", "greedy-identical", "--gen", "identical-ones",
                               "--param", "n=3", "--param", "T=30", "--check", "ef1")
        assert code == 0
        rows = rows_of(out)
        assert list(rows[0]) == ["t", "adjustments", "cumulative", "ef1"]
        assert len(rows) == 30
        assert {r["cumulative"] for r in rows} == {"0"}
        assert {r["ef1"] for r in rows} == {"true"}

    def test_propa_pointer_verdicts(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--algo", "propa-pointer", "--gen", "identical-ones",
                               "--param", "n=2", "--param", "T=10", "--check", "propa")
        assert code == 0 and {r["propa"] for r in rows_of(out)} == {"true"}

    def test_envy_balancing_mixed(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--algo", "envy-balancing", "--gen", "random", "--param", "family=mixed",
                               "--param", "n=2", "--param", "T=40", "--seed", "3", "--check", "ef1")
        assert code == 0 and {r["ef1"] for r in rows_of(out)} == {"true"}

    def test_byte_deterministic(self, capsys, tmp_path):
        args = ["run", "--algo", "layer-updating", "--gen", "random", "--param", "n=3", "--param", "T=25",
                "--seed", "9", "--check", "ef1,eq1"]
        outputs = []
        for k in range(2):
            path = tmp_path / f"run{k}.csv"
            assert main(args + ["--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--algo", "lumpy-tie", "--gen", "remark-132", "--format", "json",
                               "--check", "ef1")
        data = json.loads(out)
        assert code == 0 and data["n"] == 2 and data["T"] == 3
        assert [r["t"] for r in data["rows"]] == [1, 2, 3]

    def test_instance_file(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"n": 2, "items": [["1", "0", "2"], ["0", "3", "0"]]}))
        code, out, _ = run_cli(capsys, "run", "--algo", "greedy-restricted", "--instance", str(path))
        assert code == 0 and rows_of(out)[-1]["cumulative"] == "0"

    def test_strict_violation_exit(self, capsys):
        # round robin re-runs are EF1 but not EF; strict EF stops at the first envious round
        code, _, err = run_cli(capsys, "run", "--algo", "round-robin-rerun", "--gen", "identical-ones",
                               "--param", "n=2", "--param", "T=3", "--check", "ef", "--strict")
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1]) == {"violation": "EF", "round": 1}

    @pytest.mark.parametrize("argv", [
        ["run", "--algo", "lumpy-tie", "--gen", "identical-ones", "--param", "n=3", "--param", "T=4"],
        ["run", "--algo", "greedy-identical", "--gen", "nonidentical-propa", "--param", "n=2", "--param", "T=4"],
        ["run", "--algo", "propa-pointer"],
        ["run", "--algo", "propa-pointer", "--instance", "/nonexistent.json"],
        ["run", "--algo", "propa-pointer", "--gen", "identical-ones", "--param", "n2"],
        ["verify", "--gen", "remark-132", "--rounds", "7"],
    ])
    def test_config_errors(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == 4 and err.startswith("fairstream:")


class TestGen:
    def test_writes_metadata(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--gen", "random", "--param", "n=2", "--param", "T=5", "--seed", "1")
        data = json.loads(out)
        assert code == 0 and data["n"] == 2 and len(data["items"][0]) == 5
        assert data["meta"]["seed"] == 1 and "MT19937" in data["meta"]["prng"]
        assert len(data["meta"]["digest"]) == 16

    def test_generated_file_feeds_run(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        assert main(["gen", "--gen", "binary-two-agent", "--param", "T=4", "--out", str(path)]) == 0
        code, out, _ = run_cli(capsys, "run", "--algo", "envy-balancing", "--instance", str(path), "--check", "ef1")
        assert code == 0 and len(rows_of(out)) == 20


class TestVerifyAndOracle:
    def test_binary_alternation(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--gen", "binary-two-agent", "--param", "T=4",
                               "--rounds", "12,16,20")
        report = json.loads(out)
        assert code == 0
        assert [c["owners"] for c in report["certificates"]] == [[2], [1], [2]]

    def test_remark_single_cut(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--gen", "remark-132", "--rounds", "3", "--min-adjust")
        report = json.loads(out)
        assert report["certificates"][0]["valid_count"] == 1
        assert report["min_adjustments"] == 1

    def test_no_valid_allocation_record(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--gen", "identical-ones", "--param", "n=2", "--param", "T=1",
                               "--notion", "ef", "--min-adjust")
        report = json.loads(out)
        assert code == 0
        assert report["certificates"][0]["status"] == "no valid allocation"
        assert report["min_adjustments"] is None and "round 1" in report["status"]

    def test_oracle_json_lines(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "--gen", "identical-ones", "--param", "n=2", "--param", "T=4",
                               "--notion", "propa", "--rounds", "2..4", "--item", "1")
        lines = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and [c["round"] for c in lines] == [2, 3, 4]
        assert all(c["owners"] == [1] for c in lines)

    def test_budget_exit(self, capsys):
        code, _, err = run_cli(capsys, "oracle", "--gen", "identical-ones", "--param", "n=4", "--param", "T=30",
                               "--rounds", "30", "--budget", "10")
        assert code == 3 and json.loads(err)["error"] == "budget"


class TestBoundReport:
    def test_propa_pointer_ratio(self, capsys, tmp_path):
        gen = ["--gen", "identical-ones", "--param", "n=3", "--param", "T=12"]
        path = tmp_path / "run.csv"
        assert main(["run", "--algo", "propa-pointer", *gen, "--out", str(path)]) == 0
        jpath = tmp_path / "run.json"
        assert main(["run", "--algo", "propa-pointer", *gen, "--format", "json", "--out", str(jpath)]) == 0
        code, out, _ = run_cli(capsys, "bound-report", "--run", str(path), "--run", str(jpath),
                               "--bound", "propa-pointer", *gen)
        report = json.loads(out)
        assert code == 0 and not report["any_exceeded"]
        assert report["runs"][0]["cumulative"] == report["runs"][1]["cumulative"]
        assert report["max_ratio"] <= 1

    def test_greedy_zero(self, capsys, tmp_path):
        gen = ["--gen", "random", "--param", "family=restricted", "--param", "n=3", "--param", "T=30", "--seed", "2"]
        path = tmp_path / "run.csv"
        assert main(["run", "--algo", "greedy-restricted", *gen, "--out", str(path)]) == 0
        code, out, _ = run_cli(capsys, "bound-report", "--run", str(path), "--bound", "zero", *gen)
        assert json.loads(out)["max_ratio"] == 0

    def test_unknown_bound_is_usage_error(self, capsys):
        with pytest.raises(SystemExit):
            main(["bound-report", "--run", "x.csv", "--bound", "made-up", "--gen", "remark-132"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fairstream", "run", "--algo", "greedy-identical", "--gen",
                           "identical-ones", "--param", "n=2", "--param", "T=3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "t,adjustments,cumulative"
