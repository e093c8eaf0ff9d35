import csv
import json

import pytest

from conftest import fixture_paths
from noveltyplan.cli import main
from noveltyplan.gstrips import read_ground_strips
from noveltyplan.search import RunStats


def _plan_args(domain, problem, *extra):
    d, p = fixture_paths(domain, problem)
    return ["plan", "--domain", str(d), "--problem", str(p), *extra]


class TestPlanCommand:
    def test_chain_pi_ac(self, tmp_path):
        out, stats = tmp_path / "plan.txt", tmp_path / "stats.json"
        code = main(_plan_args("chain", "p01", "--planner", "pi-ac", "--seed", "1",
                               "--plan-out", str(out), "--stats-out", str(stats)))
        assert code == 0
        assert out.read_text().splitlines() == ["(a0)", "(a1)", "(a2)"]
        data = json.loads(stats.read_text())
        assert data["status"] == "solved" and data["plan_length"] == 3
        assert RunStats.from_dict(data).seed == 1

    def test_plan_to_stdout(self, capsys):
        assert main(_plan_args("chain", "p01")) == 0
        captured = capsys.readouterr()
        assert captured.out == "(a0)\n(a1)\n(a2)\n"
        assert json.loads(captured.err)["status"] == "solved"

    def test_missing_file(self, tmp_path, capsys):
        code = main(["plan", "--domain", str(tmp_path / "nope.pddl"), "--problem", str(tmp_path / "x.pddl")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_flag(self):
        with pytest.raises(SystemExit) as err:
            main(["plan", "--planner", "nope"])
        assert err.value.code == 2

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.pddl"
        bad.write_text("(define (domain x)")
        assert main(["plan", "--domain", str(bad), "--problem", str(bad)]) == 2

    def test_timeout(self, tmp_path):
        stats = tmp_path / "s.json"
        code = main(_plan_args("gripper", "p06", "--planner", "pi-ac", "--time-limit", "0.001",
                               "--stats-out", str(stats)))
        assert code == 11
        assert json.loads(stats.read_text())["status"] == "resource-limit"

    def test_exhausted(self, tmp_path):
        gs = tmp_path / "t.gstrips"
        gs.write_text("gstrips 1\natoms 4\n(a)\n(x)\n(y)\n(g)\nactions 3\n"
                      "(mx) | pre 0 | add 1 | del 0\n(my) | pre 0 | add 2 | del 0\n(mg) | pre 1 2 | add 3 | del\n"
                      "init 0\ngoal 3\n")
        assert main(["plan", "--gstrips", str(gs), "--stats-out", str(tmp_path / "s.json")]) == 10

    def test_unsolvable(self, tmp_path):
        gs = tmp_path / "t.gstrips"
        gs.write_text("gstrips 1\natoms 2\n(a)\n(b)\nactions 0\ninit 0\ngoal 1\n")
        assert main(["plan", "--gstrips", str(gs), "--stats-out", str(tmp_path / "s.json")]) == 12

    def test_flags_reach_config(self, tmp_path):
        stats = tmp_path / "s.json"
        main(_plan_args("gripper", "p02", "--approx", "--control", "--sample-size", "5", "--bloom-bits", "auto",
                        "--dmax", "1000000", "--arity", "3", "--no-duplicate-check", "--stats-out", str(stats)))
        cfg = json.loads(stats.read_text())["config"]
        assert cfg["approximate"] and cfg["control"] and not cfg["duplicate_check"]
        assert cfg["arity"] == 3
        assert cfg["approx"]["sample_size"] == 5 and cfg["approx"]["bloom_bits"] is None
        assert cfg["approx"]["dmax"] == 1000000

    def test_deterministic_files(self, tmp_path):
        outs = []
        for i in range(2):
            plan, stats = tmp_path / f"p{i}", tmp_path / f"s{i}"
            main(_plan_args("blocksworld", "p05", "--planner", "bfws-ac", "--seed", "7",
                            "--plan-out", str(plan), "--stats-out", str(stats)))
            outs.append((plan.read_bytes(), stats.read_bytes()))
        assert outs[0] == outs[1]


class TestGroundCommand:
    def test_writes_gstrips(self, tmp_path):
        d, p = fixture_paths("gripper", "p02")
        out = tmp_path / "g.gstrips"
        assert main(["ground", "--domain", str(d), "--problem", str(p), "--out", str(out)]) == 0
        gp = read_ground_strips(out.read_text())
        assert (gp.num_atoms, gp.num_actions) == (12, 20)
        assert main(["plan", "--gstrips", str(out), "--stats-out", str(tmp_path / "s.json")]) == 0


class TestSuiteCommand:
    def test_shape_and_coverage(self, tmp_path):
        out = tmp_path / "suite.csv"
        code = main(["suite", "--manifest", "mini", "--configs", "exact-P2,P2A,P2AC,pI-AC",
                     "--seeds", "0,1,2,3", "--out", str(out)])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        runs = [r for r in rows if r["row_type"] == "run"]
        assert len(runs) == 11 * 4 * 4
        cov = {r["config"]: float(r["coverage_mean"]) for r in rows if r["row_type"] == "coverage"}
        assert cov["pI-AC"] == 1.0
        assert all(r["valid"] == "1" for r in runs if r["solved"] == "1")
        assert all(r["time"] == "" for r in runs)
        keys = [(r["instance"], r["config"], int(r["seed"])) for r in runs]
        assert keys == sorted(keys)

    def test_parallel_matches_serial(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["suite", "--manifest", "mini", "--configs", "P2AC", "--seeds", "0-1"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b), "--jobs", "2"])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_row_recorded(self, tmp_path):
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({"version": 1, "instances": [
            {"id": "broken", "domain": "missing.pddl", "problem": "missing.pddl"}]}))
        out = tmp_path / "o.csv"
        assert main(["suite", "--manifest", str(manifest), "--configs", "bfws-f5", "--seeds", "0",
                     "--out", str(out)]) == 0
        runs = [r for r in csv.DictReader(out.open()) if r["row_type"] == "run"]
        assert runs[0]["status"] == "error" and runs[0]["solved"] == "0"


class TestAccuracyCommand:
    def test_small_run(self, tmp_path):
        out = tmp_path / "acc.csv"
        code = main(["accuracy", "--manifest", "mini", "--delta", "0.5,1", "--arity-cap", "2", "--bloom", "both",
                     "--seeds", "0-1", "--out", str(out), "--instances", "chain-1,gripper-2",
                     "--stream-limit", "60"])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert {r["instance"] for r in rows} == {"chain-1", "gripper-2", "ALL"}
        assert {r["bloom"] for r in rows} == {"0", "1"}
        detail = list(csv.DictReader((tmp_path / "acc.states.csv").open()))
        assert list(detail[0])[:4] == ["instance", "bloom", "delta", "seed"]
