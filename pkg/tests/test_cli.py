import json
import subprocess
import sys

from gseplan.cli import EXIT_CONFIG, EXIT_RUNTIME, main


def test_env_gen_and_plan(tmp_path):
    env_file = tmp_path / "env.json"
    assert main(["env", "gen", "--dim", "2", "--obstacles", "4", "--seed", "3", "--out", str(env_file)]) == 0
    doc = json.loads(env_file.read_text())
    assert doc["dim"] == 2 and len(doc["obstacles"]) == 4 and "init" in doc
    again = tmp_path / "env2.json"
    main(["env", "gen", "--dim", "2", "--obstacles", "4", "--seed", "3", "--out", str(again)])
    assert again.read_bytes() == env_file.read_bytes()

    for planner in ("gse", "gse-star", "prm-star"):
        out = tmp_path / f"{planner}.csv"
        code = main(["plan", "--env", str(env_file), "--planner", planner, "--iters", "30",
                     "--seed", "1", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[:2] == ["# gse-bench v1", "iteration,vertices,edges,best_cost"]
        assert len(lines) == 32


def test_bench(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"dim": 2, "obstacles": 2, "workspace_seeds": [1], "trials": 2,
                                "iterations": 15, "planners": ["gse"], "reference_iterations": 50}))
    assert main(["bench", "convergence", "--spec", str(spec), "--out", str(tmp_path / "conv")]) == 0
    assert (tmp_path / "conv" / "aggregate.csv").exists()
    assert main(["bench", "completeness", "--spec", str(spec), "--out", str(tmp_path / "comp")]) == 0
    assert (tmp_path / "comp" / "success.csv").exists()


def test_promenade(tmp_path, capsys):
    assert main(["promenade", "--trials", "2", "--iters", "20", "--seed", "5", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "promenade.csv").read_text().splitlines()
    assert len(text) == 4
    assert "accept=" in capsys.readouterr().out


def test_config_errors(tmp_path):
    assert main(["plan", "--env", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "bounds": {"lo": [0, 0], "hi": [1, 1]},
                               "obstacles": [{"type": "sphere", "center": [0.5, 0.5], "radius": -1}]}))
    assert main(["plan", "--env", str(bad), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    assert main(["promenade", "--gamma-f", "0", "--trials", "1", "--out", str(tmp_path)]) == EXIT_CONFIG
    ok = tmp_path / "ok.json"
    ok.write_text(json.dumps({"dim": 2, "bounds": {"lo": [0, 0], "hi": [4, 4]}, "obstacles": []}))
    assert main(["plan", "--env", str(ok), "--gamma", "0.1", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_runtime_error(tmp_path):
    # the obstacle leaves only a sliver of free space, so sampling gives up
    env = tmp_path / "tight.json"
    env.write_text(json.dumps({"dim": 2, "bounds": {"lo": [0, 0], "hi": [10, 10]},
                               "obstacles": [{"type": "box", "lo": [1e-6, 1e-6], "hi": [9.999999, 9.999999]}],
                               "init": [0, 0], "goal": [10, 10]}))
    assert main(["plan", "--env", str(env), "--planner", "gse", "--iters", "5",
                 "--out", str(tmp_path / "x.csv")]) == EXIT_RUNTIME


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gseplan", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "promenade" in res.stdout
