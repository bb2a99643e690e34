import subprocess
import sys

from radar_cbba.cli import main
from radar_cbba.sim import Scenario


def test_gen_and_simulate(tmp_path, capsys):
    scen = tmp_path / "s.json"
    assert main(["gen-scenario", "--radars", "3", "--targets", "5", "--topology", "line",
                 "--seed", "2", "--steps", "12", "--out", str(scen)]) == 0
    sc = Scenario.load(scen)
    assert len(sc.radars) == 3 and sc.diameter == 2

    out = tmp_path / "out"
    assert main(["simulate", "--scenario", str(scen), "--out", str(out), "--compare-every", "5",
                 "--snapshot-every", "4", "--trace"]) == 0
    metrics = (out / "metrics.csv").read_text().splitlines()
    assert metrics[0] == "t,total_utility,coverage_main,coverage_optional,mean_load,conflicts"
    assert len(metrics) == 13
    comparison = (out / "comparison.csv").read_text().splitlines()
    assert comparison[0].startswith("t,dec_utility,central_p1,central_p2,ratio_p1,ratio_p2")
    assert len(comparison) == 1 + 3
    assert (out / "trace.jsonl").stat().st_size > 0
    assert sorted(p.name for p in out.glob("snapshot_*.svg")) == ["snapshot_0.svg", "snapshot_4.svg", "snapshot_8.svg"]
    assert "utility=" in capsys.readouterr().out


def test_overrides_seed_and_steps(tmp_path):
    scen = tmp_path / "s.json"
    main(["gen-scenario", "--radars", "2", "--targets", "3", "--seed", "1", "--out", str(scen)])
    out = tmp_path / "o"
    assert main(["simulate", "--scenario", str(scen), "--steps", "4", "--seed", "9", "--out", str(out)]) == 0
    assert len((out / "metrics.csv").read_text().splitlines()) == 5


def test_bad_scenario_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"seed": 0}')
    assert main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "o")]) != 0
    assert "error" in capsys.readouterr().err


def test_missing_file_exits_nonzero(tmp_path):
    assert main(["simulate", "--scenario", str(tmp_path / "nope.json")]) != 0


def test_module_entry_point(tmp_path):
    scen = tmp_path / "s.json"
    done = subprocess.run([sys.executable, "-m", "radar_cbba", "gen-scenario", "--radars", "2", "--targets", "1",
                           "--out", str(scen)], capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
    assert scen.exists()
