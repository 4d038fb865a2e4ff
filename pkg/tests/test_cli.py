"""Command-line front end: config parsing, CSV reports, model export, comparison."""

import csv
import json
from pathlib import Path

import pytest

from nfvcache.cli import (COMPARE_COLUMNS, POWER_COLUMNS, ConfigError, main, parse_approaches,
                          parse_hours)
from nfvcache.milp import build_formulation, build_piecewise_segments, read_mps
from nfvcache.power import CATEGORIES
from nfvcache.scenario import draw_cell_loads, load_scenario
from nfvcache.solver import solve_lp
from nfvcache.topology import build_reduced_topology

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def read_table(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# nfvcache ") and lines[0].endswith(" v1")
    return list(csv.DictReader(lines[1:]))


def test_parse_hours():
    assert parse_hours("0-23") == tuple(range(24))
    assert parse_hours("1,7,13-15") == (1, 7, 13, 14, 15)
    for bad in ("", "24", "5-30", "x"):
        with pytest.raises((ConfigError, ValueError)):
            parse_hours(bad)


def test_parse_approaches():
    assert parse_approaches("all") == ("integrated", "virt-only", "caching-only")
    assert parse_approaches("virt-only,integrated") == ("integrated", "virt-only")
    with pytest.raises(ConfigError):
        parse_approaches("virtual")


@pytest.mark.parametrize("argv", [["--hours", "30"], ["--engine", "cplex"],
                                  ["--inter-traffic", "1.5"], ["--scenario", "missing.ini"]])
def test_bad_config_exits_nonzero(tmp_path, capsys, argv):
    assert main(["run", "--out", str(tmp_path)] + argv) == 2
    assert "nfvcache:" in capsys.readouterr().err
    assert not (tmp_path / "power.csv").exists()


def test_run_single_hour(tmp_path):
    assert main(["run", "--hours", "3", "--engine", "heuristic", "--out", str(tmp_path)]) == 0
    rows = read_table(tmp_path / "power.csv")
    assert list(rows[0]) == list(POWER_COLUMNS)
    assert sorted(r["approach"] for r in rows) == ["caching-only", "integrated", "virt-only"]
    for r in rows:
        assert sum(float(r[c]) for c in CATEGORIES) == pytest.approx(float(r["total"]), abs=1e-5)
    savings = read_table(tmp_path / "savings.csv")
    vs_cache = [s for s in savings if s["comparison"] == "integrated_vs_caching-only"]
    assert vs_cache and all(float(s["saving_percent"]) >= 0 for s in vs_cache)
    placement = read_table(tmp_path / "placement.csv")
    assert {p["approach"] for p in placement} == {"caching-only", "integrated", "virt-only"}
    trace = json.loads((tmp_path / "traces" / "h03_integrated.json").read_text())
    assert trace["approach"] == "integrated"


def test_export_file_names_and_report(tmp_path):
    argv = ["export", "--scenario", str(SCENARIOS / "reduced.ini"), "--hours", "5",
            "--approach", "integrated", "--seed", "2", "--out", str(tmp_path)]
    assert main(argv) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["h05_integrated_s2.lp", "h05_integrated_s2.mps",
                     "h05_integrated_s2.report.txt"]
    report = (tmp_path / "h05_integrated_s2.report.txt").read_text()
    seg = build_piecewise_segments()
    assert f"{seg.slopes[0]:.6g}"[:6] in report
    lp_text = (tmp_path / "h05_integrated_s2.lp").read_text()
    assert lp_text.rstrip().endswith("End")


def test_export_matches_in_memory_model(tmp_path):
    main(["export", "--scenario", str(SCENARIOS / "reduced.ini"), "--hours", "5",
          "--approach", "virt-only", "--seed", "0", "--out", str(tmp_path)])
    sc, _ = load_scenario(SCENARIOS / "reduced.ini")
    topo = build_reduced_topology()
    direct = build_formulation(sc, topo, "virt-only", draw_cell_loads(sc.profile, 5, 0, topo))
    reread = read_mps((tmp_path / "h05_virt-only_s0.mps").read_text())
    assert solve_lp(reread, "highs").objective == pytest.approx(
        solve_lp(direct, "highs").objective, rel=1e-9)


def test_compare_reports_non_negative_gaps(tmp_path, capsys):
    argv = ["compare", "--scenario", str(SCENARIOS / "reduced.ini"), "--hours", "19",
            "--approach", "integrated", "--gap-tol", "1e-7", "--out", str(tmp_path)]
    assert main(argv) == 0
    rows = read_table(tmp_path / "compare.csv")
    assert list(rows[0]) == list(COMPARE_COLUMNS)
    assert rows[0]["status"] == "optimal"
    assert float(rows[0]["gap_percent"]) >= -1e-5
    assert "max gap" in capsys.readouterr().out


def test_report_prints_traces(capsys):
    assert main(["report", "--scenario", str(SCENARIOS / "reduced.ini"), "--hours", "1",
                 "--approach", "virt-only"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("# hour 1 virt-only\n")
    assert json.loads(text.split("\n", 1)[1])["approach"] == "virt-only"
