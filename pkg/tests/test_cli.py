import csv
import json
import math

import pytest

from qaoa_matching.cli import main
from qaoa_matching.config import ExperimentConfig, load_graph, parse_angle
from qaoa_matching import graph as G


def _read_dist(path):
    with open(path) as fh:
        return {r["basis_state_binary"]: float(r["probability"]) for r in csv.DictReader(fh)}


def test_simulate_c3(tmp_path, capsys):
    rc = main(["simulate", "--graph", "cycle:3", "--init", "empty", "--beta", "pi/2",
               "--gamma", "0", "--out", str(tmp_path), "--dump-state", "--shots", "500"])
    assert rc == 0
    dist = _read_dist(tmp_path / "distribution.csv")
    # e_0 is the leftmost character
    assert dist == pytest.approx({"000": 1 / 8, "100": 1 / 2, "010": 1 / 4, "001": 1 / 8})
    exp = json.loads((tmp_path / "expectation.json").read_text())
    assert exp["expectation"] == pytest.approx(7 / 8)
    assert (tmp_path / "statevector.csv").read_text().startswith("basis_state_binary,re,im\n")
    assert sum(json.loads((tmp_path / "samples.json").read_text())["counts"].values()) == 500
    assert "E[X] = 0.875000" in capsys.readouterr().out


def test_simulate_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv("QAOA_MATCHING_OUT", str(tmp_path / "env"))
    assert main(["simulate", "--graph", "path:3", "--init", "w1", "--control", "self",
                 "--semantics", "mixture", "--beta", "2.0"]) == 0
    assert (tmp_path / "env" / "norm_trace.csv").exists()


def test_simulate_config_file(tmp_path):
    cfg = {"graph": "cycle:4", "init": "w1", "schedule": [[0, "pi/2"]], "control": "self",
           "semantics": "mixture", "out": str(tmp_path)}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path)]) == 0
    exp = json.loads((tmp_path / "expectation.json").read_text())
    assert exp["expectation"] == pytest.approx(1.5)


def test_simulate_graph_json(tmp_path):
    gpath = tmp_path / "g.json"
    gpath.write_text(G.build_graph(4, [(0, 1), (1, 2), (1, 3)]).to_json())
    assert main(["simulate", "--graph", str(gpath), "--ordering", "identity",
                 "--beta", "1.0", "--out", str(tmp_path)]) == 0
    assert set(_read_dist(tmp_path / "distribution.csv")) == {"000", "100", "010", "001"}


def test_simulate_cap_exits_2(tmp_path, capsys):
    assert main(["simulate", "--graph", "cycle:30", "--beta", "1", "--out", str(tmp_path)]) == 2
    assert "CapExceeded" in capsys.readouterr().err


def test_simulate_bad_combination_exits_2(tmp_path):
    assert main(["simulate", "--graph", "cycle:4", "--init", "empty", "--semantics", "mixture",
                 "--beta", "1", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("suite", ["obs", "eq15", "closed_forms"])
def test_verify_suites_pass(tmp_path, suite, capsys):
    assert main(["verify", suite, "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / f"report_{suite}.json").read_text())
    assert data["passed"] is True and data["checks"]
    assert "PASS" in capsys.readouterr().out


def test_verify_all_passes(tmp_path):
    assert main(["verify", "all", "--out", str(tmp_path)]) == 0


def test_verify_single_graph(tmp_path):
    assert main(["verify", "thm1", "--graph", "cycle:5", "--beta", "pi/3", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "report_thm1.json").read_text())
    assert {c["graph"] for c in data["checks"]} == {"C5"}


def test_curves_fig3(tmp_path):
    assert main(["curves", "fig3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig3.csv").read_text().splitlines()
    assert lines[0] == "n,lower_bound,uniform,exact_or_blank" and len(lines) == 58
    summary = json.loads((tmp_path / "fig3_summary.json").read_text())
    assert summary["violations"]["lower_vs_uniform"] == list(range(7, 27))


def test_curves_fig4(tmp_path):
    assert main(["curves", "fig4", "--n", "3:10", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "fig4.csv")))
    assert len(rows) == 8 and all(r["exact_or_blank"] for r in rows)


def test_curves_other_kinds(tmp_path):
    assert main(["curves", "bracket", "--n", "7:9", "--out", str(tmp_path)]) == 0
    assert main(["curves", "thm4", "--graph", "two_regular:3,4", "--beta", "3pi/4",
                 "--out", str(tmp_path)]) == 0
    assert main(["curves", "converge", "--graph", "cycle:5", "--beta", "3*pi/4",
                 "--out", str(tmp_path)]) == 0
    conv = json.loads((tmp_path / "converge.json").read_text())
    assert conv["non_decreasing"] and conv["p_star"] <= conv["budget_2E"]
    assert main(["curves", "fig5", "--max-vertices", "7", "--shots", "200", "--beta", "3pi/4",
                 "--out", str(tmp_path)]) == 0
    header = (tmp_path / "fig5.csv").read_text().splitlines()[0]
    assert header.endswith("E_empty_sampled,E_w1_sampled")


@pytest.mark.parametrize("text, value", [
    ("pi/2", math.pi / 2), ("3*pi/4", 3 * math.pi / 4), ("2pi/3", 2 * math.pi / 3),
    ("π", math.pi), ("1.25", 1.25), ("-pi", -math.pi),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


@pytest.mark.parametrize("bad", ["pi/", "__import__('os')", "e"])
def test_parse_angle_rejects(bad):
    with pytest.raises(ValueError):
        parse_angle(bad)


def test_config_roundtrip():
    cfg = ExperimentConfig.from_json(json.dumps({"graph": "cycle:5", "schedule": [["0", "pi/3"]],
                                                 "unknown": 1}))
    assert cfg.schedule == [[0.0, pytest.approx(math.pi / 3)]]
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        ExperimentConfig(graph="cycle:3", schedule=[])
    assert load_graph({"num_vertices": 3, "edges": [[0, 1], [1, 2]]}).m == 2
