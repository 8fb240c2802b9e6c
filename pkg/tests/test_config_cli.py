import json
import math

import pytest

from rtgsim.cli import run_cli
from rtgsim.config import Settings, dump_settings, parse_config
from rtgsim.errors import InvalidConfiguration
from rtgsim.output import Table, read_csv, write_csv

# small enough to run a full command in about a second
FAST = {"n_banks": 3, "day_length": 200.0, "grid_top": 6, "exploration_days": 20, "max_days": 200,
        "kappas": [0.5, 8], "plays_per_point": 2, "eval_days": 3, "compare_days": 5, "ladder_days": 3,
        "sizes": [3, 4], "nash_samples": 5, "fixed_days": 5}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


# --- configuration ----------------------------------------------------------------

def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    s = parse_config(p)
    assert s == Settings()
    assert (s.n_banks, s.day_length, s.lam, s.grid_top, s.grid_step, s.convergence_window) == \
        (15, 1e4, 1.0, 80, 2, 10)
    assert len(s.grid()) == 41


def test_single_bank_rejected_by_name(tmp_path):
    with pytest.raises(InvalidConfiguration, match="n_banks"):
        parse_config(write_config(tmp_path, {"n_banks": 1}))


@pytest.mark.parametrize("bad,field", [({"colour": 1}, "colour"), ({"lam": "one"}, "lam"),
                                       ({"kappas": 8}, "kappas"), ({"max_days": 2.5}, "max_days"),
                                       ({"kappas": []}, "kappas"), ({"scenario": "x"}, "scenario")])
def test_bad_fields_named(tmp_path, bad, field):
    with pytest.raises(InvalidConfiguration, match=field):
        parse_config(write_config(tmp_path, bad))


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InvalidConfiguration, match="not found"):
        parse_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{n_banks: 3")
    with pytest.raises(InvalidConfiguration, match="cannot parse"):
        parse_config(bad)


def test_config_round_trip(tmp_path):
    s = parse_config(overrides={**FAST, "kappa": 0.125, "scenario": "incident", "seed": 2**64 - 1})
    path = tmp_path / "echo.json"
    dump_settings(s, path)
    assert parse_config(path) == s


def test_float_round_trip(tmp_path):
    values = [0.1, 1 / 3, 2.0 ** -40, 1e300, -7.2, math.pi]
    write_csv(tmp_path / "f.csv", "f.csv", Table(["x"], [{"x": v} for v in values]))
    schema, rows = read_csv(tmp_path / "f.csv")
    assert schema == "# rtgsim-csv v1 f.csv"
    assert [float(r["x"]) for r in rows] == values


# --- command line ----------------------------------------------------------------------

def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        run_cli(["sweep", "--bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run_cli(["paint"])
    assert e.value.code == 2


def test_runtime_failure_exits_1(tmp_path, capsys):
    cfg = write_config(tmp_path, {"n_banks": 1})
    assert run_cli(["play", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "n_banks" in capsys.readouterr().err
    assert run_cli(["play", "--config", str(tmp_path / "missing.json")]) == 1


def test_one_kappa_one_point(tmp_path):
    cfg = write_config(tmp_path, {**FAST, "kappas": [8]})
    assert run_cli(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    _, rows = read_csv(tmp_path / "o" / "demand_curve.csv")
    assert [float(r["kappa"]) for r in rows] == [8.0]


def test_manifest_lists_checksums_and_config(tmp_path):
    cfg = write_config(tmp_path, FAST)
    out = tmp_path / "o"
    assert run_cli(["fixed", "--config", cfg, "--seed", "9", "--out", str(out)]) == 0
    m = json.loads((out / "manifest.json").read_text())
    assert set(m["files"]) == {"fixed.csv", "fixed.json"}
    assert m["seed"] == 9 and m["config"]["n_banks"] == 3 and m["command"] == "fixed"
    assert m["started"] <= m["finished"]
    assert not [p for p in out.iterdir() if p.name.startswith(".staging")]


def test_empty_play_writes_header_only(tmp_path):
    cfg = write_config(tmp_path, {**FAST, "max_days": 0})
    assert run_cli(["play", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "trajectory.csv").read_text().splitlines()
    assert lines == ["# rtgsim-csv v1 trajectory.csv", "day,total_liquidity,mean_payoff,mean_delay"]


def test_incident_sweep_has_delta_columns(tmp_path):
    cfg = write_config(tmp_path, FAST)
    out = tmp_path / "o"
    assert run_cli(["sweep", "--config", cfg, "--scenario", "incident", "--out", str(out)]) == 0
    _, rows = read_csv(out / "scenario_deltas.csv")
    assert len(rows) == 2
    assert {"liquidity_delta", "liquidity_delta_pct", "cost_delta_pct"} <= set(rows[0])
    assert (out / "base_demand_curve.csv").exists()


def test_day_trace_matches_golden(tmp_path):
    out = tmp_path / "o"
    assert run_cli(["day-trace", "--seed", "7", "--out", str(out)]) == 0
    golden = (__import__("pathlib").Path(__file__).parent / "fixtures" / "day_trace_seed7.jsonl").read_text()
    assert (out / "trace.jsonl").read_text() == golden


def test_full_scale_play_count():
    assert Settings().full_scale().plays_per_point == 30
