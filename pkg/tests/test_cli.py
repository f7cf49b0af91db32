import json
import math
import os

import numpy as np
import pytest

from bmx.cli import (Scenario, main, parse_call, parse_config, parse_domain,
                     parse_map, parse_region, run, run_scenario,
                     scenario_from_echo)
from bmx.errors import ConfigError
from bmx.geometry import Annulus, BoundaryLabel, Rectangle, Wedge
from bmx.maps import Compose, Exp, Linear, PowerBranch

BASIC = """
[scenario.square]
experiment = harmonic_measure
domain = rectangle(1, 1)
start = 0
region = s1
n = 2000
kernel = wos
seed = 42
expect_prob = 0.25
expect_sigmas = 4
"""


def write(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def strip_wall_time(report):
    return {k: v for k, v in report.items() if k != "wall_time_s"}


def test_parse_call_nested():
    name, args = parse_call("compose(linear(2), exp())")
    assert name == "compose"
    assert args[0] == ("linear", [2])
    assert args[1] == ("exp", [])


def test_parse_domain_variants():
    assert parse_domain("rectangle(2, 1)") == Rectangle(2, 1)
    assert parse_domain("annulus(1, 7.389056098930650)") == Annulus(
        1, 7.389056098930650)
    assert parse_domain("wedge(1.5707963267948966)") == Wedge(
        1.5707963267948966)
    comb = parse_domain("comb(1, [1, 2], [-5], V)")
    assert comb.side == "V"
    with pytest.raises(ConfigError):
        parse_domain("pentagon(1)")
    with pytest.raises(ConfigError):
        parse_domain("rectangle(1)")


def test_parse_map_variants():
    assert parse_map("linear(3)") == Linear(3)
    assert parse_map("powerbranch(0.5)") == PowerBranch(0.5)
    m = parse_map("compose(linear(2), exp())")
    assert m == Compose((Linear(2), Exp()))
    with pytest.raises(ConfigError):
        parse_map("spiral(1)")


def test_parse_region_forms():
    assert parse_region("annulus_inner") == BoundaryLabel.ANNULUS_INNER
    f = parse_region("re>0.5")
    z = np.array([1 + 0j, 0j])
    assert list(f(z, None)) == [True, False]
    g = parse_region("abs<2")
    assert list(g(z, None)) == [True, True]
    with pytest.raises(ConfigError):
        parse_region("left-side")


def test_unknown_keys_and_sections_error(tmp_path):
    bad = BASIC + "typo_key = 3\n"
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, bad))
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, "[stuff]\nx = 1\n"))
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, BASIC.replace(
            "harmonic_measure", "teleport")))
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, BASIC.replace("domain = rectangle(1, 1)\n",
                                                   "")))


def test_defaults_materialized_and_round_trip(tmp_path):
    scenarios = parse_config(write(tmp_path, BASIC))
    assert len(scenarios) == 1
    sc = scenarios[0]
    assert sc.param("expect_sigmas") == "4"
    report = run_scenario(sc)
    echoed = scenario_from_echo(report["scenario"])
    assert echoed == sc


def test_reports_reproducible_and_worker_independent(tmp_path):
    path = write(tmp_path, BASIC)
    r1 = run(path)[0]
    r2 = run(path)[0]
    assert strip_wall_time(r1) == strip_wall_time(r2)
    r4 = run(path, workers=2)[0]
    assert r4["scenario"]["workers"] == 2
    r1c = strip_wall_time(r1)
    r4c = strip_wall_time(r4)
    r1c["scenario"] = {k: v for k, v in r1c["scenario"].items()
                       if k != "workers"}
    r4c["scenario"] = {k: v for k, v in r4c["scenario"].items()
                       if k != "workers"}
    assert r1c == r4c


def test_seed_precedence(tmp_path, monkeypatch):
    path = write(tmp_path, BASIC)
    assert parse_config(path)[0].seed == 42
    monkeypatch.setenv("BMX_SEED", "7")
    assert parse_config(path)[0].seed == 7
    assert parse_config(path, {"seed": "9"})[0].seed == 9
    monkeypatch.delenv("BMX_SEED")


def test_override_changes_echo(tmp_path):
    path = write(tmp_path, BASIC)
    sc = parse_config(path, {"n": "4000"})[0]
    assert sc.param("n") == "4000"


def test_cli_exit_codes_and_outputs(tmp_path, capsys):
    path = write(tmp_path, BASIC)
    out = str(tmp_path / "reports")
    code = main(["run", path, "--out", out])
    assert code == 0
    text = capsys.readouterr().out
    assert "probability: pass" in text
    with open(os.path.join(out, "square.json"), encoding="utf-8") as fh:
        rep = json.load(fh)
    assert rep["schema"] == 1
    assert rep["passed"] is True

    bad = BASIC.replace("expect_prob = 0.25", "expect_prob = 0.9")
    code = main(["run", write(tmp_path, bad, "bad.cfg")])
    assert code == 2

    code = main(["run", str(tmp_path / "missing.cfg")])
    assert code == 1

    code = main(["run", path, "--set", "oops"])
    assert code == 1


def test_cli_set_override(tmp_path, capsys):
    path = write(tmp_path, BASIC)
    code = main(["run", path, "--set", "seed=4242"])
    assert code == 0
    # Same override twice gives identical output lines.
    first = capsys.readouterr().out
    main(["run", path, "--set", "seed=4242"])
    second = capsys.readouterr().out
    assert first == second


def test_raw_csv_rows(tmp_path):
    path = write(tmp_path, BASIC)
    out = str(tmp_path / "reports")
    reports = run(path, out_dir=out, write_raw=True)
    assert reports[0]["passed"]
    csv_path = os.path.join(out, "square.csv")
    with open(csv_path, encoding="utf-8") as fh:
        lines = fh.read().strip().splitlines()
    header, rows = lines[0], lines[1:]
    assert header.split(",") == ["scenario", "path_id", "exit_re", "exit_im",
                                 "exit_time", "label", "steps", "status"]
    assert len(rows) == 2000
    assert all(r.split(",")[-1] in ("ok", "max_steps") for r in rows)


def test_scenario_errors_recorded_not_fatal(tmp_path):
    cfg = BASIC + """
[scenario.broken]
experiment = harmonic_measure
domain = rectangle(1, 1)
start = 5
region = s1
n = 1000
seed = 1
"""
    reports = run(write(tmp_path, cfg))
    assert len(reports) == 2
    assert reports[0]["passed"]
    assert not reports[1]["passed"]
    assert "PointOutsideDomain" in reports[1]["error"]


def test_modulus_annulus_scenario(tmp_path):
    cfg = """
[scenario.mod]
experiment = modulus
domain = annulus(1, 7.389056098930650)
start = 2.718281828459045
n = 20000
seed = 3
expect_modulus = 2.0
expect_sigmas = 3
"""
    rep = run(write(tmp_path, cfg))[0]
    assert rep["passed"]
    assert abs(rep["results"]["modulus"]["true"] - 2.0) < 1e-12
