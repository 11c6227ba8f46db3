import csv
import io
import json
from pathlib import Path

import pytest

from kgvacua import catalog, cli
from kgvacua.errors import ConfigError

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

SMALL = """
[scenario]
name = "small"

[spacetime]
family = "frw_t8"
hubble = 1.0

[lattice]
n = 8
"""

NO_GAP = """
[scenario]
name = "no_gap"

[spacetime]
family = "static"
mass = 0.0

[lattice]
n = 8
"""


def write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_round_trip():
    sc = cli.parse_scenario(SMALL)
    again = cli.parse_scenario(cli.serialize(sc))
    assert again == sc
    assert cli.parse_scenario(cli.serialize(again)) == sc


def test_shipped_scenarios_parse():
    files = sorted(SCENARIOS.glob("*.toml"))
    assert len(files) >= 12
    for f in files:
        sc = cli.load_scenario(f)
        assert sc.spec().family in catalog.FAMILIES


def test_frw_t8_example():
    sc = cli.load_scenario(SCENARIOS / "frw_t8.toml")
    spec = sc.spec()
    assert spec.family == catalog.FRW_T8 and spec.spatial.num_points == 64
    assert spec.coupling == pytest.approx(1 / 6)


def test_unknown_family_location():
    text = SMALL.replace('"frw_t8"', '"nonsense"')
    with pytest.raises(ConfigError) as e:
        cli.parse_scenario(text)
    assert e.value.line == 6 and e.value.column is not None


def test_toml_syntax_error_location():
    with pytest.raises(ConfigError) as e:
        cli.parse_scenario("[scenario]\nname = \n")
    assert e.value.line == 2


def test_rejected_values():
    with pytest.raises(ConfigError):
        cli.parse_scenario(SMALL + "bogus = 1\n")
    with pytest.raises(ConfigError) as e:
        cli.parse_scenario(SMALL.replace("n = 8", "n = -4"))
    assert e.value.line == 10


def test_positivity_failure_blocks_other_checks():
    rep = cli.run_suite(cli.parse_scenario(NO_GAP))
    assert not rep["passed"]
    checks = {c["name"]: c for c in rep["checks"]}
    assert checks["positivity"]["status"] == "fail"
    others = [c for c in rep["checks"] if c["name"] != "positivity"]
    assert others and all(c["status"] == "skipped" and c["reason"] for c in others)


def test_report_deterministic_and_valid():
    sc = cli.parse_scenario(SMALL)
    a = cli.to_json(cli.merge([cli.run_suite(sc)]))
    b = cli.to_json(cli.merge([cli.run_suite(sc)]))
    assert a == b
    doc = json.loads(a)
    cli.validate_report(doc)
    assert doc["passed"] and doc["reports"][0]["orientation"] == -1
    assert "timing" not in doc["reports"][0]
    assert all(c["anchor"] for c in doc["reports"][0]["checks"])


def test_csv_outputs():
    sc = cli.parse_scenario(SMALL)
    rows = list(csv.DictReader(io.StringIO(cli.modes_csv(sc))))
    assert len(rows) == 5 * 8
    assert tuple(rows[0]) == cli.MODE_COLUMNS
    doc = cli.merge([cli.run_suite(sc)])
    checks = list(csv.DictReader(io.StringIO(cli.to_csv(doc))))
    assert len(checks) == len(doc["reports"][0]["checks"])


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["verify", write(tmp_path, SMALL), "-o", str(tmp_path / "a.json")]) == 0
    assert cli.main(["verify", write(tmp_path, NO_GAP, "b.toml"), "-o", str(tmp_path / "b.json")]) == 1
    assert cli.main(["verify", str(tmp_path / "missing.toml")]) == 2
    assert cli.main(["verify", write(tmp_path, "[scenario\n", "c.toml")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["verify", write(tmp_path, SMALL), "-o", str(blocker / "x.json")]) == 2
    assert "cannot write" in capsys.readouterr().err


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "out"))
    path = write(tmp_path, SMALL, "small.toml")
    assert cli.main(["verify", path, "--format", "csv"]) == 0
    assert (tmp_path / "out" / "small.csv").exists()
    assert cli.main(["modes", path]) == 0
    assert (tmp_path / "out" / "small_modes.csv").exists()


def test_report_merge(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["verify", write(tmp_path, SMALL), "-o", a]) == 0
    assert cli.main(["verify", write(tmp_path, NO_GAP, "n.toml"), "-o", b]) == 1
    out = str(tmp_path / "m.json")
    assert cli.main(["report", "--merge", a, b, "-o", out]) == 1
    doc = json.loads(Path(out).read_text())
    assert len(doc["reports"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert cli.main(["report", "--merge", str(bad)]) == 2


def test_sweep(tmp_path):
    sc = cli.parse_scenario(SMALL)
    runs = cli.sweep_scenarios(sc, "mass=0.5:2:3")
    assert [r.spec().mass for r in runs] == [0.5, 1.25, 2.0]
    assert len({r.name for r in runs}) == 3
    with pytest.raises(ConfigError):
        cli.sweep_scenarios(sc, "mass=1:2")
    with pytest.raises(ConfigError):
        cli.sweep_scenarios(sc, "nothing=1:2:3")
    out = str(tmp_path / "sw.json")
    assert cli.main(["sweep", write(tmp_path, SMALL), "--param", "spacetime.hubble=1:2:2", "--jobs", "2",
                     "-o", out]) == 0
    assert len(json.loads(Path(out).read_text())["reports"]) == 2


def test_tolerance_scale_and_timing():
    sc = cli.parse_scenario(SMALL)
    rep = cli.run_suite(sc, tolerance_scale=1e-30, timing=True)
    assert not rep["passed"] and "total" in rep["timing"]
