import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from recurv.cli import main
from recurv.config import ConfigError, config_from_mapping, parse_config
from recurv.report import dumps, format_float

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL = """
seed = 3
points_per_metric = 2
checks = ["identities", "fluid", "concircular"]

[[metrics]]
name = "robertson_walker"
dimension = 4
scale_factor = "power:0.5"
parameters = { k = 1 }

[[metrics]]
name = "sphere"
dimension = 3
"""


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL)
    return path


# --- config ----------------------------------------------------------------------


def test_parse_config_fields():
    cfg = parse_config(SMALL)
    assert cfg.seed == 3 and cfg.points_per_metric == 2
    assert cfg.checks == ("concircular", "fluid", "identities")
    assert [m.label for m in cfg.metrics] == ["robertson_walker[n=4; k=1; q=power:0.5]", "sphere[n=3]"]


@pytest.mark.parametrize("mapping,where", [
    ({"checks": ["fluid"]}, "metrics"),
    ({"metrics": [{"name": "kerr", "dimension": 4}], "checks": ["fluid"]}, "metrics[0].name"),
    ({"metrics": [{"name": "sphere", "dimension": "4"}], "checks": ["fluid"]}, "metrics[0].dimension"),
    ({"metrics": [{"name": "sphere", "dimension": 3}], "checks": ["nonsense"]}, "checks"),
    ({"metrics": [{"name": "sphere", "dimension": 3}], "checks": ["fluid"], "seed": 1.5}, "seed"),
    ({"metrics": [{"name": "sphere", "dimension": 3}], "checks": ["fluid"], "tolerances": {"nope": 1}},
     "tolerances"),
    ({"metrics": [{"name": "sphere", "dimension": 3}], "checks": ["fluid"], "output_format": "xml"},
     "output_format"),
    ({"metrics": [{"name": "sphere", "dimension": 3}], "checks": ["fluid"], "colour": "red"}, "colour"),
])
def test_config_errors_name_the_field(mapping, where):
    with pytest.raises(ConfigError) as err:
        config_from_mapping(mapping)
    assert where in str(err.value)


def test_toml_syntax_error_has_position():
    with pytest.raises(ConfigError) as err:
        parse_config("seed = \n")
    assert "line 1" in str(err.value)


def test_shipped_configs_parse():
    for path in sorted(CONFIGS.glob("*.toml")):
        parse_config(path.read_text())


# --- report formatting ----------------------------------------------------------------


def test_float_formatting():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(float("nan")) == "null"
    assert format_float(float("inf")) == "null"
    assert json.loads(dumps({"x": [0.1, 2.0], "y": None})) == {"x": [0.1, 2.0], "y": None}


# --- verify ----------------------------------------------------------------------------


def test_verify_json_is_byte_identical(small, capsys):
    code1, out1, _ = run(["verify", "--config", str(small)], capsys)
    code2, out2, _ = run(["verify", "--config", str(small)], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert set(doc) == {"run_metadata", "metrics", "summary"}
    assert doc["run_metadata"]["seed"] == 3
    assert len(doc["metrics"]) == 2


def test_seed_changes_output(small, capsys):
    _, a, _ = run(["verify", "--config", str(small)], capsys)
    _, b, _ = run(["verify", "--config", str(small), "--seed", "4"], capsys)
    assert a != b


def test_csv_summary_rows(small, tmp_path, capsys):
    out = tmp_path / "summary.csv"
    code, _, _ = run(["verify", "--config", str(small), "--format", "csv", "--output", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2 * 3
    assert {r["check"] for r in rows} == {"identities", "fluid", "concircular"}
    sphere_fluid = next(r for r in rows if r["metric"] == "sphere[n=3]" and r["check"] == "fluid")
    assert sphere_fluid["n/a"] == "2"


def test_tolerance_override_makes_run_fail(small, capsys):
    code, _, err = run(["verify", "--config", str(small), "--tol", "fluid_eos=1e-30"], capsys)
    assert code == 1
    assert "exit 1" in err


def test_unknown_tolerance_is_a_usage_error(small, capsys):
    code, _, err = run(["verify", "--config", str(small), "--tol", "nope=1"], capsys)
    assert code == 2
    assert "nope" in err


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('checks = ["fluid"]\n[[metrics]]\nname = "kerr"\ndimension = 4\n')
    code, _, err = run(["verify", "--config", str(bad)], capsys)
    assert code == 2
    assert "metrics[0].name" in err
    code, _, _ = run(["verify", "--config", str(tmp_path / "missing.toml")], capsys)
    assert code == 2


def test_radiation_config(capsys):
    code, out, _ = run(["verify", "--config", str(CONFIGS / "radiation.toml")], capsys)
    assert code == 0
    doc = json.loads(out)
    states = [rec["details"] for pt in doc["metrics"][0]["points"] for rec in pt["checks"]
              if rec["check"] == "fluid"]
    assert len(states) == 10
    for s in states:
        assert abs(s["p"] / s["mu"] - 1 / 3) <= 1e-6


# --- single-point commands ---------------------------------------------------------------


def test_curvature_command(capsys):
    code, out, _ = run(["curvature", "--metric", "sphere", "--dim", "2", "--point", "1.0,0.5", "--order", "2"],
                       capsys)
    assert code == 0
    assert json.loads(out)["scalar"] == pytest.approx(2.0)


def test_curvature_command_errors(capsys):
    assert run(["curvature", "--metric", "kerr", "--point", "0,0,0,0"], capsys)[0] == 2
    assert run(["curvature", "--metric", "sphere", "--dim", "2", "--point", "1.0"], capsys)[0] == 2
    code, _, err = run(["curvature", "--metric", "schwarzschild", "--param", "M=1", "--point", "0,1,1,0"], capsys)
    assert code == 2 and "outside" in err
    with pytest.raises(SystemExit) as exc:
        main(["curvature", "--metric", "sphere", "--point", "1,1", "--order", "7"])
    assert exc.value.code == 2


def test_fit_recurrence_command(capsys):
    code, out, _ = run(["fit-recurrence", "--metric", "robertson_walker", "--param", "k=1",
                        "--scale-factor", "power:2", "--point", "1.5,0.1,0.2,0.0"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["fit"]["degenerate"] is False
    assert doc["fit"]["residual"] < 1e-10
    assert doc["psi_gradient"]["status"] == "pass"
    assert len(doc["derived"]) == 10


def test_module_entry_point(small):
    proc = subprocess.run([sys.executable, "-m", "recurv", "verify", "--config", str(small), "--format", "csv"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("metric_index,metric,check")
