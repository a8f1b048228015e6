import csv
import io
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from conformal_qm.cli import _format_complex, main

GOLDEN = Path(__file__).parent / "data" / "report_golden.json"


@pytest.fixture
def runner():
    return CliRunner()


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.output


def test_help_lists_commands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for command in ("verify", "map", "decompose", "constants", "plot-data"):
        assert command in result.output


def test_format_complex():
    assert _format_complex(2j) == "0+2i"
    assert _format_complex(1 - 2j / 3) == "1-0.6667i"
    assert _format_complex(complex(-0.0, -0.0)) == "0+0i"


def test_map_hydrogen_ground_energy(runner):
    result = runner.invoke(main, ["map", "--x", "1,0,0", "--t", "0", "--E=-0.5", "--b", "1"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["s"] == "0+2i"
    assert data["s_conjugate"] == "0-2i"
    assert data["z"] == [1.0, 0.0, 0.0]
    assert data["roundtrip_error"] < 1e-14


def test_map_origin(runner):
    result = runner.invoke(main, ["map", "--x", "0,0,0", "--t", "0", "--E=-0.5"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["s"] == "0+0i"


def test_map_second_index(runner):
    result = runner.invoke(main, ["map", "--x", "1,0,0", "--t", "1", "--E", "1.5", "--b", "1",
                                  "--lambda", "2"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["s"] == "1-0.6667i"


@pytest.mark.parametrize("args", [
    ["--E", "0"],
    ["--E", "1", "--b", "-1"],
    ["--E", "1", "--x", "1,2"],
])
def test_map_rejects_bad_input(runner, args):
    assert runner.invoke(main, ["map", *args]).exit_code == 2


def test_map_requires_energy(runner):
    assert runner.invoke(main, ["map"]).exit_code == 2


def test_decompose_coulomb(runner):
    result = runner.invoke(main, ["decompose", "--lambda", "1"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["separable"] is True
    assert data["V_form"]["r_power"] == -1.0
    assert data["E0_rational"] == "-1/2"
    assert data["E0_value"] == pytest.approx(-0.5)


def test_decompose_oscillator_index(runner):
    result = runner.invoke(main, ["decompose", "--lambda", "2", "--system", "oscillator"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["E0_value"] == pytest.approx(1.5)


def test_decompose_non_separable(runner):
    result = runner.invoke(main, ["decompose", "--lambda", "3"])
    assert result.exit_code == 0
    assert json.loads(result.output)["separable"] is False


@pytest.mark.parametrize("lam", ["0", "abc"])
def test_decompose_invalid_lambda(runner, lam):
    assert runner.invoke(main, ["decompose", "--lambda", lam]).exit_code == 2


def test_constants_json(runner):
    result = runner.invoke(main, ["constants", "--json"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["constants"]["hbar"] == 1.0
    assert data["hydrogen"]["lambda"] == 1
    assert data["oscillator"]["lambda"] == 2
    assert data["oscillator"]["E_ground"] == pytest.approx(1.5)


def test_constants_table(runner):
    result = runner.invoke(main, ["--units", "si", "constants"])
    assert result.exit_code == 0, result.output
    assert "Derived scales" in result.output


def test_unknown_units_from_environment(runner):
    result = runner.invoke(main, ["constants", "--json"], env={"CONFORMAL_QM_UNITS": "bogus"})
    assert result.exit_code == 2


def test_verify_rejects_zero_principal_number(runner):
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--n", "0"])
    assert result.exit_code == 2
    assert "quantum" in result.output


def test_verify_rejects_invalid_state(runner):
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--state", "1,1,0"])
    assert result.exit_code == 2


def test_verify_state_needs_single_system(runner):
    assert runner.invoke(main, ["verify", "--state", "1,0,0"]).exit_code == 2


def test_verify_ground_state(runner, tmp_path):
    report_path = tmp_path / "report.json"
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--state", "1,0,0",
                                  "--points", "20", "--output", str(report_path)])
    report = json.loads(report_path.read_text())
    assert result.exit_code == 0, report
    assert report["overall_pass"] is True
    assert report["seed"] == 42
    assert report["units"] == "atomic"
    names = [check["name"] for check in report["checks"]]
    assert "schrodinger[hydrogen(1,0,0)]" in names
    assert "lambda_decomposition" in names


def test_verify_csv(runner, tmp_path):
    report_path = tmp_path / "report.csv"
    runner.invoke(main, ["verify", "--system", "oscillator", "--state", "0,0,0", "--points", "10",
                         "--format", "csv", "--output", str(report_path)])
    rows = list(csv.DictReader(io.StringIO(report_path.read_text())))
    assert rows
    assert set(rows[0]) == {"name", "eq_ref", "n_points", "max_abs", "max_rel", "tol", "pass", "error"}


def test_verify_detects_corrupted_energy(runner, tmp_path):
    report_path = tmp_path / "report.json"
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--state", "1,0,0",
                                  "--points", "20", "--corrupt-energy", "1.01",
                                  "--output", str(report_path)])
    assert result.exit_code == 1
    assert json.loads(report_path.read_text())["overall_pass"] is False


def test_verify_unwritable_output(runner, tmp_path):
    target = tmp_path / "missing" / "report.json"
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--state", "1,0,0",
                                  "--points", "5", "--output", str(target)])
    assert result.exit_code == 2


def test_verify_rejects_bad_tolerance(runner):
    result = runner.invoke(main, ["verify", "--system", "hydrogen", "--tol-fd", "-1"])
    assert result.exit_code == 2


def test_verify_config_file(runner, tmp_path):
    config = tmp_path / "suite.conf"
    config.write_text("# small run\nseed = 7\npoints = 30\nsystem = hydrogen\n")
    report_path = tmp_path / "report.json"
    runner.invoke(main, ["verify", "--config", str(config), "--state", "1,0,0",
                         "--points", "12", "--output", str(report_path)])
    report = json.loads(report_path.read_text())
    assert report["seed"] == 7
    schrodinger = next(c for c in report["checks"] if c["name"].startswith("schrodinger"))
    assert schrodinger["n_points"] == 12


def test_verify_config_unknown_key(runner, tmp_path):
    config = tmp_path / "suite.conf"
    config.write_text("color = blue\n")
    result = runner.invoke(main, ["verify", "--config", str(config)])
    assert result.exit_code == 2
    assert "color" in result.output


def test_plot_data(runner, tmp_path):
    target = tmp_path / "radial.csv"
    result = runner.invoke(main, ["plot-data", "--state", "1,0,0", "--points", "50",
                                  "--output", str(target)])
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert len(rows) == 50
    assert float(rows[0]["r"]) == pytest.approx(0.01)
    assert float(rows[-1]["r"]) == pytest.approx(12.0)
    assert all(float(row["R_tilde"]) == pytest.approx(2.0) for row in rows)
    assert max(float(row["residual"]) for row in rows) < 1e-9


def test_plot_data_rejects_bad_grid(runner):
    result = runner.invoke(main, ["plot-data", "--r-min", "2", "--r-max", "1"])
    assert result.exit_code == 2


def test_verify_report_schema_and_reproducibility(runner, tmp_path):
    args = ["verify", "--system", "oscillator", "--state", "0,0,0", "--points", "10"]
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    runner.invoke(main, [*args, "--output", str(first)])
    runner.invoke(main, [*args, "--output", str(second)])
    assert first.read_bytes() == second.read_bytes()

    golden = json.loads(GOLDEN.read_text())
    report = json.loads(first.read_text())
    assert list(report) == list(golden)
    assert all(list(check) == list(golden["checks"][0]) for check in report["checks"])
    assert report["convention_ratios"] == []
