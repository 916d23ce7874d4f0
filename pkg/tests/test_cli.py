"""Config parsing, CSV round trips and the command-line surface."""
import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from thinfilm.cli import (
    ConfigError,
    EXIT_ACCEPTANCE,
    EXIT_CONFIG,
    SimulationConfig,
    main,
    parse_config,
    read_csv_columns,
    read_errors_csv,
    write_outputs,
)
from thinfilm.functionals import DIAGNOSTIC_COLUMNS, DiagnosticsRecord
from thinfilm.harness import ErrorCurve, ErrorSample, RateFit, SweepConfig


class TestParseConfig:
    def test_empty_text_gives_default_benchmark(self):
        config = parse_config("")
        assert isinstance(config, SimulationConfig)
        assert config.dim == 1 and config.cells == 2048
        assert config.eps == 0.1 and config.benchmark == "two_bump"
        times = config.resolved_output_times()
        assert times[0] == 0.0 and times[-1] == 1.0 and len(times) == 101

    def test_two_member_sweep(self):
        config = parse_config("[sweep]\neps_list = 0.25, 0.125\n")
        assert isinstance(config, SweepConfig)
        assert config.eps_list == (0.25, 0.125)
        assert config.cells == 1024  # sweep default

    def test_g_rate_hypothesis_refusal(self):
        text = "[params]\nalpha = 0.5\n\n[sweep]\neps_list = 0.25, 0.125\n"
        with pytest.raises(ConfigError, match=r"1/\(d\+2\)"):
            parse_config(text)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="grid.cell_count"):
            parse_config("[grid]\ncell_count = 10\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="mesh"):
            parse_config("[mesh]\ncells = 10\n")

    def test_type_violation_names_key(self):
        with pytest.raises(ConfigError, match="grid.cells"):
            parse_config("[grid]\ncells = many\n")

    def test_range_violation_names_key(self):
        with pytest.raises(ConfigError, match="params.eps"):
            parse_config("[params]\neps = 1.5\n")

    def test_time_section_rejected_in_sweep_mode(self):
        with pytest.raises(ConfigError, match="time"):
            parse_config("[time]\nt_end = 2.0\n\n[sweep]\neps_list = 0.5, 0.25\n")

    def test_output_count_builds_linspace(self):
        config = parse_config("[time]\nt_end = 2.0\noutput_count = 5\n")
        np.testing.assert_allclose(config.resolved_output_times(), [0, 0.5, 1, 1.5, 2])

    def test_controls_parsed(self):
        config = parse_config("[controls]\ncfl = 0.5\npositivity_retry_limit = 7\n")
        assert config.controls.cfl == 0.5
        assert config.controls.positivity_retry_limit == 7

    def test_bad_controls_rejected(self):
        with pytest.raises(ConfigError, match="cfl"):
            parse_config("[controls]\ncfl = 1.5\n")

    def test_benchmark_name_checked(self):
        with pytest.raises(ConfigError, match="initial.benchmark"):
            parse_config("[initial]\nbenchmark = vortex\n")

    def test_file_and_benchmark_exclusive(self):
        with pytest.raises(ConfigError, match="mutually exclusive"):
            parse_config("[initial]\nbenchmark = gaussian\nfile = x.csv\n")


def _tiny_diagnostics():
    rows = [
        {name: float(i) * 0.125 + j for j, name in enumerate(DIAGNOSTIC_COLUMNS)}
        for i in range(3)
    ]
    for i, row in enumerate(rows):
        row["t"] = i * (1.0 / 3.0)  # non-trivial binary expansion
    return DiagnosticsRecord.from_rows(1, rows)


class TestWriteOutputs:
    def test_round_trip_exact_doubles(self, tmp_path):
        diag = _tiny_diagnostics()
        curves = [ErrorCurve("f_err_hm1", [ErrorSample(0.1, 1 / 3, math.pi * 1e-5)], 1, 0.0)]
        fits = [RateFit("f_err_hm1", 1 / 3, 0.9366781, -4.1, 0.99991, 42 / 47, True)]
        paths = write_outputs(tmp_path, diagnostics=diag, curves=curves, fits=fits,
                              command="test")
        cols = read_csv_columns(paths["diagnostics"])
        for name in DIAGNOSTIC_COLUMNS:
            back = np.array([float(v) for v in cols[name]])
            np.testing.assert_array_equal(back, getattr(diag, name))
        eps, t, quantity, error = read_errors_csv(paths["errors"])[0]
        assert (eps, t, quantity, error) == (0.1, 1 / 3, "f_err_hm1", math.pi * 1e-5)
        rates = read_csv_columns(paths["rates"])
        assert float(rates["slope"][0]) == 0.9366781
        assert float(rates["theoretical_exponent"][0]) == 42 / 47
        assert rates["pass"][0] == "true"

    def test_zero_length_trajectory_header_only(self, tmp_path):
        paths = write_outputs(tmp_path, trajectory=[], command="test")
        lines = Path(paths["snapshots"]).read_text().strip().splitlines()
        assert lines == ["t,cell_index,x,f,g"]

    def test_single_time_single_row(self, tmp_path):
        rows = _tiny_diagnostics().as_rows()[:1]
        diag = DiagnosticsRecord.from_rows(1, rows)
        paths = write_outputs(tmp_path, diagnostics=diag, command="test")
        lines = Path(paths["diagnostics"]).read_text().strip().splitlines()
        assert len(lines) == 2

    def test_manifest_references_each_file(self, tmp_path):
        paths = write_outputs(tmp_path, trajectory=[], diagnostics=_tiny_diagnostics(),
                              command="test")
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        for name in ("snapshots", "diagnostics"):
            assert Path(manifest["files"][name]).name == f"{name}.csv"
        assert manifest["code_version"]


class TestCommands:
    def test_simulate_and_outputs(self, tmp_path):
        config = tmp_path / "sim.ini"
        config.write_text("[grid]\ncells = 128\n\n[time]\nt_end = 0.02\noutput_count = 3\n")
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(config), "--out", str(out)]) == 0
        cols = read_csv_columns(out / "diagnostics.csv")
        assert len(cols["t"]) == 3
        snaps = read_csv_columns(out / "snapshots.csv")
        assert len(snaps["t"]) == 3 * 128

    def test_simulate_from_initial_file(self, tmp_path):
        n = 64
        grid_file = tmp_path / "init.csv"
        x = np.linspace(-10, 10, n, endpoint=False) + 10 / n
        f = np.exp(-(x**2))
        with open(grid_file, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["f", "g"])
            for i in range(n):
                writer.writerow([repr(float(f[i])), repr(0.0)])
        config = tmp_path / "sim.ini"
        config.write_text(
            f"[grid]\ncells = {n}\n\n[time]\nt_end = 0.01\noutput_count = 2\n"
            f"\n[initial]\nfile = {grid_file}\n")
        out = tmp_path / "runf"
        assert main(["simulate", "--config", str(config), "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert any("renormalized" in w for w in manifest["warnings"])

    def test_sweep_rates_roundtrip(self, tmp_path):
        config = tmp_path / "sweep.ini"
        config.write_text(
            "[grid]\ncells = 96\n\n[sweep]\n"
            "eps_list = 0.25, 0.125, 0.0625, 0.03125\nmeasurement_times = 0.1\n")
        out = tmp_path / "sweepout"
        rc = main(["sweep", "--config", str(config), "--out", str(out)])
        assert rc in (0, EXIT_ACCEPTANCE)
        before = (out / "rates.csv").read_text()
        assert main(["rates", "--out", str(out)]) == rc
        assert (out / "rates.csv").read_text() == before  # refit reproduces

    def test_config_error_exit_code(self, tmp_path, capsys):
        config = tmp_path / "bad.ini"
        config.write_text("[params]\nalpha = 0.5\n\n[sweep]\neps_list = 0.5, 0.25\n")
        rc = main(["sweep", "--config", str(config), "--out", str(tmp_path / "x")])
        assert rc == EXIT_CONFIG
        assert "1/(d+2)" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        rc = main(["simulate", "--config", str(tmp_path / "nope.ini"),
                   "--out", str(tmp_path / "y")])
        assert rc == EXIT_CONFIG

    def test_sweep_config_rejected_by_simulate(self, tmp_path):
        config = tmp_path / "sweep.ini"
        config.write_text("[sweep]\neps_list = 0.5, 0.25\n")
        rc = main(["simulate", "--config", str(config), "--out", str(tmp_path / "z")])
        assert rc == EXIT_CONFIG

    def test_deterministic_sweep_bytes(self, tmp_path):
        config = tmp_path / "sweep.ini"
        config.write_text(
            "[grid]\ncells = 64\n\n[sweep]\n"
            "eps_list = 0.25, 0.125, 0.0625, 0.03125\nmeasurement_times = 0.05\n")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["sweep", "--config", str(config), "--out", str(out1)])
        main(["sweep", "--config", str(config), "--out", str(out2), "--threads", "2"])
        assert (out1 / "errors.csv").read_bytes() == (out2 / "errors.csv").read_bytes()
        assert (out1 / "rates.csv").read_bytes() == (out2 / "rates.csv").read_bytes()
