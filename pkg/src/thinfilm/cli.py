"""Command-line surface and persistent outputs.

Subcommands: ``simulate`` (one (eps, alpha) run), ``sweep`` (rate
experiment), ``rates`` (re-fit from an existing errors.csv), ``validate``
(Barenblatt + invariant suite).  Outputs are plain CSV plus a JSON manifest;
numbers are written with shortest round-trip formatting so re-reading
reproduces the doubles exactly.

Exit codes: 0 success, 2 config error, 3 simulation failure, 4 failed
acceptance check.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, benchmarks, validation
from .core import EpsParams, Field, Grid, InitialData, normalize_to_unit_mass
from .functionals import DIAGNOSTIC_COLUMNS, DiagnosticsRecord
from .harness import (
    ErrorCurve,
    ErrorSample,
    F_QUANTITY,
    G_QUANTITY,
    RateFit,
    SweepConfig,
    fit_all_rates,
    run_sweep,
)
from .solver import DEFAULT_CONTROLS, PositivityError, StepControls, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_ACCEPTANCE = 4

ERROR_COLUMNS = ("epsilon", "t", "quantity", "error")
RATE_COLUMNS = ("quantity", "t", "slope", "intercept", "r_squared",
                "theoretical_exponent", "pass")
SNAPSHOT_COLUMNS = ("t", "cell_index", "x", "f", "g")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    dim: int = 1
    cells: int = 2048
    box_length: float | None = None
    eps: float = 0.1
    alpha: float = 0.0
    mu_bar: float = 1.0
    t_end: float = 1.0
    output_times: tuple[float, ...] = ()
    benchmark: str = "two_bump"
    initial_file: str | None = None
    controls: StepControls = DEFAULT_CONTROLS

    def resolved_output_times(self) -> tuple[float, ...]:
        if self.output_times:
            return self.output_times
        return tuple(np.linspace(0.0, self.t_end, 101)) if self.t_end > 0 else (0.0,)

    def make_grid(self) -> Grid:
        return Grid.centered(self.dim, self.cells, self.box_length)

    def params(self) -> EpsParams:
        return EpsParams(eps=self.eps, alpha=self.alpha, mu_bar=self.mu_bar)


_KNOWN_KEYS = {
    "grid": {"dim", "cells", "box_length"},
    "params": {"eps", "alpha", "mu_bar"},
    "time": {"t_end", "output_times", "output_count"},
    "controls": {"cfl", "dt_min", "dt_max", "positivity_retry_limit"},
    "initial": {"benchmark", "file"},
    "sweep": {"eps_list", "measurement_times", "g_rate", "reference"},
}


def _float_list(raw: str, where: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{where}: expected a comma-separated list of reals ({exc})")


def _get(parser: configparser.ConfigParser, section: str, key: str, cast, default,
         check=None, describe: str = ""):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    where = f"{section}.{key}"
    try:
        value = cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})")
    if check is not None and not check(value):
        raise ConfigError(f"{where}: value {value!r} out of range ({describe})")
    return value


def _get_bool(parser, section, key, default):
    if not parser.has_option(section, key):
        return default
    try:
        return parser.getboolean(section, key)
    except ValueError:
        raise ConfigError(f"{section}.{key}: expected a boolean")


def parse_config(text: str) -> SimulationConfig | SweepConfig:
    """Parse INI-style config text; a [sweep] section selects sweep mode.

    Unknown sections or keys are rejected; violations are reported with
    section.key names.  Empty text yields the all-defaults d=1 benchmark
    simulation.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}")

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {section}.{key}")

    sweep_mode = parser.has_section("sweep")

    dim = _get(parser, "grid", "dim", int, 1, lambda v: v in (1, 2), "dim must be 1 or 2")
    default_cells = 1024 if sweep_mode else 2048
    cells = _get(parser, "grid", "cells", int, default_cells, lambda v: v >= 4,
                 "need at least 4 cells")
    box_length = _get(parser, "grid", "box_length", float, None, lambda v: v > 0,
                      "box_length must be positive")
    alpha = _get(parser, "params", "alpha", float, 0.0, lambda v: v >= 0,
                 "alpha must be >= 0")
    mu_bar = _get(parser, "params", "mu_bar", float, 1.0, lambda v: v > 0,
                  "mu_bar must be positive")

    controls_kwargs = {}
    for key, cast in (("cfl", float), ("dt_min", float), ("dt_max", float),
                      ("positivity_retry_limit", int)):
        value = _get(parser, "controls", key, cast, None)
        if value is not None:
            controls_kwargs[key] = value
    try:
        controls = StepControls(**controls_kwargs) if controls_kwargs else DEFAULT_CONTROLS
    except ValueError as exc:
        raise ConfigError(f"controls: {exc}")

    benchmark = _get(parser, "initial", "benchmark", str, "two_bump",
                     lambda v: v in benchmarks.BENCHMARK_NAMES,
                     f"one of {benchmarks.BENCHMARK_NAMES}")
    initial_file = _get(parser, "initial", "file", str, None)
    if initial_file is not None and parser.has_option("initial", "benchmark"):
        raise ConfigError("initial.file and initial.benchmark are mutually exclusive")

    if sweep_mode:
        if parser.has_section("time"):
            raise ConfigError("time.*: not used in sweep mode "
                              "(the horizon is max(sweep.measurement_times))")
        if parser.has_option("params", "eps"):
            raise ConfigError("params.eps: not used in sweep mode (set sweep.eps_list)")
        if initial_file is not None:
            raise ConfigError("initial.file: sweeps use a named benchmark")
        kwargs = {}
        if parser.has_option("sweep", "eps_list"):
            kwargs["eps_list"] = _float_list(parser.get("sweep", "eps_list"), "sweep.eps_list")
        if parser.has_option("sweep", "measurement_times"):
            kwargs["measurement_times"] = _float_list(
                parser.get("sweep", "measurement_times"), "sweep.measurement_times")
        kwargs["g_rate"] = _get_bool(parser, "sweep", "g_rate", True)
        kwargs["reference"] = _get(parser, "sweep", "reference", str, "same-grid",
                                   lambda v: v in ("same-grid", "fine-grid"),
                                   "same-grid or fine-grid")
        try:
            return SweepConfig(alpha=alpha, mu_bar=mu_bar, dim=dim, cells=cells,
                               box_length=box_length, benchmark=benchmark,
                               controls=controls, **kwargs)
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}")

    eps = _get(parser, "params", "eps", float, 0.1, lambda v: 0.0 <= v < 1.0,
               "eps must lie in [0, 1)")
    t_end = _get(parser, "time", "t_end", float, 1.0, lambda v: v >= 0,
                 "t_end must be >= 0")
    output_times: tuple[float, ...] = ()
    if parser.has_option("time", "output_times"):
        output_times = _float_list(parser.get("time", "output_times"), "time.output_times")
    elif parser.has_option("time", "output_count"):
        count = _get(parser, "time", "output_count", int, 101, lambda v: v >= 1,
                     "output_count must be >= 1")
        output_times = tuple(np.linspace(0.0, t_end, count))
    try:
        return SimulationConfig(dim=dim, cells=cells, box_length=box_length, eps=eps,
                                alpha=alpha, mu_bar=mu_bar, t_end=t_end,
                                output_times=output_times, benchmark=benchmark,
                                initial_file=initial_file, controls=controls)
    except ValueError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------------------
# CSV + manifest output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header, rows) -> Path:
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return path


def read_csv_columns(path) -> dict[str, list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                cols[name].append(value)
    return cols


def read_errors_csv(path) -> list[tuple[float, float, str, float]]:
    cols = read_csv_columns(path)
    return [
        (float(e), float(t), q, float(err))
        for e, t, q, err in zip(cols["epsilon"], cols["t"], cols["quantity"], cols["error"])
    ]


def config_echo(config) -> dict:
    echo = dataclasses.asdict(config)
    echo["type"] = type(config).__name__
    return echo


def parameter_hash(config) -> str:
    blob = json.dumps(config_echo(config), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    parameter_hash: str
    code_version: str
    wall_clock: float
    warnings: list[str]
    files: dict[str, str]
    extra: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True, default=str)


def write_outputs(out_dir, trajectory=None, diagnostics: DiagnosticsRecord | None = None,
                  curves: list[ErrorCurve] | None = None,
                  fits: list[RateFit] | None = None, *, command: str = "run",
                  config=None, warnings: list[str] | None = None,
                  wall_clock: float = 0.0, extra: dict | None = None) -> dict[str, Path]:
    """Persist whichever pieces the run produced, plus one manifest that
    references every written file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    if diagnostics is not None:
        rows = [[row[name] for name in DIAGNOSTIC_COLUMNS] for row in diagnostics.as_rows()]
        paths["diagnostics"] = _write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, rows)

    if trajectory is not None:
        rows = []
        for state in trajectory:
            grid = state.grid
            xs = grid.axis_centers(0)
            f = state.f.values.reshape(-1)
            g = state.g.values.reshape(-1)
            # d=2 rows iterate row-major; x is the first-axis coordinate.
            x_flat = (xs if grid.dim == 1
                      else np.repeat(xs, grid.cells_per_axis))
            for idx in range(f.size):
                rows.append([state.time, idx, float(x_flat[idx]), float(f[idx]), float(g[idx])])
        paths["snapshots"] = _write_csv(out / "snapshots.csv", SNAPSHOT_COLUMNS, rows)

    if curves is not None:
        rows = [[s.eps, s.t, curve.quantity, s.error]
                for curve in curves for s in curve.samples]
        paths["errors"] = _write_csv(out / "errors.csv", ERROR_COLUMNS, rows)

    if fits is not None:
        rows = [[f.quantity, f.t, f.slope, f.intercept, f.r_squared,
                 f.theoretical_exponent, f.passed] for f in fits]
        paths["rates"] = _write_csv(out / "rates.csv", RATE_COLUMNS, rows)

    manifest = RunManifest(
        command=command,
        config=config_echo(config) if config is not None else {},
        parameter_hash=parameter_hash(config) if config is not None else "",
        code_version=__version__,
        wall_clock=wall_clock,
        warnings=list(warnings or []),
        files={name: str(p) for name, p in paths.items()},
        extra=extra or {},
    )
    manifest_path = out / "manifest.json"
    tmp = manifest_path.with_name(manifest_path.name + ".tmp")
    try:
        tmp.write_text(manifest.to_json() + "\n")
        os.replace(tmp, manifest_path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    paths["manifest"] = manifest_path
    return paths


# ---------------------------------------------------------------------------
# Subcommands


def _load_initial_file(path: str, grid: Grid) -> tuple[InitialData, list[str]]:
    cols = read_csv_columns(path)
    for need in ("f", "g"):
        if need not in cols:
            raise ConfigError(f"initial.file: {path} is missing column {need!r}")
    f = np.array([float(v) for v in cols["f"]]).reshape(grid.shape)
    g = np.array([float(v) for v in cols["g"]]).reshape(grid.shape)
    notes = []
    fields = []
    for name, values in (("f", f), ("g", g)):
        fld = Field(grid, values)
        total = float(values.sum()) * grid.cell_volume
        if total > 0 and abs(total - 1.0) > 1e-12:
            fld = normalize_to_unit_mass(fld)
            notes.append(f"initial {name} renormalized from mass {total!r} to 1")
        fields.append(fld)
    return InitialData(*fields), notes


def _build_initial(config: SimulationConfig, grid: Grid) -> tuple[InitialData, list[str]]:
    if config.initial_file is not None:
        return _load_initial_file(config.initial_file, grid)
    return benchmarks.make_initial(config.benchmark, grid), []


def cmd_simulate(args) -> int:
    config = _read_config(args)
    if isinstance(config, SweepConfig):
        raise ConfigError("simulate needs a simulation config (drop the [sweep] section)")
    grid = config.make_grid()
    init, notes = _build_initial(config, grid)
    result = simulate(init, config.params(), config.t_end,
                      config.resolved_output_times(), config.controls)
    write_outputs(
        args.out,
        trajectory=result.states,
        diagnostics=result.diagnostics,
        command="simulate",
        config=config,
        warnings=notes + result.warnings,
        wall_clock=result.wall_clock,
        extra={"steps": result.steps, "retries": result.retries,
               "min_f": result.min_f, "min_g": result.min_g,
               "dim": grid.dim, "seed": args.seed},
    )
    print(f"simulate: {result.steps} steps, wall {result.wall_clock:.2f}s, "
          f"outputs in {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _read_config(args)
    if isinstance(config, SimulationConfig):
        raise ConfigError("sweep needs a [sweep] section in the config")
    if args.reference is not None:
        config = dataclasses.replace(config, reference=args.reference)
    result = run_sweep(config, threads=args.threads)
    fits = fit_all_rates(result, config)
    # Persist the largest-eps member run so the figure pipeline has
    # diagnostics and profiles to draw.
    shown_eps = config.eps_list[0]
    member = result.member_results[shown_eps]
    write_outputs(
        args.out,
        trajectory=member.states,
        diagnostics=member.diagnostics,
        curves=[result.f_curve, result.g_curve],
        fits=fits,
        command="sweep",
        config=config,
        warnings=result.manifest["warnings"],
        wall_clock=result.manifest["wall_clock"],
        extra={**result.manifest, "persisted_member_eps": shown_eps, "seed": args.seed},
    )
    for fit in fits:
        status = "pass" if fit.passed else "FAIL"
        print(f"sweep: {fit.quantity} t={fit.t:g} slope={fit.slope:.4f} "
              f"r2={fit.r_squared:.4f} target>={fit.theoretical_exponent - 0.05:.4f} "
              f"[{status}]")
    print(f"sweep: outputs in {args.out} (wall {result.manifest['wall_clock']:.1f}s)")
    return EXIT_OK if all(f.passed for f in fits) else EXIT_ACCEPTANCE


def cmd_rates(args) -> int:
    out = Path(args.out)
    errors_path = out / "errors.csv"
    manifest_path = out / "manifest.json"
    if not errors_path.exists():
        raise ConfigError(f"no errors.csv in {out}")
    if not manifest_path.exists():
        raise ConfigError(f"no manifest.json in {out} (needed for dim/alpha)")
    meta = json.loads(manifest_path.read_text())
    dim = int(meta["extra"]["dim"])
    alpha = float(meta["extra"]["alpha"])
    samples = read_errors_csv(errors_path)
    curves = {}
    for eps, t, quantity, error in samples:
        curves.setdefault(quantity, ErrorCurve(quantity, [], dim, alpha))
        curves[quantity].samples.append(ErrorSample(eps, t, error))
    from .harness import fit_rate  # local import keeps module top tidy

    fits = []
    for quantity in (F_QUANTITY, G_QUANTITY):
        if quantity not in curves:
            continue
        if quantity == G_QUANTITY and alpha >= 1.0 / (dim + 2.0):
            continue
        times = sorted({s.t for s in curves[quantity].samples})
        fits.extend(fit_rate(curves[quantity], t) for t in times)
    rows = [[f.quantity, f.t, f.slope, f.intercept, f.r_squared,
             f.theoretical_exponent, f.passed] for f in fits]
    _write_csv(out / "rates.csv", RATE_COLUMNS, rows)
    for fit in fits:
        print(f"rates: {fit.quantity} t={fit.t:g} slope={fit.slope:.4f} "
              f"[{'pass' if fit.passed else 'FAIL'}]")
    return EXIT_OK if all(f.passed for f in fits) else EXIT_ACCEPTANCE


def cmd_validate(args) -> int:
    report = validation.run_all()
    for line in report.lines:
        print(line)
    return EXIT_OK if report.ok else EXIT_ACCEPTANCE


def _read_config(args) -> SimulationConfig | SweepConfig:
    if args.config is None:
        text = ""
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
    sweep_default = getattr(args, "_force_sweep", False)
    config = parse_config(text)
    if sweep_default and isinstance(config, SimulationConfig) and not text.strip():
        config = SweepConfig()
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thinfilm",
                                     description="Thin film Muskat / porous medium laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="INI config path (defaults apply if omitted)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; runs are deterministic")

    p_sim = sub.add_parser("simulate", help="one (eps, alpha) run")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="eps-sweep rate experiment")
    common(p_sweep)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--reference", choices=("same-grid", "fine-grid"), default=None)
    p_sweep.set_defaults(func=cmd_sweep, _force_sweep=True)

    p_rates = sub.add_parser("rates", help="re-fit rates from an existing errors.csv")
    p_rates.add_argument("--out", default="out", help="run directory holding errors.csv")
    p_rates.set_defaults(func=cmd_rates)

    p_val = sub.add_parser("validate", help="Barenblatt + invariant suite")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PositivityError as exc:
        print(f"simulation failure: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    raise SystemExit(main())
