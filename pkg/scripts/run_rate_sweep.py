#!/usr/bin/env python3
"""Run the two singular-limit rate experiments:

    alpha = 0.0  -> runs/sweep_alpha0    (f-rate vs 42/47, g-rate vs 1/3)
    alpha = 0.2  -> runs/sweep_alpha02   (g-rate vs 2/15)

Each directory gets errors.csv, rates.csv, diagnostics/snapshots of the
largest-eps member, and a manifest.
"""
import pathlib
import sys
import tempfile

from thinfilm.cli import main

CONFIG_A0 = """\
[sweep]
eps_list = 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625
measurement_times = 0.25, 0.5, 1.0
"""

CONFIG_A02 = CONFIG_A0 + "\n[params]\nalpha = 0.2\n"


def run(config_text: str, out: str) -> int:
    with tempfile.NamedTemporaryFile("w", suffix=".ini", delete=False) as fh:
        fh.write(config_text)
        path = fh.name
    try:
        return main(["sweep", "--config", path, "--out", out])
    finally:
        pathlib.Path(path).unlink(missing_ok=True)


if __name__ == "__main__":
    rc = run(CONFIG_A0, "runs/sweep_alpha0")
    rc = max(rc, run(CONFIG_A02, "runs/sweep_alpha02"))
    sys.exit(rc)
