#!/usr/bin/env python3
"""Run the default two-bump benchmark (d=1, N=2048, eps=0.1, T=1) and write
diagnostics/snapshots under runs/benchmark."""
import sys

from thinfilm.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "--out", "runs/benchmark"]))
