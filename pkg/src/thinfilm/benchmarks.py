"""Named initial-data benchmarks.

All profiles are even in every coordinate (the scheme then preserves mirror
symmetry bitwise) and are normalized to unit mass on the given grid, so they
land in the admissible class exactly.
"""
from __future__ import annotations

import numpy as np

from .core import Field, Grid, InitialData, normalize_to_unit_mass
from .pme import BarenblattSpec, barenblatt_field

BENCHMARK_NAMES = ("two_bump", "gaussian", "barenblatt")


def _gaussian(r2: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-r2 / (2.0 * sigma * sigma))


def _two_bump(grid: Grid) -> InitialData:
    # Denser layer: single central bump.  Lighter layer: two bumps offset to
    # +-1.75 along the first axis, partially overlapping the central one.
    mesh = grid.center_mesh()
    r2 = grid.radius_squared()
    f = _gaussian(r2, 0.8)
    x0 = mesh[0]
    shift = sum(c**2 for c in mesh[1:])
    g = _gaussian((x0 - 1.75) ** 2 + shift, 0.5) + _gaussian((x0 + 1.75) ** 2 + shift, 0.5)
    return InitialData(
        normalize_to_unit_mass(Field(grid, f)),
        normalize_to_unit_mass(Field(grid, g)),
    )


def _gaussian_pair(grid: Grid) -> InitialData:
    r2 = grid.radius_squared()
    return InitialData(
        normalize_to_unit_mass(Field(grid, _gaussian(r2, 0.8))),
        normalize_to_unit_mass(Field(grid, _gaussian(r2, 1.2))),
    )


def _barenblatt(grid: Grid) -> InitialData:
    spec = BarenblattSpec(dim=grid.dim)
    return InitialData(barenblatt_field(spec, 0.0, grid), Field.zeros(grid))


def make_initial(name: str, grid: Grid) -> InitialData:
    """Build a named benchmark on the grid."""
    if name == "two_bump":
        return _two_bump(grid)
    if name == "gaussian":
        return _gaussian_pair(grid)
    if name == "barenblatt":
        return _barenblatt(grid)
    raise ValueError(f"unknown benchmark {name!r}; choose one of {BENCHMARK_NAMES}")
