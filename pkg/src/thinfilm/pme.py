"""Porous medium equation df/dt = div(f grad f): the eps -> 0 limit target,
plus the analytic Barenblatt source solution used to validate it.

The solver is the coupled integrator run with eps = 0 and g frozen at zero
(same code path by construction, so limit comparisons are bitwise).

Barenblatt profile: div(f grad f) = (1/2) Lap(f^2), so the textbook m = 2
source solution applies with time rescaled by one half,

    f(t, x) = tau^(-d/(d+2)) * ( C - |x|^2 / (4 (d+2) tau^(2/(d+2))) )_+ ,
    tau = (t + t0) / 2,

with C fixed by the total mass:  d=1: (4/3) C^(3/2) sqrt(4(d+2)) ... reduces
to C = (3 m sqrt(k) / 4)^(2/3);  d=2: C = sqrt(2 k m / pi);  k = 1/(4(d+2)).
The positive offset t0 avoids the initial singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EpsParams, Field, Grid, InitialData
from .solver import DEFAULT_CONTROLS, SimulationResult, StepControls, simulate


@dataclass(frozen=True)
class BarenblattSpec:
    dim: int = 1
    mass: float = 1.0
    time_offset: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.mass > 0):
            raise ValueError("mass must be positive")
        if not (self.time_offset > 0):
            raise ValueError("time_offset must be positive")


def profile_constants(spec: BarenblattSpec) -> tuple[float, float]:
    """(C, k): parabola height constant and curvature k = 1/(4(d+2))."""
    d = spec.dim
    k = 1.0 / (4.0 * (d + 2))
    if d == 1:
        c = (3.0 * spec.mass * math.sqrt(k) / 4.0) ** (2.0 / 3.0)
    else:
        c = math.sqrt(2.0 * k * spec.mass / math.pi)
    return c, k


def _coefficients(spec: BarenblattSpec, t: float) -> tuple[float, float]:
    """Profile a - b |x|^2 inside the support at paper time t."""
    tau = (t + spec.time_offset) / 2.0
    if tau <= 0:
        raise ValueError("t + time_offset must be positive")
    c, k = profile_constants(spec)
    d = spec.dim
    a = tau ** (-d / (d + 2.0)) * c
    b = k / tau  # k * tau^(-alpha - 2 beta) with alpha + 2 beta = 1
    return a, b


def support_radius(spec: BarenblattSpec, t: float) -> float:
    a, b = _coefficients(spec, t)
    return math.sqrt(a / b)


def barenblatt_eval(spec: BarenblattSpec, t: float, x) -> float | np.ndarray:
    """Pointwise profile value; ``x`` is a scalar (d=1) or a length-d point.

    Arrays broadcast: for d=1 any shape, for d=2 the last axis holds the
    coordinates.
    """
    a, b = _coefficients(spec, t)
    xs = np.asarray(x, dtype=float)
    if spec.dim == 1:
        r2 = xs**2
    else:
        if xs.shape[-1] != 2:
            raise ValueError("for dim=2 the last axis of x must have length 2")
        r2 = (xs**2).sum(axis=-1)
    val = np.maximum(a - b * r2, 0.0)
    return float(val) if np.isscalar(x) or xs.ndim == 0 else val


def _cell_averages_1d(grid: Grid, a: float, b: float) -> np.ndarray:
    # Exact: antiderivative of (a - b x^2)_+ is a x - b x^3 / 3 clipped to the
    # support, so cell averages are closed form and the discrete mass equals
    # the continuum mass of the truncated profile.
    r = math.sqrt(a / b)

    def anti(x):
        xc = np.clip(x, -r, r)
        return a * xc - b * xc**3 / 3.0

    edges = grid.origin[0] + np.arange(grid.cells_per_axis + 1) * grid.spacing
    return (anti(edges[1:]) - anti(edges[:-1])) / grid.spacing


def _cell_averages_2d(grid: Grid, a: float, b: float, sub: int = 16) -> np.ndarray:
    # Midpoint subdivision; exact quadratic integration is only spoiled in
    # cells straddling the support circle, which the sub-sampling resolves.
    n = grid.cells_per_axis
    dx = grid.spacing
    fine = grid.origin[0] + (np.arange(n * sub) + 0.5) * (dx / sub)
    xx = fine[:, None] ** 2 + fine[None, :] ** 2
    vals = np.maximum(a - b * xx, 0.0)
    return vals.reshape(n, sub, n, sub).mean(axis=(1, 3))


def barenblatt_field(spec: BarenblattSpec, t: float, grid: Grid) -> Field:
    """Cell-averaged profile on the grid (exact averages in d=1)."""
    if grid.dim != spec.dim:
        raise ValueError("grid dimension must match the profile dimension")
    a, b = _coefficients(spec, t)
    if grid.dim == 1:
        return Field(grid, _cell_averages_1d(grid, a, b))
    return Field(grid, _cell_averages_2d(grid, a, b))


def pme_simulate(f0: Field, t_end: float, output_times=None,
                 controls: StepControls = DEFAULT_CONTROLS) -> SimulationResult:
    """Porous medium run: delegate to the coupled solver with eps = 0, g = 0."""
    init = InitialData(f0.copy(), Field.zeros(f0.grid))
    params = EpsParams(eps=0.0, alpha=0.0, mu_bar=1.0)
    return simulate(init, params, t_end, output_times, controls)
