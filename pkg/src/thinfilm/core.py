"""Grids, fields, states and parameter bundles shared by every solver module.

Everything lives on a uniform cell-centered Cartesian mesh over a truncated
box centered at the origin.  Field values are cell averages, so every
functional downstream is a midpoint-rule quadrature and the conservative
update telescopes exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Box side lengths that keep the benchmark bumps well away from the boundary
# over the default horizons.
DEFAULT_BOX_LENGTH = {1: 20.0, 2: 10.0}

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered mesh on a box, d in {1, 2}.

    ``origin`` is the lower corner; cell centers sit at
    ``origin + (i + 1/2) * spacing`` along each axis.
    """

    dim: int
    cells_per_axis: int
    spacing: float
    origin: tuple[float, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.cells_per_axis < 4:
            raise ValueError(f"need at least 4 cells per axis, got {self.cells_per_axis}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if len(self.origin) != self.dim:
            raise ValueError("origin length must match dim")

    @classmethod
    def centered(cls, dim: int, cells_per_axis: int, box_length: float | None = None) -> Grid:
        """Box of side ``box_length`` centered at the origin."""
        if dim not in DEFAULT_BOX_LENGTH:
            raise ValueError(f"dim must be 1 or 2, got {dim}")
        length = DEFAULT_BOX_LENGTH[dim] if box_length is None else float(box_length)
        spacing = length / cells_per_axis
        return cls(dim, cells_per_axis, spacing, (-length / 2.0,) * dim)

    @property
    def extent(self) -> float:
        return self.cells_per_axis * self.spacing

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells_per_axis,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_centers(self, axis: int = 0) -> np.ndarray:
        return self.origin[axis] + (np.arange(self.cells_per_axis) + 0.5) * self.spacing

    def center_mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        axes = [self.axis_centers(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def radius_squared(self) -> np.ndarray:
        """|x|^2 at cell centers."""
        mesh = self.center_mesh()
        out = mesh[0] ** 2
        for c in mesh[1:]:
            out = out + c**2
        return out


@dataclass
class Field:
    """Cell-averaged scalar field on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")

    @classmethod
    def zeros(cls, grid: Grid) -> Field:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> Field:
        """Sample ``fn`` at cell centers; ``fn`` takes one coordinate array per axis."""
        return cls(grid, np.asarray(fn(*grid.center_mesh()), dtype=float))

    def copy(self) -> Field:
        return Field(self.grid, self.values.copy())


@dataclass
class State:
    """Layer heights (f, g) on a common grid at time t."""

    f: Field
    g: Field
    time: float = 0.0

    def __post_init__(self):
        if self.f.grid is not self.g.grid and self.f.grid != self.g.grid:
            raise ValueError("f and g must share one grid")
        if self.time < 0:
            raise ValueError("time must be non-negative")

    @property
    def grid(self) -> Grid:
        return self.f.grid

    def copy(self) -> State:
        return State(self.f.copy(), self.g.copy(), self.time)


@dataclass(frozen=True)
class EpsParams:
    """Singular-limit parameters: R = eps and mu = mu_bar * eps^(-alpha).

    ``eps = 0`` is accepted as the limit configuration (used by the
    porous-medium reference runs); it requires ``alpha < 1`` so that the
    g-flux coefficient mu*eps = mu_bar * eps^(1-alpha) has limit 0.
    """

    eps: float
    alpha: float = 0.0
    mu_bar: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.eps < 1.0):
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not (self.mu_bar > 0):
            raise ValueError(f"mu_bar must be positive, got {self.mu_bar}")
        if self.eps == 0.0 and self.alpha >= 1.0:
            raise ValueError("eps = 0 requires alpha < 1")

    @property
    def mu(self) -> float:
        """Viscosity ratio mu_bar * eps^(-alpha); +inf in the eps=0, alpha>0 corner."""
        if self.eps == 0.0:
            return self.mu_bar if self.alpha == 0.0 else math.inf
        return self.mu_bar * self.eps ** (-self.alpha)

    @property
    def inv_mu(self) -> float:
        """1/mu, the g-weight in the entropy and the second moment."""
        return self.eps**self.alpha / self.mu_bar

    @property
    def mu_eps(self) -> float:
        """mu * eps = mu_bar * eps^(1-alpha), the g-equation flux coefficient."""
        if self.eps == 0.0:
            return 0.0
        return self.mu_bar * self.eps ** (1.0 - self.alpha)


def mu_of_eps(params: EpsParams) -> float:
    """Viscosity ratio mu = mu_bar * eps^(-alpha)."""
    return params.mu


def cell_integral(field: Field) -> float:
    """Midpoint-rule integral: sum of values times the cell volume."""
    return float(field.values.sum() * field.grid.cell_volume)


def normalize_to_unit_mass(field: Field) -> Field:
    """Scale a non-negative field to unit mass.

    A field already within the mass tolerance is returned unchanged, which
    makes normalization bitwise idempotent.  Rejects negative or zero-mass
    input, naming the offending cell/mass.
    """
    v = field.values
    if not np.all(np.isfinite(v)):
        bad = np.unravel_index(int(np.argmin(np.isfinite(v))), v.shape)
        raise ValueError(f"non-finite value at cell {tuple(int(i) for i in bad)}")
    if v.min() < 0:
        bad = np.unravel_index(int(np.argmin(v)), v.shape)
        raise ValueError(
            f"negative value {v.min():.6g} at cell {tuple(int(i) for i in bad)}; "
            "cannot normalize"
        )
    mass = cell_integral(field)
    if mass <= 0:
        raise ValueError(f"zero mass (total {mass:.6g}); cannot normalize")
    if abs(mass - 1.0) <= MASS_TOL:
        return Field(field.grid, v.copy())
    return Field(field.grid, v / mass)


@dataclass
class InitialData:
    """Admissible initial pair: non-negative, unit mass (or identically zero).

    The identically-zero escape hatch covers the porous-medium limit runs,
    which freeze g at zero.
    """

    f0: Field
    g0: Field

    def __post_init__(self):
        if self.f0.grid != self.g0.grid:
            raise ValueError("f0 and g0 must share one grid")
        for name, fld in (("f0", self.f0), ("g0", self.g0)):
            v = fld.values
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has non-finite values")
            if v.min() < 0:
                raise ValueError(f"{name} has negative values (min {v.min():.6g})")
            mass = cell_integral(fld)
            if not (abs(mass - 1.0) <= MASS_TOL or mass == 0.0):
                raise ValueError(
                    f"{name} mass {mass!r} is neither 1 (within {MASS_TOL}) nor exactly 0"
                )

    @property
    def grid(self) -> Grid:
        return self.f0.grid

    def state(self) -> State:
        return State(self.f0.copy(), self.g0.copy(), 0.0)


# Shared face-stencil helpers.  The solver fluxes and the dissipation
# functionals must use the same differences so zero-flux states produce
# exactly zero dissipation.

def axis_diff(values: np.ndarray, axis: int) -> np.ndarray:
    """Differences across interior faces along ``axis`` (right minus left)."""
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return values[tuple(hi)] - values[tuple(lo)]


def upwind_face_values(cell_values: np.ndarray, dp: np.ndarray, axis: int) -> np.ndarray:
    """Cell value seen from the higher-pressure side of each interior face."""
    lo = [slice(None)] * cell_values.ndim
    hi = [slice(None)] * cell_values.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return np.where(dp > 0, cell_values[tuple(hi)], cell_values[tuple(lo)])
