"""Self-contained validation suite behind ``thinfilm validate``.

Quick structural checks: Barenblatt mass and tracking order, conservation /
positivity / mirror symmetry on the benchmark, dense-matrix agreement of the
negative-Sobolev solves, and the bitwise decoupling identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import benchmarks
from .core import EpsParams, Field, Grid, cell_integral
from .pme import BarenblattSpec, barenblatt_field, pme_simulate
from .sobolev import HelmholtzOperator, h_minus_s_norm
from .solver import simulate


@dataclass
class ValidationReport:
    ok: bool = True
    lines: list[str] = dc_field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str):
        self.ok = self.ok and passed
        self.lines.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


def _dense_helmholtz(grid: Grid) -> np.ndarray:
    """Explicit (I - Lap_h) assembly with the no-flux closure."""
    n = grid.cells_per_axis
    dx2 = grid.spacing**2
    if grid.dim == 1:
        size = n
        neighbors = lambda i: [(j,) for j in (i[0] - 1, i[0] + 1) if 0 <= j < n]
        flat = lambda i: i[0]
        cells = [(i,) for i in range(n)]
    else:
        size = n * n
        neighbors = lambda i: [
            (a, b)
            for a, b in ((i[0] - 1, i[1]), (i[0] + 1, i[1]), (i[0], i[1] - 1), (i[0], i[1] + 1))
            if 0 <= a < n and 0 <= b < n
        ]
        flat = lambda i: i[0] * n + i[1]
        cells = [(a, b) for a in range(n) for b in range(n)]
    mat = np.zeros((size, size))
    for cell in cells:
        k = flat(cell)
        mat[k, k] = 1.0
        for nb in neighbors(cell):
            mat[k, k] += 1.0 / dx2
            mat[k, flat(nb)] -= 1.0 / dx2
    return mat


def check_barenblatt_mass(report: ValidationReport):
    grid = Grid.centered(1, 2048)
    profile = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
    err = abs(cell_integral(profile) - 1.0)
    report.check("barenblatt profile mass (N=2048)", err <= 1e-6, f"|mass-1| = {err:.2e}")


def check_pme_tracking(report: ValidationReport):
    spec = BarenblattSpec(dim=1)
    errors = {}
    for n in (256, 512, 1024, 2048):
        grid = Grid.centered(1, n)
        run = pme_simulate(barenblatt_field(spec, 0.0, grid), 1.0, [1.0])
        exact = barenblatt_field(spec, 1.0, grid)
        errors[n] = float(np.abs(run.states[-1].f.values - exact.values).sum()) * grid.spacing
    ns = sorted(errors)
    order = float(np.polyfit(np.log([1.0 / n for n in ns]),
                             np.log([errors[n] for n in ns]), 1)[0])
    report.check(
        "pme barenblatt tracking",
        errors[1024] <= 1e-2 and order >= 0.75,
        f"L1(t=1) at N=1024 = {errors[1024]:.2e}, measured order = {order:.3f}",
    )


def check_invariants(report: ValidationReport):
    grid = Grid.centered(1, 512)
    init = benchmarks.make_initial("two_bump", grid)
    params = EpsParams(eps=0.1)
    result = simulate(init, params, 0.25, np.linspace(0.0, 0.25, 11))
    mass_err = max(float(np.abs(result.diagnostics.mass_f - 1.0).max()),
                   float(np.abs(result.diagnostics.mass_g - 1.0).max()))
    asym = max(
        max(float(np.abs(s.f.values - s.f.values[::-1]).max()) for s in result.states),
        max(float(np.abs(s.g.values - s.g.values[::-1]).max()) for s in result.states),
    )
    ok = mass_err <= 1e-12 and result.min_f >= 0 and result.min_g >= 0 and asym <= 1e-12
    report.check(
        "mass / positivity / symmetry",
        ok,
        f"|mass-1| = {mass_err:.2e}, min = ({result.min_f:.1e}, {result.min_g:.1e}), "
        f"asymmetry = {asym:.2e}",
    )


def check_sobolev_oracle(report: ValidationReport):
    rng = np.random.default_rng(7)
    worst = 0.0
    for dim, n in ((1, 48), (2, 16)):
        grid = Grid.centered(dim, n)
        op = HelmholtzOperator(grid)
        dense = _dense_helmholtz(grid)
        u = rng.normal(size=grid.shape)
        for s in (1, 2):
            w = u.reshape(-1)
            for _ in range(s):
                w = np.linalg.solve(dense, w)
            expected = np.sqrt(float(w @ u.reshape(-1)) * grid.cell_volume)
            got = h_minus_s_norm(op, Field(grid, u), s)
            worst = max(worst, abs(got - expected) / expected)
    report.check("negative-Sobolev dense oracle", worst <= 1e-10,
                 f"max relative deviation = {worst:.2e}")


def check_decoupling(report: ValidationReport):
    grid = Grid.centered(1, 256)
    init = benchmarks.make_initial("barenblatt", grid)  # g identically zero
    times = np.linspace(0.0, 0.1, 5)
    muskat = simulate(init, EpsParams(eps=0.0), 0.1, times)
    pme = pme_simulate(init.f0, 0.1, times)
    identical = all(
        np.array_equal(a.f.values, b.f.values) and np.array_equal(a.g.values, b.g.values)
        for a, b in zip(muskat.states, pme.states)
    )
    report.check("decoupling identity (eps=0, g0=0)", identical,
                 "muskat and pme trajectories bitwise identical" if identical
                 else "trajectories differ")


def run_all() -> ValidationReport:
    report = ValidationReport()
    check_barenblatt_mass(report)
    check_pme_tracking(report)
    check_invariants(report)
    check_sobolev_oracle(report)
    check_decoupling(report)
    return report
