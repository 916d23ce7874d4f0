"""Porous medium solver and the analytic Barenblatt oracle."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from thinfilm.core import Field, Grid, cell_integral
from thinfilm.pme import (
    BarenblattSpec,
    barenblatt_eval,
    barenblatt_field,
    pme_simulate,
    profile_constants,
    support_radius,
)
from thinfilm.solver import StepControls


class TestProfile:
    def test_compact_support(self):
        spec = BarenblattSpec(dim=1)
        r = support_radius(spec, 0.0)
        assert barenblatt_eval(spec, 0.0, r * 1.01) == 0.0
        assert barenblatt_eval(spec, 0.0, -r * 1.5) == 0.0
        assert barenblatt_eval(spec, 0.0, 0.9 * r) > 0.0

    def test_even_and_radially_nonincreasing(self):
        spec = BarenblattSpec(dim=1)
        xs = np.linspace(0.0, 3.0, 200)
        vals = barenblatt_eval(spec, 0.5, xs)
        np.testing.assert_array_equal(vals, barenblatt_eval(spec, 0.5, -xs))
        assert np.all(np.diff(vals) <= 1e-15)

    def test_mass_normalization_against_quadrature(self):
        # Oracle: adaptive quadrature of the closed-form profile fixes C.
        for dim in (1, 2):
            spec = BarenblattSpec(dim=dim)
            c, k = profile_constants(spec)
            r = support_radius(spec, 0.0)
            tau = spec.time_offset / 2.0
            a = tau ** (-dim / (dim + 2.0)) * c
            b = k / tau
            if dim == 1:
                mass, _ = quad(lambda x: max(a - b * x * x, 0.0), -r, r)
            else:
                mass, _ = quad(lambda s: 2 * math.pi * s * max(a - b * s * s, 0.0), 0.0, r)
            assert mass == pytest.approx(1.0, abs=1e-9)

    def test_sampled_mass_1d(self):
        grid = Grid.centered(1, 2048)
        f = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        assert abs(cell_integral(f) - 1.0) <= 1e-6
        # Exact cell averages: error is pure round-off.
        assert abs(cell_integral(f) - 1.0) <= 1e-12

    def test_sampled_mass_2d(self):
        grid = Grid.centered(2, 128)
        f = barenblatt_field(BarenblattSpec(dim=2), 0.0, grid)
        assert abs(cell_integral(f) - 1.0) <= 1e-5

    def test_discrete_pde_residual_second_order_away_from_front(self):
        # Substitution oracle: dB/dt (central, tiny dt) vs (1/2) Lap_h(B^2)
        # on centers, restricted to well inside the support.
        spec = BarenblattSpec(dim=1)
        t, dt = 0.5, 1e-6
        sup = []
        for n in (128, 256, 512):
            grid = Grid.centered(1, n)
            x = grid.axis_centers()
            b = np.asarray(barenblatt_eval(spec, t, x))
            b_plus = np.asarray(barenblatt_eval(spec, t + dt, x))
            b_minus = np.asarray(barenblatt_eval(spec, t - dt, x))
            db_dt = (b_plus - b_minus) / (2 * dt)
            lap = np.zeros_like(b)
            sq = b * b
            lap[1:-1] = (sq[2:] - 2 * sq[1:-1] + sq[:-2]) / grid.spacing**2
            inner = np.abs(x) <= 0.7 * support_radius(spec, t)
            sup.append(np.abs(db_dt - 0.5 * lap)[inner].max())
        order = np.polyfit(np.log([1 / 128, 1 / 256, 1 / 512]), np.log(sup), 1)[0]
        assert order >= 1.9


class TestPmeSimulate:
    def test_plateau_interior_frozen_until_fronts_arrive(self):
        grid = Grid.centered(1, 64)
        f = np.zeros(64)
        f[24:40] = 1.0
        f0 = Field(grid, f / (16 * grid.spacing))
        result = pme_simulate(f0, 1e-4, [1e-4])
        assert result.steps <= 4
        # Information moves one cell per step: deep plateau cells untouched.
        final = result.states[-1].f.values
        np.testing.assert_array_equal(final[29:35], f0.values[29:35])
        assert final[24] != f0.values[24]

    def test_mass_conserved(self):
        grid = Grid.centered(1, 512)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        result = pme_simulate(f0, 1.0, np.linspace(0, 1, 5))
        assert np.abs(result.diagnostics.mass_f - result.diagnostics.mass_f[0]).max() <= 1e-12

    def test_max_principle(self):
        grid = Grid.centered(1, 256)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        result = pme_simulate(f0, 0.5, np.linspace(0, 0.5, 21))
        maxima = [s.f.values.max() for s in result.states]
        assert all(b <= a + 1e-10 for a, b in zip(maxima, maxima[1:]))

    def test_tracks_self_similar_solution_under_refinement(self):
        spec = BarenblattSpec(dim=1)
        errors = []
        for n in (128, 256):
            grid = Grid.centered(1, n)
            run = pme_simulate(barenblatt_field(spec, 0.0, grid), 1.0, [1.0])
            exact = barenblatt_field(spec, 1.0, grid)
            errors.append(np.abs(run.states[-1].f.values - exact.values).sum() * grid.spacing)
        assert errors[1] < errors[0]

    def test_g_channel_identically_zero(self):
        grid = Grid.centered(1, 128)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        result = pme_simulate(f0, 0.2, [0.2])
        np.testing.assert_array_equal(result.states[-1].g.values, 0.0)

    def test_respects_controls(self):
        grid = Grid.centered(1, 128)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        fast = pme_simulate(f0, 0.05, [0.05], StepControls(cfl=0.5))
        slow = pme_simulate(f0, 0.05, [0.05], StepControls(cfl=0.25))
        assert fast.steps < slow.steps
