"""Energy, entropy, moments, dissipation ledgers and the moment identity."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from thinfilm import benchmarks
from thinfilm.core import EpsParams, Field, Grid, InitialData, State, normalize_to_unit_mass
from thinfilm.functionals import (
    boundary_band_mass,
    energy,
    entropy,
    inequality_ledgers,
    moment_identity_residual,
    sample_diagnostics,
    second_moment,
)
from thinfilm.pme import BarenblattSpec, barenblatt_field, pme_simulate
from thinfilm.solver import simulate


def _state_1d(f_values, g_values, length=None):
    n = len(f_values)
    grid = Grid.centered(1, n, length)
    return State(Field(grid, np.asarray(f_values, float)),
                 Field(grid, np.asarray(g_values, float)))


def states_1d(max_cells=24):
    @st.composite
    def build(draw):
        n = draw(st.integers(4, max_cells))
        el = st.floats(0.0, 5.0, allow_nan=False)
        f = draw(hnp.arrays(np.float64, n, elements=el))
        g = draw(hnp.arrays(np.float64, n, elements=el))
        return _state_1d(f, g)
    return build()


class TestEnergy:
    def test_zero_state(self):
        assert energy(_state_1d(np.zeros(8), np.zeros(8)), 0.5) == 0.0

    def test_eps_zero_ignores_g(self):
        f = np.linspace(0, 1, 8)
        base = energy(_state_1d(f, np.zeros(8)), 0.0)
        assert energy(_state_1d(f, np.full(8, 3.0)), 0.0) == base

    def test_constant_fields_closed_form(self):
        # f = g = 1 on a unit-measure box, eps = 1/2: E = (1 + 0.5 * 4) / 2.
        state = _state_1d(np.ones(8), np.ones(8), length=1.0)
        assert energy(state, 0.5) == pytest.approx(1.5)

    @given(states_1d())
    def test_mirror_invariance(self, state):
        mirrored = _state_1d(state.f.values[::-1], state.g.values[::-1],
                             state.grid.extent)
        assert energy(mirrored, 0.3) == pytest.approx(energy(state, 0.3), rel=1e-13)


class TestEntropy:
    def test_unit_fields(self):
        assert entropy(_state_1d(np.ones(8), np.ones(8)), 2.0) == pytest.approx(0.0)

    def test_half_measure_block(self):
        # f = 2 on measure 1/2, g = 0: entropy = 2 ln 2 * 1/2 = ln 2.
        g = Grid.centered(1, 8, 2.0)
        f = np.zeros(8)
        f[2:4] = 2.0  # two cells of width 1/4
        state = State(Field(g, f), Field.zeros(g))
        assert entropy(state, 1.0) == pytest.approx(math.log(2.0), rel=1e-13)

    def test_matches_fsum_quadrature_oracle(self):
        grid = Grid.centered(1, 257)
        x = grid.axis_centers()
        f = np.exp(-(x**2))
        g = 0.5 * np.exp(-((x - 1) ** 2) / 2)
        state = State(Field(grid, f), Field(grid, g))
        mu = 3.0
        terms = [fi * math.log(fi) if fi > 0 else 0.0 for fi in f]
        terms += [(gi * math.log(gi) if gi > 0 else 0.0) / mu for gi in g]
        oracle = math.fsum(terms) * grid.spacing
        assert entropy(state, mu) == pytest.approx(oracle, abs=1e-10)

    @given(states_1d())
    def test_mirror_invariance(self, state):
        mirrored = _state_1d(state.f.values[::-1], state.g.values[::-1],
                             state.grid.extent)
        assert entropy(mirrored, 2.0) == pytest.approx(entropy(state, 2.0), rel=1e-12, abs=1e-13)


class TestSecondMoment:
    def test_origin_cell_support(self):
        grid = Grid.centered(1, 16)
        f = np.zeros(16)
        f[8] = 4.0  # center at +dx/2
        state = State(Field(grid, f), Field.zeros(grid))
        mass = 4.0 * grid.spacing
        assert second_moment(state, 1.0) <= (grid.spacing / 2) ** 2 * mass + 1e-15

    def test_uniform_block_matches_x2_integral(self):
        # f = 1 on [-1/2, 1/2]: integral of x^2 is 1/12, midpoint error O(dx^2).
        grid = Grid.centered(1, 8, 2.0)
        f = np.zeros(8)
        f[2:6] = 1.0
        state = State(Field(grid, f), Field.zeros(grid))
        got = second_moment(state, 1.0)
        assert abs(got - 1.0 / 12.0) <= grid.spacing**2 / 12.0 + 1e-15

    def test_inverse_mu_linearity(self):
        g_vals = np.linspace(0, 1, 8)
        state = _state_1d(np.zeros(8), g_vals)
        assert second_moment(state, 2.0) == pytest.approx(second_moment(state, 1.0) / 2.0)


class TestLedgers:
    def test_zero_dynamics_ledgers_vanish(self):
        # eps = 0 with f = 0 freezes g bitwise: every flux and dissipation
        # integrand is identically zero, so the ledgers and the moment
        # residual are exact zeros.
        grid = Grid.centered(1, 64)
        bump = np.zeros(64)
        bump[24:40] = 1.0
        g0 = normalize_to_unit_mass(Field(grid, bump))
        init = InitialData(Field.zeros(grid), g0)
        params = EpsParams(eps=0.0)
        result = simulate(init, params, 1.0, np.linspace(0, 1, 5))
        e_ledger, h_ledger = inequality_ledgers(result.diagnostics, params)
        np.testing.assert_array_equal(e_ledger, 0.0)
        np.testing.assert_array_equal(h_ledger, 0.0)
        assert moment_identity_residual(result.diagnostics, params) == 0.0

    def test_constant_state_ledgers_vanish(self):
        grid = Grid.centered(1, 32)
        flat = normalize_to_unit_mass(Field(grid, np.ones(32)))
        init = InitialData(flat, flat.copy())
        params = EpsParams(eps=0.25)
        result = simulate(init, params, 1.0, np.linspace(0, 1, 5))
        e_ledger, h_ledger = inequality_ledgers(result.diagnostics, params)
        np.testing.assert_array_equal(e_ledger, 0.0)
        np.testing.assert_array_equal(h_ledger, 0.0)

    def test_benchmark_ledgers_stay_nonpositive(self):
        grid = Grid.centered(1, 512)
        init = benchmarks.make_initial("two_bump", grid)
        params = EpsParams(eps=0.1)
        result = simulate(init, params, 0.5, np.linspace(0, 0.5, 51))
        e_ledger, h_ledger = inequality_ledgers(result.diagnostics, params)
        e0 = result.diagnostics.energy[0]
        assert float(e_ledger.max()) <= 1e-6 * e0
        assert float(h_ledger.max()) <= 1e-6 * e0
        # Ledgers and the energy itself are non-increasing up to tolerance.
        assert float(np.diff(e_ledger).max()) <= 1e-6 * e0
        assert float(np.diff(h_ledger).max()) <= 1e-6 * e0
        assert float(np.diff(result.diagnostics.energy).max()) <= 1e-6 * e0


@pytest.fixture(scope="module")
def barenblatt_runs():
    runs = {}
    for n in (128, 256):
        grid = Grid.centered(1, n)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        runs[n] = pme_simulate(f0, 1.0, np.linspace(0, 1, 101))
    return runs


class TestMomentIdentity:
    def test_residual_decreases_under_refinement(self, barenblatt_runs):
        params = EpsParams(eps=0.0)
        res = {n: moment_identity_residual(r.diagnostics, params)
               for n, r in barenblatt_runs.items()}
        assert res[256] < res[128]

    def test_dt_halving_changes_residual_less_than_spatial_term(self):
        from thinfilm.solver import StepControls

        grid = Grid.centered(1, 256)
        f0 = barenblatt_field(BarenblattSpec(dim=1), 0.0, grid)
        times = np.linspace(0, 1, 101)
        params = EpsParams(eps=0.0)
        base = moment_identity_residual(
            pme_simulate(f0, 1.0, times).diagnostics, params)
        halved = moment_identity_residual(
            pme_simulate(f0, 1.0, times, StepControls(cfl=0.125)).diagnostics, params)
        assert abs(halved - base) < base

    def test_boundary_contact_flags_invalid(self):
        grid = Grid.centered(1, 64, 2.0)  # tiny box: bumps touch the boundary
        init = benchmarks.make_initial("gaussian", grid)
        params = EpsParams(eps=0.1)
        result = simulate(init, params, 0.01, [0.0, 0.01])
        with pytest.raises(ValueError, match="boundary"):
            moment_identity_residual(result.diagnostics, params)


class TestDiagnosticsSampling:
    def test_row_contents(self):
        grid = Grid.centered(1, 64)
        init = benchmarks.make_initial("two_bump", grid)
        params = EpsParams(eps=0.1)
        row = sample_diagnostics(init.state(), params)
        assert row["t"] == 0.0
        assert row["mass_f"] == pytest.approx(1.0, abs=1e-12)
        assert row["mass_g"] == pytest.approx(1.0, abs=1e-12)
        assert row["energy"] == pytest.approx(energy(init.state(), 0.1))
        assert row["min_f"] >= 0.0
        assert row["boundary_mass"] >= 0.0

    def test_zero_flux_state_has_zero_dissipation(self):
        grid = Grid.centered(1, 32)
        flat = normalize_to_unit_mass(Field(grid, np.ones(32)))
        row = sample_diagnostics(State(flat, flat.copy()), EpsParams(eps=0.3))
        assert row["diss_f"] == 0.0
        assert row["diss_h"] == 0.0
        assert row["energy_diss"] == 0.0

    def test_boundary_band_mass_block(self):
        grid = Grid.centered(1, 16, 16.0)
        f = np.ones(16)
        state = State(Field(grid, f), Field.zeros(grid))
        assert boundary_band_mass(state) == pytest.approx(4.0)
