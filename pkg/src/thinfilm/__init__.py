"""Numerical laboratory for the thin film Muskat system and its
porous-medium singular limit: a structure-preserving finite-volume scheme,
conserved/dissipated-quantity monitors, and empirical convergence-rate
measurement in discrete negative Sobolev norms."""

__version__ = "0.1.0"

from .core import (
    EpsParams,
    Field,
    Grid,
    InitialData,
    State,
    cell_integral,
    mu_of_eps,
    normalize_to_unit_mass,
)
from .functionals import (
    DiagnosticsRecord,
    energy,
    entropy,
    inequality_ledgers,
    moment_identity_residual,
    second_moment,
)
from .harness import (
    ErrorCurve,
    ErrorSample,
    RateFit,
    SweepConfig,
    SweepResult,
    fit_all_rates,
    fit_rate,
    run_sweep,
    theoretical_f_exponent,
    theoretical_g_exponent,
)
from .pme import BarenblattSpec, barenblatt_eval, barenblatt_field, pme_simulate
from .sobolev import HelmholtzOperator, PotentialPair, h_minus_s_norm, invert_helmholtz
from .solver import (
    FluxPair,
    PositivityError,
    SimulationResult,
    StepControls,
    face_fluxes,
    pressures,
    simulate,
    stable_dt,
    step,
)

__all__ = [
    "BarenblattSpec",
    "DiagnosticsRecord",
    "EpsParams",
    "ErrorCurve",
    "ErrorSample",
    "Field",
    "FluxPair",
    "Grid",
    "HelmholtzOperator",
    "InitialData",
    "PositivityError",
    "PotentialPair",
    "RateFit",
    "SimulationResult",
    "State",
    "StepControls",
    "SweepConfig",
    "SweepResult",
    "barenblatt_eval",
    "barenblatt_field",
    "cell_integral",
    "energy",
    "entropy",
    "face_fluxes",
    "fit_all_rates",
    "fit_rate",
    "h_minus_s_norm",
    "inequality_ledgers",
    "invert_helmholtz",
    "moment_identity_residual",
    "mu_of_eps",
    "normalize_to_unit_mass",
    "pme_simulate",
    "pressures",
    "run_sweep",
    "second_moment",
    "simulate",
    "stable_dt",
    "step",
    "theoretical_f_exponent",
    "theoretical_g_exponent",
]
