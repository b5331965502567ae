"""Pseudo-spectral solver for the dissipative generalized SQG equation.

The scalar theta is advected on the 2-torus by u = perp-grad (-Delta)^{-alpha}
theta and damped by nu (-Delta)^gamma.  Fields live in spectral form on a
square grid with sharp 2/3 dealiasing; the integrator is a fourth order
integrating-factor Runge-Kutta scheme with exact semigroup treatment of the
dissipation.

Typical use::

    from gsqg import SimParams, from_recipe, run

    theta0 = from_recipe("rough", {"kmax": 4, "exponent": 3.0}, M=64, seed=0)
    series = run(theta0, SimParams(alpha=0.5, gamma=1.0, nu=1e-2,
                                   M=64, dt=0.01, t_end=1.0))

Sweeps over viscosity, the scenario presets and the report format live in
:mod:`gsqg.sweeps`; the command line entry point in :mod:`gsqg.cli`.
"""

from gsqg.spectral import (
    SpectralField,
    SnapshotMeta,
    wavenumbers,
    from_physical,
    to_physical,
    fractional_laplacian,
    derivative,
    riesz_perp,
    sobolev_norm,
    inner_product_hs,
    lp_norm,
    project_low,
    project_high,
    change_grid,
    save_snapshot,
    load_snapshot,
)
from gsqg.nonlinear import (
    DealiasPolicy,
    DEFAULT_DEALIAS,
    ProbeFunction,
    nonlinear_term,
    cancellation_residuals,
    weak_form_identity_gap,
)
from gsqg.diagnostics import DiagnosticSeries, p_alpha, lp_monotonicity_check
from gsqg.stepping import (
    SimParams,
    ForcingSpec,
    ZERO_FORCING,
    ConstantProfile,
    SinusoidProfile,
    RampProfile,
    ExpProfile,
    BlowupError,
    CflViolation,
    run,
    dissipation_factor,
)
from gsqg.initial import (
    rough_datum,
    bump_datum,
    modes_datum,
    counterexample_datum,
    from_recipe,
)
from gsqg.sweeps import (
    SweepConfig,
    M_for_nu,
    n_freq,
    run_sweep,
    run_scenario,
    scenario_config,
    counterexample_experiment,
    global_existence_experiment,
    write_report,
    SCENARIO_NAMES,
)
from gsqg.config import ConfigError, load_sweep_config, load_run_setup

__version__ = "0.1.0"

__all__ = [
    "SpectralField", "SnapshotMeta", "wavenumbers", "from_physical",
    "to_physical", "fractional_laplacian", "derivative", "riesz_perp",
    "sobolev_norm", "inner_product_hs", "lp_norm", "project_low",
    "project_high", "change_grid", "save_snapshot", "load_snapshot",
    "DealiasPolicy", "DEFAULT_DEALIAS", "ProbeFunction", "nonlinear_term",
    "cancellation_residuals", "weak_form_identity_gap",
    "DiagnosticSeries", "p_alpha", "lp_monotonicity_check",
    "SimParams", "ForcingSpec", "ZERO_FORCING", "ConstantProfile",
    "SinusoidProfile", "RampProfile", "ExpProfile", "BlowupError",
    "CflViolation", "run", "dissipation_factor",
    "rough_datum", "bump_datum", "modes_datum", "counterexample_datum",
    "from_recipe",
    "SweepConfig", "M_for_nu", "n_freq", "run_sweep", "run_scenario",
    "scenario_config", "counterexample_experiment",
    "global_existence_experiment", "write_report", "SCENARIO_NAMES",
    "ConfigError", "load_sweep_config", "load_run_setup",
]
