"""Entropy-stable finite element solver for doubly nonlinear diffusion.

Solves d/dt beta(u) = d/dx mu(du/dx) on an interval with Robin boundary
conditions n mu(du/dx) + alpha u = alpha u_bnd, using mass-lumped P1 finite
elements and implicit Euler steps computed as minimizers of a strictly
convex objective.  The discretization preserves the data bounds, dissipates
the discrete entropy, converges exponentially to steady states and tracks
slowly varying quasi-steady states; all of these are measurable through the
diagnostics and experiment modules.
"""

from .constitutive import (ConstitutiveModel, DomainError, LinearBeta,
                           PowerBeta, gas_model, linear_model)
from .grid import Grid, NodalVector, boundary_pairing
from .newton import NonconvergenceError, Tridiagonal
from .stepper import (BoundarySchedule, ConstantSchedule, Scenario,
                      SinusoidSchedule, SolverOptions, StepResult,
                      StepSchedule, Trajectory, advance, jacobian,
                      newton_solve, objective, residual)
from .steady import (SteadyState, steady_analytic, steady_data_stability,
                     steady_discrete)
from .diagnostics import (DiagnosticsRecord, check_entropy_dissipation,
                          check_m_matrix, dissipation, dtau_energy_sum,
                          entropy_equivalence_constants, entropy_h,
                          fit_decay_rate, records_to_csv, relative_entropy)
from .experiments import (ExperimentReport, random_scenario, run_convergence,
                          run_relaxation, run_tracking, scenario_summary,
                          standard_checks)
from .config import (AdmissibilityError, Config, ConfigError,
                     MalformedConfigError, SchemaError, parse_config,
                     serialize_config)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "BoundarySchedule", "Config", "ConfigError",
    "ConstantSchedule", "ConstitutiveModel", "DiagnosticsRecord",
    "DomainError", "ExperimentReport", "Grid", "LinearBeta",
    "MalformedConfigError", "NodalVector", "NonconvergenceError",
    "PowerBeta", "Scenario", "SchemaError", "SinusoidSchedule",
    "SolverOptions", "StepResult", "StepSchedule", "SteadyState",
    "Trajectory", "Tridiagonal", "advance", "boundary_pairing",
    "check_entropy_dissipation", "check_m_matrix", "dissipation",
    "dtau_energy_sum", "entropy_equivalence_constants", "entropy_h",
    "fit_decay_rate", "gas_model", "jacobian", "linear_model",
    "newton_solve", "objective", "parse_config", "random_scenario",
    "records_to_csv", "relative_entropy", "residual", "run_convergence",
    "run_relaxation", "run_tracking", "scenario_summary",
    "serialize_config", "standard_checks", "steady_analytic",
    "steady_data_stability", "steady_discrete",
]
