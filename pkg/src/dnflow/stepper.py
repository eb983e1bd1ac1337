"""Implicit Euler time stepping for d/dt beta(u) = d/dx mu(du/dx).

One time step solves the variational problem

    <(beta(u) - beta(u_prev)) / tau, v>_h + <mu(du/dx), dv/dx>
        + alpha <u, v>_bnd = alpha <u_bnd(t_k), v>_bnd     for all nodal v,

which is the first-order condition of the strictly convex objective

    L(w) = <B(w) - beta(u_prev) w, 1>_h / tau + <M(dw/dx), 1>
         + alpha <w^2/2 - u_bnd(t_k) w, 1>_bnd.

The residual returned by :func:`residual` is exactly the gradient of
:func:`objective` with respect to the nodal values, and :func:`jacobian`
assembles its tridiagonal derivative.  The Jacobian is an M-matrix (positive
diagonal, nonpositive off-diagonals, nonnegative row sums), which is what
makes the scheme preserve the data bounds.

For p < 2 the flux derivative mu' blows up at zero slope; the Jacobian floors
slopes at ``eps_reg`` inside mu' only, so the residual, and with it the fixed
point of the iteration, stays exact.
"""

import math
import numpy as np
from abc import ABC, abstractmethod
from dataclasses import dataclass

from . import diagnostics
from .assembly import flux_energy, flux_stiffness_bands, flux_vector
from .constitutive import ConstitutiveModel, DomainError
from .grid import Grid, NodalVector
from .newton import NonconvergenceError, Tridiagonal, damped_newton


# ---------------------------------------------------------------------------
# boundary data schedules
# ---------------------------------------------------------------------------

class BoundarySchedule(ABC):
    """Time-dependent Dirichlet data (left, right) entering the Robin terms."""

    @abstractmethod
    def value(self, t):
        """Boundary data (left, right) at time t."""

    def derivative(self, t):
        """Time derivative of the data; only differentiable schedules have one."""
        raise NotImplementedError(f"{type(self).__name__} has no time derivative")

    @abstractmethod
    def bounds(self, horizon):
        """(lo, hi) enclosing all values taken on [0, horizon]."""


@dataclass(frozen=True)
class ConstantSchedule(BoundarySchedule):
    left: float
    right: float

    def value(self, t):
        return self.left, self.right

    def derivative(self, t):
        return 0.0, 0.0

    def bounds(self, horizon):
        return min(self.left, self.right), max(self.left, self.right)


@dataclass(frozen=True)
class StepSchedule(BoundarySchedule):
    """Data (left, right) switching from ``before`` to ``after`` at ``switch_time``."""

    before: tuple
    after: tuple
    switch_time: float

    def value(self, t):
        return tuple(self.before) if t < self.switch_time else tuple(self.after)

    def bounds(self, horizon):
        vals = [*self.before, *self.after] if self.switch_time <= horizon else [*self.before]
        return min(vals), max(vals)


@dataclass(frozen=True)
class SinusoidSchedule(BoundarySchedule):
    """Each endpoint follows base + amplitude * sin(omega * t)."""

    left_base: float
    right_base: float
    left_amplitude: float = 0.0
    right_amplitude: float = 0.0
    left_omega: float = 0.0
    right_omega: float = 0.0

    def value(self, t):
        return (
            self.left_base + self.left_amplitude * math.sin(self.left_omega * t),
            self.right_base + self.right_amplitude * math.sin(self.right_omega * t),
        )

    def derivative(self, t):
        return (
            self.left_amplitude * self.left_omega * math.cos(self.left_omega * t),
            self.right_amplitude * self.right_omega * math.cos(self.right_omega * t),
        )

    def bounds(self, horizon):
        lo = min(self.left_base - abs(self.left_amplitude), self.right_base - abs(self.right_amplitude))
        hi = max(self.left_base + abs(self.left_amplitude), self.right_base + abs(self.right_amplitude))
        return lo, hi


# ---------------------------------------------------------------------------
# scenario and solver configuration
# ---------------------------------------------------------------------------

@dataclass
class SolverOptions:
    """Newton solve parameters; defaults match the documented configuration."""

    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    eps_reg: float = 1e-8
    armijo_c: float = 1e-4
    max_halvings: int = 40
    keep_iterates: bool = False


@dataclass
class Scenario:
    """A complete transient problem: geometry, model, data and time grid."""

    grid: Grid
    model: ConstitutiveModel
    alpha: float
    horizon: float
    tau: float
    u0: NodalVector
    schedule: BoundarySchedule

    def __post_init__(self):
        self.u0 = np.asarray(self.u0, float)
        self.grid.check_conforming(self.u0)
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tau > 0:
            raise ValueError(f"time step must be positive, got {self.tau}")
        if not self.horizon >= self.tau:
            raise ValueError("horizon must cover at least one time step")
        m = self.model
        if not m.admissible(self.u0):
            raise ValueError(
                f"initial data must lie in [{m.u_min}, {m.u_max}]; "
                f"found range [{self.u0.min():g}, {self.u0.max():g}]"
            )
        lo, hi = self.schedule.bounds(self.horizon)
        if lo < m.u_min or hi > m.u_max:
            raise ValueError(
                f"boundary data range [{lo:g}, {hi:g}] leaves the admissible "
                f"interval [{m.u_min}, {m.u_max}]"
            )

    @property
    def n_steps(self):
        return int(math.floor(self.horizon / self.tau + 1e-9))

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.tau


@dataclass
class StepResult:
    """Outcome of a single implicit step."""

    state: NodalVector
    newton_iterations: int
    final_residual_norm: float
    objective_value: float
    iterates: list | None = None


@dataclass
class Trajectory:
    """Sequence of states u^k on the uniform time grid with per-step records."""

    times: np.ndarray
    states: np.ndarray  # shape (n_steps + 1, n_nodes), states[0] = u0
    diagnostics: list
    iterates: list | None = None  # per step: accepted Newton iterates

    @property
    def final_state(self):
        return self.states[-1]


# ---------------------------------------------------------------------------
# residual, objective, Jacobian of one implicit step
# ---------------------------------------------------------------------------

def _require_positive_states(*vectors):
    for v in vectors:
        if np.any(np.asarray(v) <= 0.0):
            raise DomainError("nodal states must be strictly positive")


def residual(scenario: Scenario, u, u_prev, t_k):
    """Gradient of the step objective at u; zero iff u solves the step."""
    grid = scenario.grid
    grid.check_conforming(u, u_prev)
    _require_positive_states(u, u_prev)
    u = np.asarray(u, float)
    model = scenario.model
    out = grid.weights / scenario.tau * (model.beta(u) - model.beta(np.asarray(u_prev, float)))
    out += flux_vector(grid, model, u)
    ua, ub = scenario.schedule.value(t_k)
    out[0] += scenario.alpha * (u[0] - ua)
    out[-1] += scenario.alpha * (u[-1] - ub)
    return out


def objective(scenario: Scenario, w, u_prev, t_k):
    """Convex step objective L(w); its nodal gradient equals residual(...)."""
    grid = scenario.grid
    grid.check_conforming(w, u_prev)
    _require_positive_states(w, u_prev)
    w = np.asarray(w, float)
    model = scenario.model
    beta_prev = model.beta(np.asarray(u_prev, float))
    time_part = float(np.dot(grid.weights, model.B(w) - beta_prev * w)) / scenario.tau
    ua, ub = scenario.schedule.value(t_k)
    bnd_part = scenario.alpha * (
        0.5 * w[0] * w[0] - ua * w[0] + 0.5 * w[-1] * w[-1] - ub * w[-1]
    )
    return time_part + flux_energy(grid, model, w) + bnd_part


def jacobian(scenario: Scenario, u, t_k, eps_reg=1e-8):
    """Tridiagonal derivative of the residual at u.

    ``t_k`` does not enter (the boundary terms contribute the constant alpha)
    but is kept for signature symmetry with :func:`residual`.
    """
    grid = scenario.grid
    grid.check_conforming(u)
    _require_positive_states(u)
    u = np.asarray(u, float)
    lower, diag, upper = flux_stiffness_bands(grid, scenario.model, u, eps_reg)
    diag += grid.weights / scenario.tau * scenario.model.beta_prime(u)
    diag[0] += scenario.alpha
    diag[-1] += scenario.alpha
    return Tridiagonal(lower, diag, upper)


# ---------------------------------------------------------------------------
# Newton solve and time marching
# ---------------------------------------------------------------------------

def newton_solve(scenario: Scenario, u_prev, t_k, opts: SolverOptions | None = None,
                 initial_guess=None) -> StepResult:
    """Solve one implicit step by damped Newton, warm started at u_prev."""
    opts = opts or SolverOptions()
    u_prev = np.asarray(u_prev, float)
    x0 = u_prev if initial_guess is None else np.asarray(initial_guess, float)
    trace = [] if opts.keep_iterates else None
    x, iters, norm, obj = damped_newton(
        x0,
        lambda u: residual(scenario, u, u_prev, t_k),
        lambda u: jacobian(scenario, u, t_k, opts.eps_reg),
        lambda u: objective(scenario, u, u_prev, t_k),
        tol=opts.newton_tol,
        max_iter=opts.newton_max_iter,
        armijo_c=opts.armijo_c,
        max_halvings=opts.max_halvings,
        trace=trace,
    )
    return StepResult(x, iters, norm, obj, trace)


def advance(scenario: Scenario, opts: SolverOptions | None = None,
            reference=None) -> Trajectory:
    """March the scheme from u0 over t = tau, 2 tau, ..., n_steps * tau.

    ``reference``, if given, is a nodal vector against which the per-step
    relative entropy is recorded (NaN otherwise).  Raises
    :class:`NonconvergenceError` with the step index on solver failure.
    """
    opts = opts or SolverOptions()
    grid, model = scenario.grid, scenario.model
    n = scenario.n_steps
    states = np.empty((n + 1, grid.cells + 1))
    states[0] = scenario.u0
    records = []
    iterates = [] if opts.keep_iterates else None

    u = states[0]
    for k in range(1, n + 1):
        t_k = k * scenario.tau
        try:
            step = newton_solve(scenario, u, t_k, opts)
        except NonconvergenceError as err:
            raise NonconvergenceError(
                f"time step {k} (t = {t_k:g}) failed: {err}",
                state=err.state,
                residual_norm=err.residual_norm,
                iterations=err.iterations,
            ) from err
        u_new = step.state
        diff = (u_new - u) / scenario.tau
        ua, ub = scenario.schedule.value(t_k)
        records.append(diagnostics.DiagnosticsRecord(
            time=t_k,
            entropy=diagnostics.entropy_h(grid, model, u_new),
            dissipation=diagnostics.dissipation(grid, model, scenario.alpha, u_new),
            rel_entropy=(diagnostics.relative_entropy(grid, model, u_new, reference)
                         if reference is not None else float("nan")),
            min_u=float(u_new.min()),
            max_u=float(u_new.max()),
            dtau_l2_sq=grid.exact_l2_inner(diff, diff),
            boundary_mismatch=(u_new[0] - ua) ** 2 + (u_new[-1] - ub) ** 2,
            newton_iterations=step.newton_iterations,
        ))
        if iterates is not None:
            iterates.append(step.iterates)
        states[k] = u_new
        u = u_new

    return Trajectory(scenario.times, states, records, iterates)
