"""Stationary states: closed-form scalar reduction and full discrete solve.

The stationary problem forces mu(du/dx) to be constant, so steady states are
affine, u(x) = u_left + s * x, with the slope fixed by the two Robin
conditions

    -mu(s) + alpha * u_left           = alpha * u_a      (left end)
     mu(s) + alpha * (u_left + s * l) = alpha * u_b      (right end).

Subtracting eliminates u_left and leaves the strictly increasing scalar
equation  2 mu(s) + alpha * l * s = alpha * (u_b - u_a),  whose unique root
gives the analytic solution.  :func:`steady_discrete` instead solves the full
nodal variational problem by damped Newton; the two routes must agree, which
makes the analytic form an independent oracle for the discrete solver.
"""

from dataclasses import dataclass

from scipy.optimize import brentq

from .assembly import flux_energy, flux_stiffness_bands, flux_vector
from .constitutive import ConstitutiveModel
from .grid import Grid, NodalVector
from .newton import Tridiagonal, damped_newton


@dataclass
class SteadyState:
    """Affine steady solution: value at x = 0, constant slope, nodal samples."""

    u_left: float
    slope: float
    nodal: NodalVector | None = None

    def sample(self, grid: Grid):
        return self.u_left + self.slope * grid.nodes

    def value(self, x):
        return self.u_left + self.slope * x


def _check_admissible(model, *values):
    for v in values:
        if not model.u_min <= v <= model.u_max:
            raise ValueError(
                f"boundary value {v:g} outside the admissible range "
                f"[{model.u_min}, {model.u_max}]"
            )


def steady_analytic(model: ConstitutiveModel, alpha, length, ua, ub,
                    grid: Grid | None = None) -> SteadyState:
    """Steady state from the scalar slope equation, solved to ~1e-15.

    The root is bracketed by 0 and (ub - ua) / length (the residual changes
    sign between them because mu is odd and increasing), and Brent's method
    keeps that bracket while converging superlinearly, which stays robust
    where mu' is singular at zero slope.
    """
    _check_admissible(model, ua, ub)
    if not (alpha > 0 and length > 0):
        raise ValueError("alpha and length must be positive")
    gap = ub - ua
    if gap == 0.0:
        slope = 0.0
    else:
        def f(s):
            return 2.0 * model.mu(s) + alpha * length * s - alpha * gap

        lo, hi = min(0.0, gap / length), max(0.0, gap / length)
        slope = float(brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))
    u_left = ua + model.mu(slope) / alpha
    nodal = None if grid is None else u_left + slope * grid.nodes
    return SteadyState(u_left, slope, nodal)


def steady_discrete(grid: Grid, model: ConstitutiveModel, alpha, ua, ub,
                    tol=1e-12, eps_reg=1e-8, max_iter=50) -> SteadyState:
    """Solve the nodal stationary problem by damped Newton.

    Minimizes <M(dw/dx), 1> + alpha <w^2/2 - u_bnd w, 1>_bnd starting from the
    straight line between the data; the result is affine up to solver
    tolerance.
    """
    _check_admissible(model, ua, ub)
    if not alpha > 0:
        raise ValueError("alpha must be positive")

    def res(u):
        out = flux_vector(grid, model, u)
        out[0] += alpha * (u[0] - ua)
        out[-1] += alpha * (u[-1] - ub)
        return out

    def jac(u):
        lower, diag, upper = flux_stiffness_bands(grid, model, u, eps_reg)
        diag[0] += alpha
        diag[-1] += alpha
        return Tridiagonal(lower, diag, upper)

    def obj(u):
        return flux_energy(grid, model, u) + alpha * (
            0.5 * u[0] * u[0] - ua * u[0] + 0.5 * u[-1] * u[-1] - ub * u[-1]
        )

    x0 = ua + (ub - ua) / grid.length * grid.nodes
    x, _, _, _ = damped_newton(x0, res, jac, obj, tol=tol, max_iter=max_iter)
    slope = float((x[-1] - x[0]) / grid.length)
    return SteadyState(float(x[0]), slope, x)


def steady_data_stability(model: ConstitutiveModel, alpha, length, grid: Grid,
                          data_a, data_b):
    """Gaps between the steady states of two boundary data pairs.

    Returns ``(boundary_gap_sq, domain_gap_sq)``, i.e. the squared endpoint
    distance and the squared exact L2 distance of the two affine solutions.
    They satisfy  boundary_gap_sq <= |data_a - data_b|_bnd^2  and
    domain_gap_sq <= (2/3) * length * |data_a - data_b|_bnd^2.
    """
    ha = steady_analytic(model, alpha, length, *data_a)
    hb = steady_analytic(model, alpha, length, *data_b)
    va, vb = ha.sample(grid), hb.sample(grid)
    d = va - vb
    boundary_gap = float(d[0] * d[0] + d[-1] * d[-1])
    domain_gap = grid.exact_l2_inner(d, d)
    return boundary_gap, domain_gap
