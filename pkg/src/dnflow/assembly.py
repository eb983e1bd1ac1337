"""Spatial assembly of the nonlinear gradient flux on nodal hat functions.

The gradient of a nodal vector is piecewise constant, so the flux
mu(grad u) is a single number per cell.  Tested against the hat function of
node i, the flux term integrates to

    mu(s_{i-1}) - mu(s_i)        for interior nodes,
    -mu(s_0)                     at the left end,
    +mu(s_{N-1})                 at the right end,

with cell slopes s_j.  These helpers are shared by the transient stepper and
the stationary solver.
"""

import numpy as np

from .grid import Grid


def flux_vector(grid: Grid, model, u):
    """Flux term of the residual, one entry per node."""
    f = model.mu(grid.piecewise_gradient(u))
    out = np.zeros(grid.cells + 1)
    out[1:] += f
    out[:-1] -= f
    return out


def flux_energy(grid: Grid, model, u):
    """Integral of M(grad u); exact since the gradient is cellwise constant."""
    return grid.h * float(np.sum(model.M(grid.piecewise_gradient(u))))


def flux_stiffness_bands(grid: Grid, model, u, eps_reg):
    """Bands of the flux Jacobian, with the slope floored at eps_reg in mu'.

    mu' is even, so the floor acts on |s|.  With ``eps_reg = 0`` the bands are
    the exact tangent; a zero slope then raises for p < 2.
    """
    s = np.abs(grid.piecewise_gradient(u))
    if eps_reg > 0:
        s = np.maximum(s, eps_reg)
    g = model.mu_prime(s) / grid.h
    diag = np.zeros(grid.cells + 1)
    diag[:-1] += g
    diag[1:] += g
    off = -g
    return off, diag, off.copy()
