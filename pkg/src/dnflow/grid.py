"""Uniform 1D mesh with lumped (trapezoidal) quadrature.

States are continuous piecewise linear functions represented by their nodal
values, plain numpy arrays of length ``cells + 1``.  The lumped inner product
integrates the nodal interpolant of the product (trapezoidal rule); it is
equivalent to the exact L2 product on the discrete space:

    exact <= lumped <= 3 * exact,

with the upper bound attained by the alternating vector (1, -1, 1, ...).
Gradients of nodal vectors are piecewise constant and kept per cell.
"""

import numpy as np
from dataclasses import dataclass
from functools import cached_property

# Nodal vectors are bare numpy arrays; the alias only documents intent.
NodalVector = np.ndarray


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of (0, length) with ``cells`` cells, nodes x_i = i*h."""

    length: float
    cells: int

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if not (isinstance(self.cells, (int, np.integer)) and self.cells >= 1):
            raise ValueError(f"cells must be an integer >= 1, got {self.cells}")

    @property
    def h(self):
        return self.length / self.cells

    @property
    def n_nodes(self):
        return self.cells + 1

    @cached_property
    def nodes(self):
        return np.linspace(0.0, self.length, self.cells + 1)

    @cached_property
    def weights(self):
        """Lumped quadrature weights: h/2 at the ends, h inside."""
        w = np.full(self.cells + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def check_conforming(self, *vectors):
        for v in vectors:
            if np.shape(v) != (self.cells + 1,):
                raise ValueError(
                    f"nodal vector of shape {np.shape(v)} does not conform to a "
                    f"grid with {self.cells + 1} nodes"
                )

    def lumped_inner(self, a, b):
        """<a, b>_h = sum_i w_i a_i b_i."""
        self.check_conforming(a, b)
        return float(np.dot(self.weights, np.asarray(a) * np.asarray(b)))

    def exact_l2_inner(self, a, b):
        """Exact integral of a*b for piecewise linear a, b."""
        self.check_conforming(a, b)
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        al, ar = a[:-1], a[1:]
        bl, br = b[:-1], b[1:]
        return float(self.h / 6.0 * np.sum(2 * al * bl + al * br + ar * bl + 2 * ar * br))

    def piecewise_gradient(self, u):
        """Cell slopes (u_{j+1} - u_j) / h, an array of length ``cells``."""
        self.check_conforming(u)
        return np.diff(np.asarray(u, float)) / self.h


def boundary_pairing(f, g):
    """<f, g>_boundary = f_0 g_0 + f_N g_N."""
    return float(f[0] * g[0] + f[-1] * g[-1])
