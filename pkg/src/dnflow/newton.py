"""Damped Newton iteration on a convex objective with tridiagonal Hessian.

Both the transient step and the stationary problem minimize a strictly
convex functional whose gradient is the assembled residual and whose Hessian
is tridiagonal, symmetric and strictly diagonally dominant.  Newton
directions therefore always descend, and backtracking gives global
convergence.

Two floating point realities shape the implementation.  First, near the
minimizer the objective differences fall below the rounding resolution of
the objective itself, so the Armijo test degenerates into noise; progress is
then measured on the residual norm instead.  Second, a solve that stops just
under the tolerance leaves a residual that downstream entropy checks can
see, so after reaching the tolerance the iteration keeps polishing toward a
hundredth of it for as long as the residual keeps dropping (flux values move
on a lattice of spacing mu'(s) * ulp; progress ends at that floor).
"""

import numpy as np
from dataclasses import dataclass
from scipy.linalg import solve_banded

from .constitutive import DomainError


class NonconvergenceError(RuntimeError):
    """Newton iteration failed; carries the last iterate and residual norm."""

    def __init__(self, message, state=None, residual_norm=None, iterations=None):
        super().__init__(message)
        self.state = state
        self.residual_norm = residual_norm
        self.iterations = iterations


@dataclass
class Tridiagonal:
    """Tridiagonal matrix stored as bands: lower/upper of length n-1, diag n."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    @property
    def n(self):
        return len(self.diag)

    def solve(self, rhs):
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.upper
        ab[1] = self.diag
        ab[2, :-1] = self.lower
        return solve_banded((1, 1), ab, rhs)

    def to_dense(self):
        return (
            np.diag(self.diag)
            + np.diag(self.lower, -1)
            + np.diag(self.upper, 1)
        )

    def copy(self):
        return Tridiagonal(self.lower.copy(), self.diag.copy(), self.upper.copy())


def _line_search(x, delta, norm, obj0, slope, residual_fn, objective_fn,
                 armijo_c, max_halvings, use_armijo):
    """Pick a step length; returns (residual_norm, state, residual) or None.

    Among the step lengths passing the Armijo test, the one with the
    smallest residual norm wins.  Accepting the first pass can zigzag for
    dozens of iterations around cells whose slope changes sign (mu' is
    singular there for p < 2); the residual norm exposes the overshoot that
    the objective barely registers.  Without a usable Armijo test (or when
    no step passes it) a plain residual decrease is accepted.
    """
    best = None
    if use_armijo:
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * delta
            try:
                obj_t = objective_fn(trial)
            except DomainError:
                lam *= 0.5
                continue
            if obj_t <= obj0 + armijo_c * lam * slope:
                r_t = residual_fn(trial)
                n_t = float(np.max(np.abs(r_t)))
                if best is None or n_t < best[0]:
                    best = (n_t, trial, r_t)
                    if n_t <= 0.25 * norm:
                        break
                else:
                    break  # residual rising again as the step shrinks
            lam *= 0.5
    if best is None:
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * delta
            try:
                r_t = residual_fn(trial)
            except DomainError:
                lam *= 0.5
                continue
            n_t = float(np.max(np.abs(r_t)))
            if n_t < norm:
                best = (n_t, trial, r_t)
                break
            lam *= 0.5
    return best


def damped_newton(
    x0,
    residual_fn,
    jacobian_fn,
    objective_fn,
    *,
    tol,
    max_iter=50,
    armijo_c=1e-4,
    max_halvings=40,
    trace=None,
):
    """Minimize via Newton steps until the residual max norm drops to tol.

    Having met ``tol``, the iteration keeps going toward ``tol / 100`` while
    each step still improves the norm by at least 10 percent, so accepted
    states do not linger just below the tolerance.  ``trace``, if given,
    collects a copy of every accepted iterate.

    Returns ``(x, iterations, residual_norm, objective_value)``.
    """
    target = 0.01 * tol
    x = np.array(x0, dtype=float, copy=True)
    r = residual_fn(x)
    norm = float(np.max(np.abs(r)))
    iterations = 0
    best_x, best_norm = x, norm  # an Armijo step may raise the norm
    for _ in range(max_iter):
        if norm <= target:
            return x, iterations, norm, objective_fn(x)
        jac = jacobian_fn(x)
        delta = jac.solve(-r)
        slope = float(np.dot(r, delta))  # gradient . direction, < 0 for SPD J
        obj0 = objective_fn(x)
        # predicted decrease below the objective's rounding floor means the
        # Armijo comparison is pure noise
        noise = 4096.0 * np.finfo(float).eps * max(abs(obj0), 1.0)
        step = _line_search(x, delta, norm, obj0, slope, residual_fn,
                            objective_fn, armijo_c, max_halvings,
                            use_armijo=-slope > noise)
        if step is None:
            if norm <= tol:
                return x, iterations, norm, obj0
            raise NonconvergenceError(
                f"line search stalled at residual norm {norm:.3e} after "
                f"{iterations} Newton iterations (for p < 2, nearly flat or "
                f"sign-changing slopes can put the floating point floor of "
                f"the flux above the tolerance; a coarser grid or a larger "
                f"newton_tol may be needed)",
                state=x, residual_norm=norm, iterations=iterations,
            )
        prev_norm = norm
        norm, x, r = step
        iterations += 1
        if trace is not None:
            trace.append(x.copy())
        if norm < best_norm:
            best_x, best_norm = x, norm
        if tol >= norm > 0.9 * prev_norm:
            # below tolerance and progress has flattened: the lattice floor
            return x, iterations, norm, objective_fn(x)

    if best_norm <= tol:
        return best_x, iterations, best_norm, objective_fn(best_x)
    raise NonconvergenceError(
        f"no convergence to {tol:.1e} within {max_iter} iterations "
        f"(residual norm {norm:.3e})",
        state=x, residual_norm=norm, iterations=iterations,
    )
