"""Nonlinearity families for the doubly nonlinear diffusion model.

The evolution couples two strictly monotone scalar functions: ``beta`` acts
inside the time derivative and the gradient flux is ``mu(s) = |s|^(p-2) s``
with exponent ``1 < p <= 2``.  Two beta families ship built in:

* ``PowerBeta(kappa, gamma)``: ``beta(u) = kappa * u**(1/gamma)`` on ``u > 0``.
  The friction-dominated gas-pipe case is ``gamma = 2``, ``p = 3/2``, where
  ``beta(u)`` plays the role of the density.
* ``LinearBeta``: ``beta(u) = u`` (heat equation when combined with ``p = 2``).

Each family also provides every derived scalar function the solver and the
diagnostics need: the primitive ``B`` with ``B' = beta``, the inverse
``beta^{-1}``, and the entropy density ``eta`` with ``eta' = beta^{-1}``.
The flux side contributes ``M`` with ``M' = mu`` and the derivative ``mu'``.

All functions accept floats or numpy arrays.  Evaluation at a singular point
raises :class:`DomainError` instead of returning NaN; any regularization is
an explicit choice of the caller.  New beta families can be added by
subclassing :class:`BetaLaw`.
"""

import numpy as np
from abc import ABC, abstractmethod
from dataclasses import dataclass


class DomainError(ValueError):
    """A nonlinearity was evaluated outside its domain (singular point)."""


# Gauss-Legendre rule on [0, 1], used for the Bregman integral of eta when no
# closed form is available.
_GL_T, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def _stable_pow(x, e):
    """x**e with direct arithmetic for the exponents of the built-in models.

    Integer and half-integer powers are composed from sqrt and products so
    that e.g. mu(4) == 2.0 bitwise for p = 3/2; general exponents go through
    np.power.
    """
    if e == 0.0:
        return np.ones_like(x)
    if e == 0.5:
        return np.sqrt(x)
    if e == 1.0:
        return +x
    if e == 1.5:
        return x * np.sqrt(x)
    if e == 2.0:
        return x * x
    if e == 3.0:
        return x * x * x
    if e == -0.5:
        return 1.0 / np.sqrt(x)
    if e == -1.0:
        return 1.0 / x
    return np.power(x, e)


def _match(x_in, result):
    """Return a float for scalar input, the array otherwise."""
    return float(result) if np.ndim(x_in) == 0 else result


class BetaLaw(ABC):
    """State nonlinearity with primitive, inverse and entropy density.

    Subclasses must keep beta strictly increasing on the positive axis and
    eta strictly convex; ``ConstitutiveModel.validate`` spot-checks both.
    """

    @abstractmethod
    def beta(self, u):
        """beta(u)."""

    @abstractmethod
    def beta_prime(self, u):
        """d beta / du."""

    @abstractmethod
    def beta_inv(self, rho):
        """Inverse of beta."""

    @abstractmethod
    def primitive(self, u):
        """B(u), the antiderivative of beta with B(0) = 0."""

    @abstractmethod
    def eta(self, rho):
        """Entropy density, antiderivative of beta_inv with eta(0) = 0."""

    @abstractmethod
    def eta_second(self, rho):
        """Second derivative of eta."""

    def eta_prime(self, rho):
        """First derivative of eta; coincides with beta_inv."""
        return self.beta_inv(rho)

    def eta_bregman(self, rho, rho_hat):
        """eta(rho) - eta(rho_hat) - eta'(rho_hat) (rho - rho_hat), pointwise.

        Evaluated through the integral remainder
        (rho - rho_hat)^2 * int_0^1 (1-t) eta''(rho_hat + t (rho-rho_hat)) dt
        so that nearly identical arguments do not cancel catastrophically.
        Subclasses may override with a closed form.
        """
        r = np.asarray(rho, float)
        rh = np.asarray(rho_hat, float)
        d = r - rh
        sigma = rh[..., None] + _GL_T * d[..., None]
        kernel = (1.0 - _GL_T) * self.eta_second(sigma)
        out = d * d * (kernel @ _GL_W)
        return _match(rho, out)


@dataclass(frozen=True)
class PowerBeta(BetaLaw):
    """beta(u) = kappa * u**(1/gamma) for u > 0, with kappa > 0, gamma >= 1."""

    kappa: float = 1.0
    gamma: float = 2.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.gamma >= 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")

    def _require_positive(self, u, what):
        if np.any(u <= 0):
            raise DomainError(f"{what} of the power family requires a positive argument")

    def _require_nonnegative(self, rho, what):
        if np.any(rho < 0):
            raise DomainError(f"{what} of the power family requires a nonnegative argument")

    def beta(self, u):
        a = np.asarray(u, float)
        self._require_positive(a, "beta")
        return _match(u, self.kappa * _stable_pow(a, 1.0 / self.gamma))

    def beta_prime(self, u):
        a = np.asarray(u, float)
        self._require_positive(a, "beta'")
        return _match(u, (self.kappa / self.gamma) * _stable_pow(a, 1.0 / self.gamma - 1.0))

    def beta_inv(self, rho):
        a = np.asarray(rho, float)
        self._require_nonnegative(a, "beta^{-1}")
        return _match(rho, _stable_pow(a / self.kappa, self.gamma))

    def primitive(self, u):
        a = np.asarray(u, float)
        self._require_positive(a, "B")
        e = 1.0 + 1.0 / self.gamma
        return _match(u, self.kappa * _stable_pow(a, e) / e)

    def eta(self, rho):
        a = np.asarray(rho, float)
        self._require_nonnegative(a, "eta")
        g = self.gamma
        return _match(rho, _stable_pow(a, g + 1.0) / ((g + 1.0) * self.kappa**g))

    def eta_second(self, rho):
        a = np.asarray(rho, float)
        self._require_nonnegative(a, "eta''")
        g = self.gamma
        return _match(rho, g * _stable_pow(a, g - 1.0) / self.kappa**g)

    def eta_bregman(self, rho, rho_hat):
        g = self.gamma
        if g == round(g) and g <= 64:
            # integer gamma: rho^{g+1} - rhat^{g+1} - (g+1) rhat^g (rho-rhat)
            # factors as (rho-rhat)^2 sum_{j} (j+1) rhat^j rho^{g-1-j}
            r = np.asarray(rho, float)
            rh = np.asarray(rho_hat, float)
            d = r - rh
            acc = np.zeros(np.broadcast(r, rh).shape)
            for j in range(int(g)):
                acc += (j + 1) * _stable_pow(rh, float(j)) * _stable_pow(r, g - 1.0 - j)
            out = d * d * acc / ((g + 1.0) * self.kappa**g)
            return _match(rho, out)
        return super().eta_bregman(rho, rho_hat)


@dataclass(frozen=True)
class LinearBeta(BetaLaw):
    """beta(u) = u; entropy density is rho^2 / 2."""

    def beta(self, u):
        return _match(u, +np.asarray(u, float))

    def beta_prime(self, u):
        return _match(u, np.ones_like(np.asarray(u, float)))

    def beta_inv(self, rho):
        return _match(rho, +np.asarray(rho, float))

    def primitive(self, u):
        a = np.asarray(u, float)
        return _match(u, 0.5 * a * a)

    def eta(self, rho):
        a = np.asarray(rho, float)
        return _match(rho, 0.5 * a * a)

    def eta_second(self, rho):
        return _match(rho, np.ones_like(np.asarray(rho, float)))

    def eta_bregman(self, rho, rho_hat):
        d = np.asarray(rho, float) - np.asarray(rho_hat, float)
        return _match(rho, 0.5 * d * d)


@dataclass(frozen=True)
class ConstitutiveModel:
    """A (beta, mu) pair together with the admissible data range.

    ``mu(s) = |s|**(p-2) * s`` with ``1 < p <= 2``; the state nonlinearity is
    delegated to ``beta_law``.  ``u_min``/``u_max`` bound the admissible
    initial and boundary data, ``0 < u_min <= u_max``.
    """

    beta_law: BetaLaw
    p: float
    u_min: float
    u_max: float

    def __post_init__(self):
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"flux exponent p must lie in (1, 2], got {self.p}")
        if not 0.0 < self.u_min <= self.u_max:
            raise ValueError(
                f"data range must satisfy 0 < u_min <= u_max, got [{self.u_min}, {self.u_max}]"
            )

    # -- flux nonlinearity ------------------------------------------------

    def mu(self, s):
        """mu(s) = |s|^(p-2) s; odd, mu(0) = 0 exactly."""
        a = np.asarray(s, float)
        return _match(s, np.sign(a) * _stable_pow(np.abs(a), self.p - 1.0))

    def mu_prime(self, s):
        """mu'(s) = (p-1) |s|^(p-2), singular at 0 for p < 2."""
        a = np.asarray(s, float)
        if self.p < 2.0 and np.any(a == 0.0):
            raise DomainError("mu' is singular at zero slope for p < 2")
        return _match(s, (self.p - 1.0) * _stable_pow(np.abs(a), self.p - 2.0))

    def M(self, s):
        """Antiderivative of mu: M(s) = |s|^p / p."""
        a = np.abs(np.asarray(s, float))
        return _match(s, _stable_pow(a, self.p) / self.p)

    # -- state nonlinearity (delegated) -----------------------------------

    def beta(self, u):
        return self.beta_law.beta(u)

    def beta_prime(self, u):
        return self.beta_law.beta_prime(u)

    def beta_inv(self, rho):
        return self.beta_law.beta_inv(rho)

    def B(self, u):
        return self.beta_law.primitive(u)

    def eta(self, rho):
        return self.beta_law.eta(rho)

    def eta_prime(self, rho):
        return self.beta_law.eta_prime(rho)

    def eta_second(self, rho):
        return self.beta_law.eta_second(rho)

    def eta_bregman(self, rho, rho_hat):
        return self.beta_law.eta_bregman(rho, rho_hat)

    # -- helpers -----------------------------------------------------------

    def rho_bounds(self):
        """Range of beta over the admissible data interval."""
        return self.beta(self.u_min), self.beta(self.u_max)

    def admissible(self, values, slack=0.0):
        """True when all values lie in [u_min - slack, u_max + slack]."""
        v = np.asarray(values, float)
        return bool(np.all(v >= self.u_min - slack) and np.all(v <= self.u_max + slack))

    def validate(self, samples=33, fd_step=1e-5):
        """Spot-check monotonicity, convexity and the primitive relations.

        Raises ValueError listing all violations; returns None when clean.
        """
        problems = []
        us = np.linspace(self.u_min, self.u_max, samples)
        bs = self.beta(us)
        if not np.all(np.diff(bs) > 0):
            problems.append("beta is not strictly increasing on the data range")
        rr = self.beta_inv(bs)
        if not np.allclose(rr, us, rtol=1e-12, atol=0.0):
            problems.append("beta_inv does not invert beta to 1e-12 relative")

        ss = np.linspace(0.25, 4.0, 9)
        if self.mu(0.0) != 0.0:
            problems.append("mu(0) is not exactly zero")
        if np.any(self.mu(-ss) != -self.mu(ss)):
            problems.append("mu is not odd bitwise")
        if not np.all(np.diff(self.mu(np.concatenate([-ss[::-1], [0.0], ss]))) > 0):
            problems.append("mu is not strictly increasing")

        # central differences of the primitives against the densities
        d = fd_step
        for u in us[1:-1:8]:
            if abs((self.B(u + d) - self.B(u - d)) / (2 * d) - self.beta(u)) > 1e-6:
                problems.append(f"B' != beta near u={u:g}")
                break
        for s in ss:
            if abs((self.M(s + d) - self.M(s - d)) / (2 * d) - self.mu(s)) > 1e-6:
                problems.append(f"M' != mu near s={s:g}")
                break
        lo, hi = self.rho_bounds()
        for r in np.linspace(lo, hi, 5):
            if abs((self.eta(r + d) - self.eta(max(r - d, 0.0))) / (d + min(d, r)) - self.eta_prime(r)) > 1e-5:
                problems.append(f"eta' != beta_inv near rho={r:g}")
                break
        mids = 0.5 * (np.linspace(lo, hi, 9)[:-1] + np.linspace(lo, hi, 9)[1:])
        if np.any(self.eta(mids) > 0.5 * (self.eta(np.linspace(lo, hi, 9)[:-1]) + self.eta(np.linspace(lo, hi, 9)[1:])) + 1e-14):
            problems.append("eta fails the midpoint convexity test")

        if problems:
            raise ValueError("invalid constitutive model: " + "; ".join(problems))


def gas_model(kappa=1.0, u_min=0.5, u_max=2.0):
    """Friction-dominated pipe-flow model: beta = kappa sqrt(u), p = 3/2."""
    return ConstitutiveModel(PowerBeta(kappa, 2.0), 1.5, u_min, u_max)


def linear_model(p=2.0, u_min=0.5, u_max=2.0):
    """Linear state nonlinearity; p = 2 gives the plain heat equation."""
    return ConstitutiveModel(LinearBeta(), p, u_min, u_max)
