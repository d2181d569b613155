"""Iterates on the infeasible-start set, the path parameter and proximity.

A point ``(x, tau, y)`` is admissible when ``u = A x + z0/tau`` lies in
int D, ``tau > 0``, ``y`` lies in int D* and the dual equality
``A^T y = A^T y0 - (tau - 1) c`` holds.  The reference point is
``y0 = phi'(z0)`` with ``y_tau0 = -<y0, z0> - xi*theta``; with these,
``(0, 1, y0)`` is the central-path point for ``mu = 1``.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .barriers import DomainError, DualInfeasibleError

__all__ = [
    "Origin",
    "origin",
    "Iterate",
    "mu_of",
    "mu_quadratic_form",
    "proximity",
    "BarHessian",
    "bar_hessian",
    "beta_proximity",
    "gradient_residual",
    "support_estimate",
    "GapBounds",
    "duality_gap_bounds",
    "QddResiduals",
    "qdd_residuals",
]


@dataclass(frozen=True)
class Origin:
    """Starting data derived from ``z0`` and ``xi``."""

    y0: np.ndarray
    ytau0: float
    xi: float
    theta: float

    @property
    def xi_theta(self):
        return self.xi * self.theta


def origin(problem, xi=2.0):
    if not xi > 1:
        raise ValueError(f"xi must exceed 1, got {xi}")
    y0 = problem.barrier.gradient(problem.z0)
    theta = problem.barrier.theta
    ytau0 = -float(y0 @ problem.z0) - xi * theta
    y0.setflags(write=False)
    return Origin(y0, ytau0, float(xi), theta)


def mu_of(x, tau, y, problem, xi=2.0, org=None):
    """Path parameter, in the form that is linear in ``tau``."""
    org = org or origin(problem, xi)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Ax = problem.A @ x
    return -(y @ problem.z0 + tau * (org.ytau0 + problem.c @ x + org.y0 @ Ax)) / org.xi_theta


def mu_quadratic_form(x, tau, y, problem, xi=2.0, org=None):
    """Path parameter written through ``u``; agrees with :func:`mu_of` only
    when the dual equality holds."""
    org = org or origin(problem, xi)
    u = problem.A @ x + problem.z0 / tau
    return tau / org.xi_theta * (-org.ytau0 - tau * (problem.c @ x) - y @ u)


class Iterate:
    """Immutable point ``(x, tau, y)`` together with cached derived data.

    Attributes
    ----------
    u : ndarray
        ``A x + z0 / tau`` (None when ``tau <= 0``).
    mu : float
    omega : float
        Proximity to the central path; ``inf`` when ``u`` or ``tau*y/mu``
        leaves its domain.
    conj : ConjugateResult or None
        Conjugate solve at ``tau*y/mu``; its ``u_star`` warm-starts the
        next solve.
    """

    def __init__(self, problem, x, tau, y, org, warm=None):
        self.problem = problem
        self.org = org
        self.x = np.array(x, dtype=float).reshape(-1)
        self.tau = float(tau)
        self.y = np.array(y, dtype=float).reshape(-1)
        for a in (self.x, self.y):
            a.setflags(write=False)
        self.u = None
        self.mu = mu_of(self.x, self.tau, self.y, problem, org=org)
        self.conj = None
        self.omega = math.inf
        self.failure = None
        bar = problem.barrier
        if not self.tau > 0:
            self.failure = "tau is not positive"
            return
        self.u = problem.A @ self.x + problem.z0 / self.tau
        self.u.setflags(write=False)
        if not self.mu > 0:
            self.failure = "mu is not positive"
            return
        if not bar.contains(self.u):
            self.failure = "u is outside int D"
            return
        if not bar.dual_cone_contains(self.y):
            self.failure = "y is outside int D*"
            return
        try:
            self.conj = bar.conjugate(self.scaled_y, warm)
        except (DualInfeasibleError, DomainError) as exc:
            self.failure = f"conjugate failed: {exc}"
            return
        try:
            omega = bar.fenchel_gap(self.u, self.scaled_y, self.conj)
        except (DualInfeasibleError, DomainError) as exc:
            self.failure = f"proximity evaluation failed: {exc}"
            return
        # Omega >= 0 holds exactly; clip round-off from below
        self.omega = max(omega, 0.0)
        self.omega_raw = omega

    @property
    def valid(self):
        return self.failure is None

    @property
    def scaled_y(self):
        return (self.tau / self.mu) * self.y

    @property
    def xi(self):
        return self.org.xi

    @cached_property
    def grad(self):
        return self.problem.barrier.gradient(self.u)

    @cached_property
    def hess(self):
        return self.problem.barrier.hessian(self.u)

    @cached_property
    def hess_chol(self):
        return linalg.cho_factor(self.hess)

    @cached_property
    def hess_inv_grad(self):
        return linalg.cho_solve(self.hess_chol, self.grad)

    @cached_property
    def conj_hess(self):
        """``phi''(u*)``, the inverse of the conjugate Hessian at ``tau*y/mu``."""
        return self.problem.barrier.hessian(self.conj.u_star)

    def objective(self):
        return float(self.problem.c @ self.x)

    def with_values(self, x, tau, y):
        """New iterate warm-started from this one."""
        warm = self.conj.u_star if self.conj is not None else None
        return Iterate(self.problem, x, tau, y, self.org, warm)

    def __repr__(self):
        return f"Iterate(tau={self.tau:.6g}, mu={self.mu:.6g}, omega={self.omega:.3g})"


def proximity(it, problem=None):
    """``phi(u) + phi*(tau y/mu) - (tau/mu) <y, u>``."""
    if not it.valid:
        raise DualInfeasibleError(it.failure)
    return it.omega


def gradient_residual(it):
    """``|| tau y/mu - phi'(u) ||`` in the ``[phi''(u)]^{-1}`` norm."""
    r = it.scaled_y - it.grad
    return math.sqrt(max(r @ linalg.cho_solve(it.hess_chol, r), 0.0))


class BarHessian:
    """The augmented matrix ``[[H, h], [h^T, zeta]]`` at ``(u, tau)``.

    ``H = phi''(u)/tau^2``, ``h = -(phi''(u) u + phi'(u))/tau^2`` and
    ``zeta = (2<phi', u> + <u, phi'' u> + xi theta)/tau^2``.  Products and
    solves go through the Cholesky factor of ``phi''(u)``; :meth:`dense`
    assembles the matrix explicitly.
    """

    def __init__(self, u, tau, grad, hess, chol, xi_theta):
        self.u = u
        self.tau = tau
        self.grad = grad
        self.hess = hess
        self.chol = chol
        self.xi_theta = xi_theta
        t2 = tau * tau
        Hu = hess @ u
        self.H = hess / t2
        self.h = -(Hu + grad) / t2
        self.zeta = (2.0 * (grad @ u) + u @ Hu + xi_theta) / t2
        self.Hinv_grad = linalg.cho_solve(chol, grad)
        self.Hinv_h = -u - self.Hinv_grad
        self.eta = t2 / (xi_theta - grad @ self.Hinv_grad)

    def dense(self):
        m = self.u.size
        M = np.empty((m + 1, m + 1))
        M[:m, :m] = self.H
        M[:m, m] = M[m, :m] = self.h
        M[m, m] = self.zeta
        return M

    def matvec(self, w, w_tau):
        return self.H @ w + self.h * w_tau, self.h @ w + self.zeta * w_tau

    def quad(self, d, d_tau):
        """Expanded quadratic form, without forming the matrix."""
        v = d / self.tau - (d_tau / self.tau) * self.u
        return v @ self.hess @ v - 2.0 * (d_tau / self.tau) * (v @ self.grad) + self.xi_theta * (d_tau / self.tau) ** 2

    def solve(self, w, w_tau):
        """Apply the inverse via the rank-structured formula."""
        Hinv_w = (self.tau**2) * linalg.cho_solve(self.chol, w)
        s = w @ self.Hinv_h - w_tau
        return Hinv_w + self.eta * s * self.Hinv_h, -self.eta * s

    def inv_quad(self, w, w_tau):
        Hinv_w = (self.tau**2) * linalg.cho_solve(self.chol, w)
        s = w @ self.Hinv_h - w_tau
        return w @ Hinv_w + self.eta * s * s

    def solve_matrix(self, W):
        """Apply the inverse to the columns of an (m+1, k) array."""
        m = self.u.size
        Wx, Wt = W[:m], W[m]
        Hinv_W = (self.tau**2) * linalg.cho_solve(self.chol, Wx)
        s = self.Hinv_h @ Wx - Wt
        out = np.empty_like(W, dtype=float)
        out[:m] = Hinv_W + self.eta * np.outer(self.Hinv_h, s)
        out[m] = -self.eta * s
        return out


def bar_hessian(it, problem=None, xi=None):
    xi_theta = it.org.xi_theta if xi is None else xi * it.problem.barrier.theta
    return BarHessian(it.u, it.tau, it.grad, it.hess, it.hess_chol, xi_theta)


def beta_proximity(it):
    """``H-bar^{-1}``-norm distance between ``(y, y_tau)/mu`` and the
    gradient-like vector at ``(u, tau)``."""
    Hb = bar_hessian(it)
    ytau = it.org.ytau0 + it.tau * (it.problem.c @ it.x)
    w = it.y / it.mu - it.grad / it.tau
    w_tau = ytau / it.mu + (it.grad @ it.u) / it.tau + it.org.xi_theta / it.tau
    return math.sqrt(max(Hb.inv_quad(w, w_tau), 0.0))


def support_estimate(y_hat, k, problem, warm=None):
    """Bracket ``(lower, upper)`` on ``sup{<y_hat, z> : z in D}``.

    Uses ``lower = <phi*'(k y_hat), y_hat>`` and ``upper = lower + theta/k``.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    y_hat = np.asarray(y_hat, dtype=float)
    res = problem.barrier.conjugate(k * y_hat, warm)
    lo = float(res.u_star @ y_hat)
    return lo, lo + problem.barrier.theta / k


@dataclass(frozen=True)
class GapBounds:
    lower: float
    upper: float
    kappa: float


def duality_gap_bounds(it, problem=None, xi=None):
    """Two-sided bound on ``<c, x> + support(y/tau)``.

    ``kappa`` is the distance between ``u`` and the conjugate point
    ``phi*'(tau y/mu)`` in the local norm at that point; the conjugate
    solve is the one cached on the iterate.
    """
    if not it.valid:
        raise DualInfeasibleError(it.failure)
    # u - u* in unshifted coordinates: (u + shift) - w*
    bar = it.problem.barrier
    shift = np.concatenate([b.shift for b in bar.blocks])
    diff = (it.u + shift) - it.conj.w_star
    kappa = math.sqrt(max(diff @ it.conj_hess @ diff, 0.0))
    theta = it.problem.barrier.theta
    xi = it.org.xi if xi is None else xi
    base = -it.org.ytau0 / it.tau
    t2 = it.tau**2
    lower = base - (xi * it.mu * theta + it.mu * kappa * math.sqrt(theta)) / t2
    upper = base - ((xi - 1.0) * it.mu * theta - it.mu * kappa * math.sqrt(theta)) / t2
    return GapBounds(lower, upper, kappa)


@dataclass(frozen=True)
class QddResiduals:
    dual_residual: float
    dual_scale: float
    primal_margin: float
    tau: float
    tau_positive: bool
    primal_interior: bool
    dual_interior: bool
    dual_feasible: bool
    mu_positive: bool

    @property
    def ok(self):
        return self.tau_positive and self.primal_interior and self.dual_interior and self.dual_feasible and self.mu_positive


def qdd_residuals(it, problem=None, rtol=1e-8):
    """Residuals of the membership conditions for an iterate."""
    p = it.problem
    y0 = it.org.y0
    r = p.A.T @ it.y - p.A.T @ y0 + (it.tau - 1.0) * p.c
    res = float(np.max(np.abs(r), initial=0.0))
    Anorm = float(np.max(np.sum(np.abs(p.A), axis=1)))
    scale = max(
        1.0,
        Anorm * float(np.max(np.abs(it.y), initial=0.0)),
        Anorm * float(np.max(np.abs(y0), initial=0.0)),
        abs(it.tau) * float(np.max(np.abs(p.c), initial=0.0)),
    )
    tau_ok = it.tau > 0
    margin = p.barrier.slack(it.u) if tau_ok else -math.inf
    return QddResiduals(
        dual_residual=res,
        dual_scale=scale,
        primal_margin=margin,
        tau=it.tau,
        tau_positive=tau_ok,
        primal_interior=margin > 0,
        dual_interior=p.barrier.dual_cone_contains(it.y),
        dual_feasible=res <= rtol * scale,
        mu_positive=it.mu > 0,
    )
