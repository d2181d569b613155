"""Direction systems shared by the predictor and corrector steps.

Unknowns are ``d = (d_xbar, d_tau, d_v)`` of size ``m + 1`` and the system
matrix is ``U^T diag(H-bar, H-hat^{-1}) U``.  ``F`` (rows spanning the
kernel of ``A^T``) is built explicitly; at desk scale that is cheap and
keeps the algebra transparent.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .path import BarHessian

__all__ = [
    "IllConditionedError",
    "KktContext",
    "Direction",
    "nullspace_basis",
    "assemble",
    "system_matrix",
    "solve_direction",
    "system_solve",
    "predictor_rhs",
    "psi_c",
    "psi_p",
    "corrector_rhs",
    "corrector_direction",
    "dikin_terms",
]


class IllConditionedError(ArithmeticError):
    """Cholesky failed even after diagonal-shift retries."""

    def __init__(self, message, cond=math.inf):
        super().__init__(f"{message} (condition estimate {cond:.3e})")
        self.cond = cond


def nullspace_basis(A, rtol=1e-10):
    """Orthonormal rows spanning ``ker(A^T)``, from a pivoted full QR."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if m == n:
        return np.zeros((0, m))
    Q, R, _ = linalg.qr(A, mode="full", pivoting=True)
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > rtol * d[0])) if d.size and d[0] > 0 else 0
    return Q[:, rank:].T.copy()


@dataclass(frozen=True)
class KktContext:
    A: np.ndarray
    c: np.ndarray
    F: np.ndarray
    c_A: np.ndarray
    U: np.ndarray
    r0: np.ndarray
    y0: np.ndarray
    ytau0: float

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def U1(self, d):
        """First half of ``U d``: ``(A d_xbar, d_tau)``."""
        n = self.n
        return self.A @ d[:n], d[n]

    def U2(self, d):
        """Second half of ``U d``: ``(-d_tau c_A - F^T d_v, <c, d_xbar>)``."""
        n = self.n
        return -d[n] * self.c_A - self.F.T @ d[n + 1 :], self.c @ d[:n]

    def Ut(self, psi):
        """``U^T psi`` for a vector of length ``2m + 2``."""
        m = self.m
        p1, p2, p3, p4 = psi[:m], psi[m], psi[m + 1 : 2 * m + 1], psi[2 * m + 1]
        return np.concatenate([self.A.T @ p1 + self.c * p4, [p2 - self.c_A @ p3], -self.F @ p3])


def assemble(problem, org):
    """Build ``U``, ``r0``, ``F`` and the minimum-norm ``c_A``."""
    A, c, z0 = np.asarray(problem.A), np.asarray(problem.c), np.asarray(problem.z0)
    m, n = A.shape
    F = nullspace_basis(A)
    c_A = np.linalg.lstsq(A.T, c, rcond=None)[0]
    k = m - n
    U = np.zeros((2 * m + 2, m + 1))
    U[:m, :n] = A
    U[m, n] = 1.0
    U[m + 1 : 2 * m + 1, n] = -c_A
    U[m + 1 : 2 * m + 1, n + 1 :] = -F.T
    U[2 * m + 1, :n] = c
    y0 = org.y0
    r0 = np.concatenate([-A.T @ y0 - c, [-org.ytau0 + c_A @ z0], F @ z0])
    assert F.shape == (k, m)
    for arr in (F, c_A, U, r0):
        arr.setflags(write=False)
    return KktContext(A, c, F, c_A, U, r0, y0, org.ytau0)


@dataclass(frozen=True)
class Direction:
    d: np.ndarray
    d_xbar: np.ndarray
    d_tau: float
    d_v: np.ndarray
    d_x: np.ndarray
    d_y: np.ndarray
    residual: float


def _as_dense(H):
    return H.dense() if isinstance(H, BarHessian) else np.asarray(H, dtype=float)


def system_matrix(ctx, Hbar, Hhat):
    """``U^T diag(H-bar, H-hat^{-1}) U``.

    ``Hhat`` is either a positive scalar ``s`` (meaning ``s * H-bar``) or an
    explicit SPD matrix; ``Hbar`` may be a :class:`BarHessian` or a matrix.
    """
    m, n = ctx.m, ctx.n
    Hb = _as_dense(Hbar)
    U1 = ctx.U[: m + 1]
    U2 = ctx.U[m + 1 :]
    S = U1.T @ Hb @ U1
    if np.isscalar(Hhat):
        if isinstance(Hbar, BarHessian):
            W = Hbar.solve_matrix(U2)
        else:
            W = np.linalg.solve(Hb, U2)
        S = S + (U2.T @ W) / Hhat
    else:
        S = S + U2.T @ np.linalg.solve(np.asarray(Hhat, dtype=float), U2)
    return 0.5 * (S + S.T)


class _Factor:
    """Jacobi-scaled Cholesky with diagonal-shift retries."""

    def __init__(self, S):
        d = np.sqrt(np.abs(np.diag(S)))
        d[d == 0] = 1.0
        self.scale = 1.0 / d
        Ss = S * np.outer(self.scale, self.scale)
        shift = 1e-12 * np.trace(Ss)
        last = None
        for attempt in range(4):
            try:
                M = Ss if attempt == 0 else Ss + shift * np.eye(S.shape[0])
                self.cf = linalg.cho_factor(M)
                self.shifted = attempt > 0
                return
            except linalg.LinAlgError as exc:
                last = exc
                if attempt > 0:
                    shift *= 10.0
        cond = np.linalg.cond(Ss)
        raise IllConditionedError(f"direction system is not numerically positive definite: {last}", cond)

    def solve(self, r):
        return self.scale * linalg.cho_solve(self.cf, self.scale * r)


def system_solve(S, r):
    return _Factor(S).solve(r)


def _direction(ctx, d, x, residual):
    n = ctx.n
    d_xbar = d[:n]
    d_tau = float(d[n])
    d_v = d[n + 1 :]
    d_x = d_xbar - d_tau * np.asarray(x)
    d_y = -d_tau * ctx.c_A - ctx.F.T @ d_v
    return Direction(d, d_xbar, d_tau, d_v, d_x, d_y, residual)


def solve_direction(ctx, Hbar, Hhat, r_rhs, x, S=None, factor=None):
    """Solve the direction system and derive ``(d_x, d_y)``."""
    if S is None:
        S = system_matrix(ctx, Hbar, Hhat)
    if factor is None:
        factor = _Factor(S)
    d = factor.solve(r_rhs)
    res = float(np.linalg.norm(S @ d - r_rhs))
    return _direction(ctx, d, x, res)


def predictor_rhs(ctx, mu):
    return ctx.r0 / mu**2


def psi_p(it):
    """Predictor reference vector ``(f1, f2)`` of length ``2m + 2``."""
    tau, mu, u, g = it.tau, it.mu, it.u, it.grad
    f1 = np.concatenate([g / tau, [-(g @ u) / tau - it.org.xi_theta / tau]])
    f2 = np.concatenate([(tau / mu) * u, [tau / mu]])
    return np.concatenate([f1, f2])


def psi_c(it):
    """Corrector vector built from ``phi'(u)`` and ``phi*'(tau y/mu)``."""
    tau, mu, u, g, y = it.tau, it.mu, it.u, it.grad, it.y
    us = it.conj.u_star
    ytau = it.org.ytau0 + tau * (it.problem.c @ it.x)
    second = -(g @ u) / tau + (y @ us) / mu + ytau / mu
    return np.concatenate([g / tau, [second], (tau / mu) * us, [tau / mu]])


def corrector_rhs(ctx, it, Hbar, factor=None, S=None):
    """Return ``(r_rhs, beta)`` with ``r_rhs = -(U^T psi_c + beta r0)``.

    ``beta`` makes the solution orthogonal to ``r0``, which keeps ``mu``
    fixed along the step.
    """
    if factor is None:
        if S is None:
            S = system_matrix(ctx, Hbar, it.mu**2)
        factor = _Factor(S)
    g = ctx.Ut(psi_c(it))
    Sr = factor.solve(ctx.r0)
    denom = ctx.r0 @ Sr
    beta = -(Sr @ g) / denom if denom > 0 else 0.0
    return -(g + beta * ctx.r0), beta


def corrector_direction(ctx, it, Hbar, S, factor):
    """Corrector :class:`Direction` with ``d^T r0 = 0`` enforced to round-off.

    Solving with ``corrector_rhs`` leaves a residue of order
    ``eps * cond(S)`` in ``d^T r0``; one projection along ``S^{-1} r0``
    removes it.  This only perturbs ``beta``.
    """
    g = ctx.Ut(psi_c(it))
    Sr = factor.solve(ctx.r0)
    denom = ctx.r0 @ Sr
    beta = -(Sr @ g) / denom if denom > 0 else 0.0
    rhs = -(g + beta * ctx.r0)
    d = factor.solve(rhs)
    if denom > 0:
        delta = (d @ ctx.r0) / denom
        d = d - delta * Sr
        beta += delta
        rhs = rhs - delta * ctx.r0
    res = float(np.linalg.norm(S @ d - rhs))
    return _direction(ctx, d, it.x, res), beta


def dikin_terms(ctx, it, direction):
    """Four nonnegative pieces bounded by ``d^T S d`` (with ``H-hat = mu^2 H-bar``)."""
    tau, mu, u = it.tau, it.mu, it.u
    theta = it.problem.barrier.theta
    xi = it.org.xi
    dt = direction.d_tau
    v = (ctx.A @ direction.d_xbar - dt * u) / tau
    nv = math.sqrt(max(v @ it.hess @ v, 0.0))
    t1 = (nv - abs(dt / tau) * math.sqrt(theta)) ** 2
    t2 = (xi - 1.0) * dt**2 * theta / tau**2
    dy = direction.d_y
    Hinv_dy = linalg.cho_solve(it.hess_chol, dy)
    t3 = (tau / mu) ** 2 * (dy @ Hinv_dy)
    num = (tau / mu) * (dy @ it.hess_inv_grad) + (tau / mu) * (dy @ u + ctx.c @ direction.d_xbar)
    t4 = num**2 / (it.org.xi_theta - it.grad @ it.hess_inv_grad)
    return t1, t2, t3, t4
