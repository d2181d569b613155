"""Scalar self-concordance helpers and a finite-difference harness.

``rho`` and ``sigma`` are the scalar functions that appear in every local
estimate for self-concordant functions; the ``fd_*`` helpers are central
difference estimators used by the property tests to check analytic
derivatives of barrier oracles.
"""

import math

import numpy as np

__all__ = [
    "ProbeFailure",
    "rho",
    "sigma",
    "fd_gradient",
    "fd_hessian",
    "fd_third_directional",
]


class ProbeFailure(ValueError):
    """A finite-difference probe left the domain of the function."""


def rho(t):
    """Return ``t - ln(1 + t)``, or ``+inf`` for ``t <= -1``."""
    t = float(t)
    if t <= -1.0:
        return math.inf
    if abs(t) < 1e-4:
        # series avoids cancellation near 0
        return t * t * (0.5 - t * (1.0 / 3.0 - t * (0.25 - t / 5.0)))
    return t - math.log1p(t)


def _drho(t):
    return t / (1.0 + t)


def sigma(s, tol=1e-12):
    """Largest ``t`` with ``rho(t) <= s``.

    Safeguarded Newton on ``rho(t) - s`` over the bracket
    ``[0, s + sqrt(2 s) + 1]``; falls back to bisection whenever a Newton
    iterate leaves the current bracket.
    """
    s = float(s)
    if s < 0:
        raise ValueError(f"sigma is defined for s >= 0, got {s}")
    if s == 0.0:
        return 0.0
    lo, hi = 0.0, s + math.sqrt(2.0 * s) + 1.0
    # Start from the small-s expansion, clipped into the bracket.
    t = min(math.sqrt(2.0 * s) + 2.0 * s / 3.0, hi)
    for _ in range(200):
        f = rho(t) - s
        if f > 0:
            hi = t
        else:
            lo = t
        if hi - lo <= tol * max(1.0, t):
            break
        step = f / _drho(t) if t > 0 else math.inf
        t_new = t - step
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= tol * max(1.0, t):
            t = t_new
            break
        t = t_new
    return t


def _scaled_step(u, h):
    return h * (1.0 + np.max(np.abs(u), initial=0.0))


def _probe(f, u):
    try:
        val = float(f(u))
    except (ValueError, ArithmeticError) as exc:
        raise ProbeFailure(f"evaluation failed at {u!r}: {exc}") from exc
    if not math.isfinite(val):
        raise ProbeFailure(f"non-finite value at {u!r}")
    return val


def fd_gradient(f, u, h=1e-5):
    """Central-difference gradient of the scalar field ``f`` at ``u``."""
    u = np.asarray(u, dtype=float)
    step = _scaled_step(u, h)
    g = np.empty(u.size)
    for i in range(u.size):
        e = np.zeros(u.size)
        e[i] = step
        g[i] = (_probe(f, u + e) - _probe(f, u - e)) / (2.0 * step)
    return g


def fd_hessian(f, u, h=1e-4):
    """Central-difference Hessian of ``f`` at ``u`` (symmetrized)."""
    u = np.asarray(u, dtype=float)
    step = _scaled_step(u, h)
    n = u.size
    f0 = _probe(f, u)
    H = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        H[i, i] = (_probe(f, u + ei) - 2.0 * f0 + _probe(f, u - ei)) / step**2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = step
            H[i, j] = H[j, i] = (
                _probe(f, u + ei + ej)
                - _probe(f, u + ei - ej)
                - _probe(f, u - ei + ej)
                + _probe(f, u - ei - ej)
            ) / (4.0 * step**2)
    return H


def fd_third_directional(f, u, direction, h=1e-3):
    """Estimate ``f'''(u)[d, d, d]`` with a five-point stencil along ``d``."""
    u = np.asarray(u, dtype=float)
    d = np.asarray(direction, dtype=float)
    step = _scaled_step(u, h)
    vals = [_probe(f, u + k * step * d) for k in (-2, -1, 1, 2)]
    return (vals[3] - 2.0 * vals[2] + 2.0 * vals[1] - vals[0]) / (2.0 * step**3)
