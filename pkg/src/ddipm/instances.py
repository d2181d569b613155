"""Small problems with known answers, used by the tests and demo scripts."""

import math

import numpy as np

from .barriers import EntropyBlock, LinearBlock, SocpBlock, direct_sum
from .problem import DomainDrivenProblem, Term, lift

__all__ = [
    "lp_1d",
    "lp_two_var",
    "infeasible_lp",
    "unbounded_lp",
    "exp_lifted",
    "entropy_epigraph",
    "entropy_optimum",
    "socp_offset",
    "random_lp",
    "lp_from_rows",
]


def lp_from_rows(G, b, c, z0=None):
    """``min c^T x  s.t.  G x <= b`` as a single linear block."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    return DomainDrivenProblem(G, c, direct_sum([LinearBlock(b)]), z0)


def lp_1d():
    """``min -x  s.t.  x <= 1`` with ``z0 = 0``; optimum -1 at x = 1."""
    return DomainDrivenProblem([[1.0]], [-1.0], direct_sum([LinearBlock(1.0)]), [0.0])


def lp_two_var():
    """``min -x1 - x2`` over ``x1 <= 1, x2 <= 1, x1 + x2 <= 1.5``; optimum -1.5."""
    return lp_from_rows([[1, 0], [0, 1], [1, 1]], [1.0, 1.0, 1.5], [-1.0, -1.0])


def infeasible_lp():
    """``x <= 0`` and ``x >= 1``."""
    return DomainDrivenProblem([[1.0], [-1.0]], [1.0], direct_sum([LinearBlock(0.0), LinearBlock(-1.0)]))


def unbounded_lp():
    """``min -x  s.t.  x >= 0``."""
    return DomainDrivenProblem([[-1.0]], [-1.0], direct_sum([LinearBlock(0.0)]))


def exp_lifted():
    """``min e^x  s.t.  x >= 1`` lifted to ``(x, u)``; optimum e."""
    return lift(1, [0.0], objective_terms=[Term(1.0, "exp", (1.0,))], linear_rows=[((-1.0,), 1.0)])


def entropy_epigraph(lo=0.3, hi=0.4):
    """``min t  s.t.  z ln z <= t,  lo <= z <= hi`` over ``(z, t)``."""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [-1.0, 0.0]])
    blocks = [EntropyBlock(), LinearBlock([hi, -lo])]
    z0 = np.array([1.0, 1.0, hi - 0.05 * (hi - lo), -lo - 0.05 * (hi - lo)])
    return DomainDrivenProblem(A, [0.0, 1.0], direct_sum(blocks), z0)


def entropy_optimum(lo=0.3, hi=0.4):
    """Minimum of ``z ln z`` over ``[lo, hi]`` (stationary point 1/e if inside)."""
    z = min(max(1.0 / math.e, lo), hi)
    return z * math.log(z)


def socp_offset(x0):
    """``min t  s.t.  ||x - x0|| <= t`` over ``(x, t)``; optimum 0."""
    x0 = np.asarray(x0, dtype=float)
    k = x0.size
    shift = np.concatenate([-x0, [0.0]])
    c = np.zeros(k + 1)
    c[-1] = 1.0
    return DomainDrivenProblem(np.eye(k + 1), c, direct_sum([SocpBlock(k, shift=shift)]))


def random_lp(n, m=None, seed=0, box=10.0):
    """Random dense LP with a bounded feasible region.

    ``m - 2n`` random rows pass strictly above a random interior point;
    ``2n`` box rows ``|x_j| <= box`` bound the region.  Returns
    ``(problem, G, b)`` with the rows ``G x <= b`` for external oracles.
    """
    m = 3 * n if m is None else m
    if m < 2 * n + 1:
        raise ValueError("need at least one non-box row")
    rng = np.random.default_rng(seed)
    k = m - 2 * n
    Gr = rng.standard_normal((k, n))
    xf = rng.uniform(-0.5 * box, 0.5 * box, n)
    br = Gr @ xf + rng.uniform(0.1, 1.0, k) * np.linalg.norm(Gr, axis=1)
    G = np.vstack([Gr, np.eye(n), -np.eye(n)])
    b = np.concatenate([br, np.full(2 * n, box)])
    c = rng.standard_normal(n)
    return lp_from_rows(G, b, c), G, b
