"""Lift nonlinear constraints into direct sums of two-dimensional sets.

A constraint  sum_i alpha_i f_i(a_i^T x + beta_i) + g^T x + gamma <= 0
gets one epigraph variable u_i per term, an epigraph block
f_i(s) <= u_i for each, and a linear row tying the u_i together.
"""

import math

from scipy.optimize import brentq

from ddipm import LiftedConstraint, Term, lift, solve
from ddipm.instances import entropy_epigraph

# minimize exp(x) + exp(-2x) over x; optimum at x = ln(2)/3
objective = [Term(1.0, "exp", (1.0,)), Term(1.0, "exp", (-2.0,))]
p = lift(1, [0.0], objective_terms=objective)
rep = solve(p)
# x is feasible only up to about 1/tau, so the value may undershoot by ~1e-9
x = rep.x[0]
exact = 2 ** (1 / 3) + 2 ** (-2 / 3)
print(f"exp(x) + exp(-2x):  x = {x:.8f} (ln2/3 = {math.log(2) / 3:.8f}), value {rep.objective:.10f} vs {exact:.10f}")

# minimize t subject to z ln z <= t and 0.3 <= z <= 0.4
rep = solve(entropy_epigraph(0.3, 0.4))
print(f"entropy epigraph:   value {rep.objective:.10f}, -1/e = {-1 / math.e:.10f}")

# a constraint with a power term: |x - 1|^1.5 + x <= 2, maximize x
con = LiftedConstraint(terms=(Term(1.0, "power", (1.0,), beta=-1.0, p=1.5),), g=(1.0,), gamma=-2.0)
rep = solve(lift(1, [-1.0], constraints=[con]))
root = brentq(lambda t: abs(t - 1) ** 1.5 + t - 2, 1.0, 2.0)
print(f"power constraint:   x = {rep.x[0]:.8f}, largest root of |x-1|^1.5 + x = 2 is {root:.8f}")
