"""Infeasibility certificates and unbounded rays.

The solver never needs a feasible start: when the problem has no
solution the iterates produce evidence instead.
"""

import numpy as np

from ddipm import Status, solve
from ddipm.instances import infeasible_lp, unbounded_lp

# x <= 0 and x >= 1 cannot both hold
p = infeasible_lp()
rep = solve(p)
assert rep.status is Status.INFEASIBLE
ybar = rep.certificate
print(f"status {rep.status} after {rep.iterations} iterations")
print(f"  certificate y = {ybar}")
print(f"  |A^T y|_inf   = {np.abs(p.A.T @ ybar).max():.2e}   (should vanish)")
print(f"  support bound = {rep.certificate_support:.6f}   (negative proves infeasibility)")

# min -x subject to x >= 0 has no finite optimum
rep = solve(unbounded_lp())
print(f"status {rep.status}: objective reached {rep.objective:.3e} along ray {rep.ray}")
