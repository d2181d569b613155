"""Solve a small LP with the interior-point solver and watch the path.

The feasible region is {x : x1 <= 1, x2 <= 1, x1 + x2 <= 1.5} and the
objective is -x1 - x2, so any point on the edge between (1, 0.5) and
(0.5, 1) is optimal with value -1.5.
"""

import numpy as np

from ddipm import Settings, solve
from ddipm.instances import lp_from_rows

G = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
b = np.array([1.0, 1.0, 1.5, 5.0, 5.0])
c = np.array([-1.0, -1.0])

# rows G x <= b become A x + beta in {z <= 0}: A = G, beta = -b
problem = lp_from_rows(G, b, c)

trace = []


def watch(it, phase):
    trace.append((phase, it.mu, it.omega, it.tau))


report = solve(problem, Settings(), callback=watch)

print(f"status     {report.status}")
print(f"objective  {report.objective:.10f}")
print(f"x          {report.x}")
print(f"gap bounds [{report.gap_lower:.3e}, {report.gap_upper:.3e}]")
print()
print(f"{'phase':>10} {'mu':>12} {'omega':>10} {'tau':>12}")
for phase, mu, omega, tau in trace:
    print(f"{phase:>10} {mu:12.4e} {omega:10.2e} {tau:12.4e}")

# mu only moves on predictor steps; correctors pull omega back down
