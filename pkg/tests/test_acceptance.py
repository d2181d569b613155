"""End-to-end acceptance checks, one test per criterion.

Each test prints a one-line verdict and a summary section lists all of
them at the end of the run.
"""

import functools
import itertools
import math
import statistics
import time

import numpy as np
import pytest
from scipy import optimize

from conftest import CATALOG, PROBLEMS, sample_interior
from ddipm import instances
from ddipm.cli import read_trace, write_trace
from ddipm.kkt import assemble, psi_p, system_matrix, system_solve
from ddipm.path import bar_hessian, beta_proximity, gradient_residual
from ddipm.scfun import fd_gradient, fd_hessian, fd_third_directional, rho
from ddipm.solver import Settings, Status, initialize, solve


@pytest.fixture
def criterion(request):
    def tag(number, title):
        request.node.user_properties.append(("criterion", (number, title)))

        def verdict(ok, detail=""):
            request.node.user_properties.append(("criterion_detail", detail))
            print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} {detail}".rstrip())
            return ok

        return verdict

    return tag


# -- shared sweep -----------------------------------------------------------


def _random_cases():
    return [(n, seed) for n in (2, 5, 10) for seed in range(10)]


@functools.lru_cache(maxsize=None)
def sweep():
    """Solve every test problem once, keeping accepted iterates and reports."""
    out = {}
    problems = {name: f() for name, f in PROBLEMS.items()}
    for n, seed in _random_cases():
        problems[f"rand{n}_{seed}"] = instances.random_lp(n, seed=seed)[0]
    for name, p in problems.items():
        events = []
        rep = solve(p, Settings(), callback=lambda it, ph: events.append((it, ph)))
        out[name] = (rep, events)
    return out


# -- 1 ----------------------------------------------------------------------


def _rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300)


def test_01_barrier_calculus(criterion):
    verdict = criterion(1, "barrier calculus suite")
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = dict(grad=0.0, hess=0.0, sc=0.0, theta=0.0, fy=0.0, rt=0.0)
    for _, block in CATALOG:
        for _ in range(20):
            u = sample_interior(block, rng)
            g, H = block.gradient(u), block.hessian(u)
            worst["grad"] = max(worst["grad"], _rel(fd_gradient(block.value, u), g))
            worst["hess"] = max(worst["hess"], _rel(fd_hessian(block.value, u), H))
            d = rng.standard_normal(block.dim)
            d *= 0.05 / math.sqrt(d @ H @ d)
            third = fd_third_directional(block.value, u, d)
            worst["sc"] = max(worst["sc"], abs(third) / (2 * (d @ H @ d) ** 1.5))
            worst["theta"] = max(worst["theta"], g @ np.linalg.solve(H, g) - block.theta)
            res = block.conjugate(g)
            worst["fy"] = max(worst["fy"], abs(block.value(u) + res.value - g @ u))
            worst["rt"] = max(worst["rt"], np.linalg.norm(res.u_star - u) / (1 + np.linalg.norm(u)))
    elapsed = time.perf_counter() - t0
    ok = (
        worst["grad"] <= 1e-6
        and worst["hess"] <= 1e-5
        and worst["sc"] <= 1 + 1e-3
        and worst["theta"] <= 1e-9
        and worst["fy"] <= 1e-9
        and worst["rt"] <= 1e-8
        and elapsed < 10
    )
    verdict(ok, f"({elapsed:.2f} s, " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()) + ")")
    assert ok


# -- 2 ----------------------------------------------------------------------


def test_02_path_identities_at_start(criterion):
    verdict = criterion(2, "path identities at initialization")
    problems = [f() for f in PROBLEMS.values()] + [instances.random_lp(n, seed=s)[0] for n, s in _random_cases()]
    bad = []
    for p in problems:
        it = initialize(p)
        ctx = assemble(p, it.org)
        S = system_matrix(ctx, bar_hessian(it), it.mu**2)
        g = ctx.Ut(psi_p(it))
        scale = max(1.0, np.abs(ctx.r0).max(), np.abs(ctx.U).max())
        checks = [
            abs(it.mu - 1.0) <= 1e-12,
            abs(it.omega_raw) <= 1e-10,
            np.abs(g + ctx.r0 / it.mu).max() <= 1e-9 * scale,
            abs(g @ system_solve(S, g) - it.org.xi_theta) <= 1e-7,
        ]
        if not all(checks):
            bad.append((p.m, p.n, checks))
    verdict(not bad, f"({len(problems)} problems)")
    assert not bad


# -- 3 ----------------------------------------------------------------------


def test_03_proximity_sandwiches(criterion):
    verdict = criterion(3, "proximity and beta sandwiches on every accepted iterate")
    count = violations = 0
    for _, events in sweep().values():
        for it, _ in events:
            r = gradient_residual(it)
            b = beta_proximity(it)
            xi = it.org.xi
            lo_ok = rho(r) <= it.omega + 1e-12 * (1 + it.omega)
            hi_ok = r >= 1 or it.omega <= rho(-r) + 1e-12
            # absolute 1e-9 covers round-off once r and beta are near zero
            beta_ok = r <= b * (1 + 1e-6) + 1e-9 and b <= math.sqrt(xi / (xi - 1)) * r * (1 + 1e-6) + 1e-9
            violations += not (lo_ok and hi_ok and beta_ok)
            count += 1
    verdict(violations == 0, f"({count} iterates, {violations} violations)")
    assert violations == 0


# -- 4 ----------------------------------------------------------------------


def vertex_oracle(G, b, c):
    """Minimum of <c, x> over the vertices of {G x <= b} by enumeration."""
    m, n = G.shape
    best = math.inf
    for rows in itertools.combinations(range(m), n):
        Gs = G[list(rows)]
        if abs(np.linalg.det(Gs)) < 1e-12:
            continue
        x = np.linalg.solve(Gs, b[list(rows)])
        if np.all(G @ x <= b + 1e-9 * (1 + np.abs(b))):
            best = min(best, c @ x)
    return best


def highs_oracle(G, b, c):
    res = optimize.linprog(c, A_ub=G, b_ub=b, bounds=[(None, None)] * G.shape[1], method="highs")
    assert res.status == 0
    return res.fun


def test_04_lp_oracle(criterion):
    verdict = criterion(4, "random LPs match the vertex/brute-force oracle")
    worst_err = worst_time = 0.0
    worst_iter = 0
    failures = []
    for n, seed in _random_cases():
        p, G, b = instances.random_lp(n, seed=seed)
        c = np.asarray(p.c)
        if n <= 5:
            ref = vertex_oracle(G, b, c)
            # the two oracles agree where both are available
            assert abs(highs_oracle(G, b, c) - ref) <= 1e-9 * (1 + abs(ref))
        else:
            ref = highs_oracle(G, b, c)
        t0 = time.perf_counter()
        rep = solve(p)
        dt = time.perf_counter() - t0
        err = abs(rep.objective - ref)
        worst_err, worst_time, worst_iter = max(worst_err, err), max(worst_time, dt), max(worst_iter, rep.iterations)
        if rep.status is not Status.OPTIMAL or err > 1e-6 or rep.iterations > 300 or dt > 5:
            failures.append((n, seed, rep.status, err, rep.iterations, dt))
    verdict(not failures, f"(30 LPs, max error {worst_err:.1e}, max {worst_iter} iterations, max {worst_time:.2f} s)")
    assert not failures


# -- 5 ----------------------------------------------------------------------


def _zlogz_min(lo, hi):
    # independent oracle: bounded scalar minimization of z ln z
    res = optimize.minimize_scalar(lambda z: z * math.log(z), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return min(res.fun, lo * math.log(lo), hi * math.log(hi))


def test_05_nonlinear_instances(criterion):
    verdict = criterion(5, "nonlinear desk instances (exp, entropy, SOCP)")
    cases = [
        ("exp", instances.exp_lifted(), math.e),
        # z ln z is minimized at 1/e, which lies inside [0.3, 0.4]
        ("entropy[0.3,0.4]", instances.entropy_epigraph(0.3, 0.4), _zlogz_min(0.3, 0.4)),
        # on [0.2, 0.3] the function decreases, so the optimum is 0.3 ln 0.3
        ("entropy[0.2,0.3]", instances.entropy_epigraph(0.2, 0.3), 0.3 * math.log(0.3)),
        ("socp", instances.socp_offset([1.0, -2.0, 0.5]), 0.0),
    ]
    assert _zlogz_min(0.3, 0.4) == pytest.approx(-1 / math.e, abs=1e-12)
    details, ok = [], True
    for name, p, ref in cases:
        rep = solve(p)
        err = abs(rep.objective - ref)
        ok &= rep.status is Status.OPTIMAL and err <= 1e-6
        details.append(f"{name} err={err:.1e}")
    verdict(ok, "(" + ", ".join(details) + ")")
    assert ok


# -- 6 ----------------------------------------------------------------------


def test_06_infeasibility(criterion):
    verdict = criterion(6, "infeasible LP returns a certificate")
    p = instances.infeasible_lp()
    rep = solve(p)
    ybar = rep.certificate
    ok = rep.status is Status.INFEASIBLE and rep.iterations <= 200
    if ok:
        res = np.abs(p.A.T @ ybar).max()
        # support of {z1 <= 0} + {z2 <= -1} at ybar >= 0 is -ybar_2
        exact = -ybar[1] if np.all(ybar >= 0) else math.inf
        ok = res <= 1e-6 and rep.certificate_support <= -1e-6 and exact <= rep.certificate_support + 1e-12
        verdict(ok, f"({rep.iterations} iterations, |A^T y|={res:.1e}, support bound {rep.certificate_support:.3g})")
    else:
        verdict(False, f"(status {rep.status})")
    assert ok


# -- 7 ----------------------------------------------------------------------


def test_07_unboundedness(criterion):
    verdict = criterion(7, "unbounded LP is detected before mu_max")
    rep = solve(instances.unbounded_lp())
    ok = rep.status is Status.UNBOUNDED and rep.mu < Settings().mu_max
    verdict(ok, f"(status {rep.status}, mu={rep.mu:.3g})")
    assert ok


# -- 8 ----------------------------------------------------------------------


def test_08_monotonicity_from_trace(criterion, tmp_path):
    verdict = criterion(8, "monotonicity ledger replayed from trace CSV")
    delta2 = Settings().delta2
    violations = rows = 0
    for name, (rep, _) in sweep().items():
        path = tmp_path / f"{name}.csv"
        write_trace(rep.trace, path)
        trace = read_trace(path)
        assert trace == rep.trace
        for prev, cur in zip(trace, trace[1:]):
            rows += 1
            if cur.phase == "corrector":
                violations += abs(cur.mu - prev.mu) > 1e-9 * prev.mu
            else:
                violations += not cur.mu > prev.mu
                violations += not cur.omega <= delta2
    verdict(violations == 0, f"({rows} steps, {violations} violations)")
    assert violations == 0


# -- 9 ----------------------------------------------------------------------


def test_09_sqrt_theta_scaling(criterion):
    verdict = criterion(9, "cycle counts grow sub-linearly in theta")
    s = Settings(mu_max=1e8, eps_gap=1e-300, eps_feas=1e-300, max_iter=5000)
    medians = []
    for m in (10, 40, 160):
        counts = []
        for seed in range(5):
            p = instances.random_lp(m // 5, m=m, seed=seed)[0]
            rep = solve(p, s)
            assert rep.status is Status.MU_LIMIT, rep.message
            counts.append(rep.predictors)
        medians.append(statistics.median(counts))
    ratios = [b / a for a, b in zip(medians, medians[1:])]
    ok = all(r <= 3 for r in ratios)
    verdict(ok, f"(medians {medians}, ratios {[round(r, 2) for r in ratios]})")
    assert ok


# -- 10 ---------------------------------------------------------------------


def test_10_strict_mode(criterion):
    verdict = criterion(10, "strict mode solves the 1-D LP")
    rep = solve(instances.lp_1d(), Settings(strict=True, max_iter=20000))
    ok = rep.status is Status.OPTIMAL and rep.iterations <= 20000 and abs(rep.objective + 1) <= 1e-6
    verdict(ok, f"({rep.iterations} iterations)")
    assert ok
