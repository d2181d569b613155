"""Predictor-corrector path following from the canonical infeasible start.

The loop keeps ``(x, tau, y)`` admissible, runs correctors while the
proximity exceeds ``delta1`` and predictors otherwise, and after every
predictor decides whether the current point certifies optimality,
infeasibility or unboundedness.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .barriers import DomainError, DualInfeasibleError
from .kkt import (
    IllConditionedError,
    _Factor,
    assemble,
    corrector_direction,
    predictor_rhs,
    psi_c,
    solve_direction,
    system_matrix,
)
from .path import (
    Iterate,
    bar_hessian,
    duality_gap_bounds,
    origin,
    qdd_residuals,
    support_estimate,
)
from .problem import validate

__all__ = [
    "Status",
    "Settings",
    "TheoryConstants",
    "TraceRecord",
    "SolveReport",
    "NumericalFailure",
    "initialize",
    "predictor_step",
    "corrector_step",
    "determine_status",
    "solve",
    "step",
]


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MU_LIMIT = "MuLimit"
    ITER_LIMIT = "IterLimit"
    NUMERICAL_FAILURE = "NumericalFailure"

    def __str__(self):
        return self.value


class NumericalFailure(RuntimeError):
    """No acceptable step; carries diagnostics in ``info``."""

    def __init__(self, message, **info):
        super().__init__(message)
        self.info = info


class TheoryConstants:
    """Constants of the worst-case analysis as functions of ``xi``."""

    def __init__(self, xi):
        if not xi > 1:
            raise ValueError("xi must exceed 1")
        r = 1.0 / math.sqrt(xi - 1.0)
        self.xi = xi
        self.xibar1 = 8.0 * math.sqrt(xi / (xi - 1.0))
        self.xibar2 = 3.0 * r + 3.5
        self.xibar3 = 0.5 * r * (5.5 + 5.0 * r) * (3.0 + 2.0 * r) + 2.0 / (xi - 1.0) * (1.0 + r)
        self.xibar4 = 2.0 * r * (1.0 + r) + (math.sqrt(xi) + 2.0) * r
        self.alpha2 = 1.0 / (2.0 * (self.xibar4 + self.xibar2**2))
        self.delta2_max = 1.0 / (100.0 * ((self.xibar2 * self.xibar1) ** 3 + self.xibar3 * self.xibar1**3) ** 2)
        self.corrector_decrease = self.alpha2 / (32.0 * self.xibar1**2)


@dataclass(frozen=True)
class Settings:
    """Solver parameters.

    ``strict`` replaces the neighborhoods by the worst-case-analysis values
    (``delta2`` at its theoretical bound, ``delta1 = delta2/8``) and uses the
    fixed theoretical corrector step instead of a line search.
    """

    xi: float = 2.0
    delta1: float = 0.05
    delta2: float = 0.5
    eps_gap: float = 1e-8
    eps_feas: float = 1e-8
    eps_cert: float = 1e-8
    mu_max: float = 1e12
    max_iter: int = 500
    fraction_to_boundary: float = 0.99
    strict: bool = False

    def __post_init__(self):
        if not self.xi > 1:
            raise ValueError(f"xi must exceed 1, got {self.xi}")
        if not (0 < 4 * self.delta1 < self.delta2):
            raise ValueError(f"need 0 < 4*delta1 < delta2, got delta1={self.delta1}, delta2={self.delta2}")
        for name in ("eps_gap", "eps_feas", "eps_cert", "mu_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (isinstance(self.max_iter, int) and self.max_iter >= 1):
            raise ValueError("max_iter must be a positive integer")
        if not (0 < self.fraction_to_boundary < 1):
            raise ValueError("fraction_to_boundary must lie in (0, 1)")

    @property
    def theory(self):
        return TheoryConstants(self.xi)

    def neighborhoods(self):
        if self.strict:
            d2 = self.theory.delta2_max
            return d2 / 8.0, d2
        return self.delta1, self.delta2


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    phase: str
    mu: float
    omega: float
    tau: float
    alpha2: float
    gap_lo: float
    gap_hi: float

    FIELDS = ("iter", "phase", "mu", "omega", "tau", "alpha2", "gap_lo", "gap_hi")


@dataclass
class SolveReport:
    status: Status
    x: np.ndarray
    y: np.ndarray
    tau: float
    mu: float
    objective: float
    gap_lower: float
    gap_upper: float
    iterations: int
    predictors: int
    correctors: int
    y_hat: np.ndarray = None
    certificate: np.ndarray = None
    certificate_residual: float = None
    certificate_support: float = None
    ray: np.ndarray = None
    message: str = ""
    trace: list = field(default_factory=list)


# ----------------------------------------------------------------------------
# building blocks


def initialize(problem, settings=Settings()):
    """The canonical start ``(0, 1, phi'(z0))``."""
    org = origin(problem, settings.xi)
    return Iterate(problem, np.zeros(problem.n), 1.0, org.y0.copy(), org)


def step(it, direction, alpha2):
    """Move along ``direction`` with ``alpha1 = alpha2/(tau + alpha2 d_tau)``."""
    tau = it.tau + alpha2 * direction.d_tau
    alpha1 = alpha2 / tau if tau != 0 else math.inf
    return it.with_values(it.x + alpha1 * direction.d_x, tau, it.y + alpha2 * direction.d_y)


def _alpha_max(it, ctx, direction, ftb):
    """Largest fraction-to-boundary step in ``alpha2`` units."""
    bar = it.problem.barrier
    dt = direction.d_tau
    cand = []
    if dt < 0:
        cand.append(it.tau / -dt)
    # u moves along w with parameter s = alpha2/(tau + alpha2 d_tau)
    w = ctx.A @ direction.d_xbar - dt * it.u
    s_max = bar.max_step(it.u, w)
    if math.isfinite(s_max) and s_max * dt < 1.0:
        cand.append(s_max * it.tau / (1.0 - s_max * dt))
    a_dual = bar.dual_max_step(it.y, direction.d_y)
    if math.isfinite(a_dual):
        cand.append(a_dual)
    return ftb * min(cand) if cand else math.inf


def _system(it, ctx):
    Hb = bar_hessian(it)
    S = system_matrix(ctx, Hb, it.mu**2)
    return Hb, S, _Factor(S)


def predictor_step(it, ctx, settings=Settings()):
    """One predictor step; returns ``(new_iterate, alpha2, direction)``."""
    _, delta2 = settings.neighborhoods()
    Hb, S, fac = _system(it, ctx)
    d = solve_direction(ctx, Hb, it.mu**2, predictor_rhs(ctx, it.mu), it.x, S=S, factor=fac)
    gain = d.d @ ctx.r0
    if not gain > 0:
        raise NumericalFailure("predictor direction does not increase mu", gain=gain)
    theta = it.problem.barrier.theta
    alpha = _alpha_max(it, ctx, d, settings.fraction_to_boundary)
    alpha = min(alpha, 1e3 * it.mu * it.org.xi_theta / gain)
    alpha_min = min(1e-3 * it.mu / math.sqrt(theta), alpha)
    for _ in range(60):
        cand = step(it, d, alpha)
        if cand.valid and cand.omega <= delta2 and cand.mu > it.mu:
            return cand, alpha, d
        alpha *= 0.8
        if alpha < alpha_min:
            break
    raise NumericalFailure(
        "predictor line search found no admissible step",
        alpha_min=alpha_min,
        mu=it.mu,
        omega=it.omega,
    )


def corrector_step(it, ctx, settings=Settings()):
    """One corrector step (``mu`` is kept fixed); returns ``(new, alpha2, direction)``."""
    Hb, S, fac = _system(it, ctx)
    d, _ = corrector_direction(ctx, it, Hb, S, fac)
    slope = d.d @ ctx.Ut(psi_c(it))
    fixed = settings.theory.alpha2
    if settings.strict:
        trials = [fixed]
    else:
        a0 = min(1.0, _alpha_max(it, ctx, d, settings.fraction_to_boundary))
        trials = [a0 * 0.5**k for k in range(40)]
        trials.append(fixed)
    best = None
    for alpha in trials:
        cand = step(it, d, alpha)
        if not (cand.valid and cand.omega < it.omega):
            continue
        if cand.omega <= it.omega + 1e-4 * alpha * slope:
            return cand, alpha, d
        if best is None:
            best = (cand, alpha)
    if best is not None:
        # decrease without sufficient decrease: keep the longest such step
        return best[0], best[1], d
    raise NumericalFailure("corrector failed to decrease the proximity", omega=it.omega, slope=slope)


def determine_status(it, ctx, settings, tau_cap=math.inf):
    """Check stopping rules at an admissible iterate.

    Returns ``(status or None, info)`` where ``info`` holds the gap bounds
    and, when applicable, an infeasibility certificate or a recession ray.
    """
    gap = duality_gap_bounds(it)
    info = {"gap": gap}
    cx = it.objective()
    if 1.0 / it.tau <= settings.eps_feas and gap.upper <= settings.eps_gap * (1.0 + abs(cx)):
        return Status.OPTIMAL, info

    ybar = it.scaled_y
    ybar = ybar / np.max(np.abs(ybar))
    res = float(np.max(np.abs(ctx.A.T @ ybar)))
    if res <= settings.eps_cert:
        theta = it.problem.barrier.theta
        k = max(it.tau**2 / it.mu, theta / settings.eps_cert)
        try:
            _, upper = support_estimate(ybar, k, it.problem)
        except DualInfeasibleError:
            upper = math.inf
        if upper <= -settings.eps_cert:
            info.update(certificate=ybar, residual=res, support=upper)
            return Status.INFEASIBLE, info

    if it.tau <= tau_cap and cx <= -1.0 / settings.eps_gap:
        nx = np.linalg.norm(it.x)
        info["ray"] = it.x / nx if nx > 0 else it.x
        return Status.UNBOUNDED, info
    return None, info


def _record(trace, k, phase, it, alpha):
    try:
        g = duality_gap_bounds(it)
        lo, hi = g.lower, g.upper
    except (DualInfeasibleError, DomainError):
        lo = hi = math.nan
    trace.append(TraceRecord(k, phase, it.mu, it.omega, it.tau, alpha, lo, hi))
    return lo, hi


def solve(problem, settings=Settings(), callback=None):
    """Run the predictor-corrector loop and return a :class:`SolveReport`.

    ``callback(iterate, phase)`` is invoked on every accepted iterate.
    """
    validate(problem)
    delta1, _ = settings.neighborhoods()
    it = initialize(problem, settings)
    ctx = assemble(problem, it.org)
    trace = []
    _record(trace, 0, "init", it, 0.0)
    if callback:
        callback(it, "init")
    k = npred = ncorr = 0
    tau_ref = None
    status, info, message = None, {}, ""
    while status is None:
        if k >= settings.max_iter:
            status, message = Status.ITER_LIMIT, f"reached max_iter={settings.max_iter}"
            break
        phase = "corrector" if it.omega > delta1 else "predictor"
        try:
            if phase == "corrector":
                new, alpha, _ = corrector_step(it, ctx, settings)
                ncorr += 1
            else:
                new, alpha, _ = predictor_step(it, ctx, settings)
                npred += 1
        except (NumericalFailure, IllConditionedError) as exc:
            status, message = Status.NUMERICAL_FAILURE, str(exc)
            break
        k += 1
        q = qdd_residuals(new)
        if not q.ok:
            status = Status.NUMERICAL_FAILURE
            message = f"iterate left the admissible set (dual residual {q.dual_residual:.3e})"
            break
        it = new
        _record(trace, k, phase, it, alpha)
        if callback:
            callback(it, phase)
        if phase == "predictor":
            if tau_ref is None and it.mu >= 1e3:
                tau_ref = it.tau
            tau_cap = 1e6 * max(1.0, tau_ref) if tau_ref is not None else math.inf
            status, info = determine_status(it, ctx, settings, tau_cap)
            if status is None and it.mu >= settings.mu_max:
                status, message = Status.MU_LIMIT, f"mu reached mu_max={settings.mu_max:g}"

    try:
        gap = duality_gap_bounds(it)
        glo, ghi = gap.lower, gap.upper
    except DualInfeasibleError:
        glo = ghi = math.nan
    rep = SolveReport(
        status=status,
        x=it.x.copy(),
        y=it.y.copy(),
        tau=it.tau,
        mu=it.mu,
        objective=it.objective(),
        gap_lower=glo,
        gap_upper=ghi,
        iterations=k,
        predictors=npred,
        correctors=ncorr,
        y_hat=it.y / it.tau,
        message=message,
        trace=trace,
    )
    if status is Status.INFEASIBLE:
        rep.certificate = info["certificate"]
        rep.certificate_residual = info["residual"]
        rep.certificate_support = info["support"]
    if status is Status.UNBOUNDED:
        rep.ray = info["ray"]
    return rep
