import numpy as np
import pytest

from ddipm import instances
from ddipm.barriers import (
    EntropyBlock,
    ExpBlock,
    LinearBlock,
    PowerBlock,
    SdpBlock,
    SocpBlock,
)


def catalog():
    """One representative of every block kind, some with shifts."""
    B = np.array([[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 1.0]])
    return [
        ("linear", LinearBlock([1.0, -0.5, 2.0])),
        ("socp", SocpBlock(3)),
        ("socp_shift", SocpBlock(2, shift=[0.4, -0.1, 0.2])),
        ("sdp", SdpBlock(B)),
        ("exp", ExpBlock()),
        ("exp_shift", ExpBlock(shift=[0.5, 0.0])),
        ("entropy", EntropyBlock()),
        ("power1", PowerBlock(1.0)),
        ("power1.5", PowerBlock(1.5)),
        ("power3", PowerBlock(3.0)),
    ]


CATALOG = catalog()
CATALOG_IDS = [name for name, _ in CATALOG]


def sample_interior(block, rng, hops=3, radius=0.6):
    """Random walk of Dikin-ellipsoid hops from the canonical point."""
    u = block.cold_start()
    for _ in range(hops):
        H = block.hessian(u)
        L = np.linalg.cholesky(H)
        xi = rng.standard_normal(block.dim)
        xi *= rng.uniform(0.0, radius) / np.linalg.norm(xi)
        u = u + np.linalg.solve(L.T, xi)
    assert block.contains(u)
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)

PROBLEMS = {
    "lp_1d": instances.lp_1d,
    "lp_two_var": instances.lp_two_var,
    "infeasible": instances.infeasible_lp,
    "unbounded": instances.unbounded_lp,
    "exp": instances.exp_lifted,
    "entropy": instances.entropy_epigraph,
    "socp": lambda: instances.socp_offset([1.0, -2.0]),
    "random5": lambda: instances.random_lp(5, seed=1)[0],
}


def sampled_iterates(name, max_iter=60):
    """Accepted iterates from a short solve of a named problem."""
    from ddipm.solver import Settings, solve

    out = []
    solve(PROBLEMS[name](), Settings(max_iter=max_iter), callback=lambda it, phase: out.append((it, phase)))
    return out


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    marker = props.get("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker
    if report.when == "setup" and report.passed:
        return
    ACCEPTANCE[number] = (title, "PASS" if report.passed else "FAIL", props.get("criterion_detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, outcome, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {outcome}: {title} {detail}".rstrip())
