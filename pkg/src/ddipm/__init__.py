"""Predictor-corrector interior-point solver for problems in domain-driven form.

Minimize ``<c, x>`` subject to ``A x`` in ``D``, where ``D`` is a direct sum
of convex sets, each given by a self-concordant barrier.  The solver starts
from an infeasible point and reports an optimal solution, a certificate of
infeasibility, or evidence of unboundedness.
"""

from .barriers import (
    BLOCK_KINDS,
    DirectSumBarrier,
    DomainError,
    DualInfeasibleError,
    EntropyBlock,
    ExpBlock,
    LinearBlock,
    PowerBlock,
    SdpBlock,
    SocpBlock,
    direct_sum,
)
from .kkt import IllConditionedError
from .path import duality_gap_bounds, mu_of, proximity, support_estimate
from .problem import (
    DomainDrivenProblem,
    LiftedConstraint,
    LiftError,
    ProblemFormatError,
    Term,
    ValidationError,
    dumps,
    lift,
    load,
    loads,
    save,
    validate,
)
from .solver import NumericalFailure, Settings, SolveReport, Status, TheoryConstants, solve

__version__ = "0.1.0"

__all__ = [
    "BLOCK_KINDS",
    "DirectSumBarrier",
    "DomainDrivenProblem",
    "DomainError",
    "DualInfeasibleError",
    "EntropyBlock",
    "ExpBlock",
    "IllConditionedError",
    "LiftError",
    "LiftedConstraint",
    "LinearBlock",
    "NumericalFailure",
    "PowerBlock",
    "ProblemFormatError",
    "SdpBlock",
    "Settings",
    "SocpBlock",
    "SolveReport",
    "Status",
    "Term",
    "TheoryConstants",
    "ValidationError",
    "direct_sum",
    "dumps",
    "duality_gap_bounds",
    "lift",
    "load",
    "loads",
    "mu_of",
    "proximity",
    "save",
    "solve",
    "support_estimate",
    "validate",
]
