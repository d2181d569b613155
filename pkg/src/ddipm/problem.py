"""Problems of the form ``min <c, x>  s.t.  A x in D``.

Also holds the epigraph lifting of univariate-sum constraints, structural
validation and the ``ddipm-problem v1`` JSON file format.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .barriers import (
    BLOCK_KINDS,
    DirectSumBarrier,
    EntropyBlock,
    ExpBlock,
    LinearBlock,
    PowerBlock,
    SdpBlock,
    SocpBlock,
    direct_sum,
)

__all__ = [
    "DomainDrivenProblem",
    "ValidationError",
    "ValidationReport",
    "validate",
    "Term",
    "LiftedConstraint",
    "LiftError",
    "lift",
    "ProblemFormatError",
    "load",
    "save",
    "dumps",
    "loads",
    "FORMAT_HEADER",
]

FORMAT_HEADER = "ddipm-problem v1"
RANK_RTOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DomainDrivenProblem:
    """``min <c, x>`` subject to ``A x in D``.

    Parameters
    ----------
    A : (m, n) array
    c : (n,) array
    barrier : DirectSumBarrier
        Barrier for D; a single block or a list of blocks is wrapped.
    z0 : (m,) array, optional
        Interior point of D used to build the infeasible start.  Defaults
        to the concatenated canonical points of the blocks.
    """

    A: np.ndarray
    c: np.ndarray
    barrier: DirectSumBarrier
    z0: np.ndarray = None

    def __post_init__(self):
        barrier = self.barrier
        if not isinstance(barrier, DirectSumBarrier):
            barrier = direct_sum(barrier if isinstance(barrier, (list, tuple)) else [barrier])
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        c = np.asarray(self.c, dtype=float).reshape(-1)
        z0 = barrier.cold_start() if self.z0 is None else np.asarray(self.z0, dtype=float).reshape(-1)
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "barrier", barrier)
        object.__setattr__(self, "z0", _frozen(z0))

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def theta(self):
        return self.barrier.theta

    def __eq__(self, other):
        if not isinstance(other, DomainDrivenProblem):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.z0, other.z0)
            and self.barrier == other.barrier
        )

    __hash__ = None


# ----------------------------------------------------------------------------
# validation


class ValidationError(ValueError):
    """The problem violates a structural assumption."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class ValidationReport:
    ok: bool
    m: int
    n: int
    sigma_min: float = float("nan")
    sigma_max: float = float("nan")
    dependent_columns: list = field(default_factory=list)
    z0_block: int = None
    messages: list = field(default_factory=list)


def validate(problem, raise_on_error=True):
    """Check shapes, full column rank of ``A`` and ``z0 in int D``.

    Returns a :class:`ValidationReport`; raises :class:`ValidationError`
    carrying the report unless ``raise_on_error`` is false.
    """
    A, c, bar, z0 = problem.A, problem.c, problem.barrier, problem.z0
    m, n = A.shape
    rep = ValidationReport(ok=True, m=m, n=n)
    msgs = rep.messages
    if bar.dim != m:
        msgs.append(f"A has {m} rows but the blocks span {bar.dim}")
    if c.size != n:
        msgs.append(f"c has length {c.size} but A has {n} columns")
    if z0.size != bar.dim:
        msgs.append(f"z0 has length {z0.size}, expected {bar.dim}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c)) and np.all(np.isfinite(z0))):
        msgs.append("non-finite entries in A, c or z0")
    if m < n:
        msgs.append(f"more columns than rows (m={m} < n={n})")
    if msgs:
        rep.ok = False
        if raise_on_error:
            raise ValidationError("; ".join(msgs), rep)
        return rep

    sv = np.linalg.svd(A, compute_uv=False) if n else np.ones(1)
    rep.sigma_max = float(sv[0]) if sv.size else 0.0
    rep.sigma_min = float(sv[-1]) if sv.size else 0.0
    if n and not rep.sigma_min > RANK_RTOL * rep.sigma_max:
        _, R, piv = linalg.qr(A, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > RANK_RTOL * diag[0])) if diag[0] > 0 else 0
        rep.dependent_columns = sorted(int(j) for j in piv[rank:])
        msgs.append(
            f"A is rank deficient (sigma_min={rep.sigma_min:.3e}, sigma_max={rep.sigma_max:.3e}); "
            f"dependent columns {rep.dependent_columns}"
        )

    bad = bar.first_outside(z0)
    if bad is not None:
        rep.z0_block = bad
        msgs.append(f"z0 is not interior to block {bad} ({bar.blocks[bad].kind})")

    rep.ok = not msgs
    if msgs and raise_on_error:
        raise ValidationError("; ".join(msgs), rep)
    return rep


# ----------------------------------------------------------------------------
# lifting

_TERM_BLOCKS = {"exp": ExpBlock, "entropy": EntropyBlock, "power": PowerBlock}


class LiftError(ValueError):
    """Bad input to :func:`lift`."""


@dataclass(frozen=True)
class Term:
    """``alpha * f(<a, x> + beta)`` with ``f`` one of exp, entropy
    (``s ln s``) or power (``|s|^p``)."""

    alpha: float
    kind: str
    a: tuple
    beta: float = 0.0
    p: float = None

    def block(self):
        if self.kind not in _TERM_BLOCKS:
            raise LiftError(f"no catalog block for term kind {self.kind!r}")
        shift = [float(self.beta), 0.0]
        if self.kind == "power":
            if self.p is None:
                raise LiftError("power term needs p")
            return PowerBlock(self.p, shift=shift)
        return _TERM_BLOCKS[self.kind](shift=shift)


@dataclass(frozen=True)
class LiftedConstraint:
    """``sum_i alpha_i f_i(<a_i, x> + beta_i) + <g, x> + gamma <= 0``."""

    terms: tuple
    g: tuple
    gamma: float = 0.0


def lift(n, c, constraints=(), objective_terms=(), linear_rows=(), cone_rows=(), z0=None):
    """Build a Domain-Driven problem over ``(x, u)``.

    Parameters
    ----------
    n : int
        Number of original variables ``x``.
    c : (n,) array
        Linear part of the objective.
    constraints : sequence of LiftedConstraint
        Each term gets an auxiliary ``u_i`` with epigraph block
        ``f_i(<a_i, x> + beta_i) <= u_i``; the constraint itself becomes the
        linear row ``sum alpha_i u_i + <g, x> + gamma <= 0``.
    objective_terms : sequence of Term
        Separable convex objective terms ``alpha f(<a, x> + beta)``; each
        gets an auxiliary with cost ``alpha`` (no extra linear row).
    linear_rows : sequence of (g, gamma)
        Plain rows ``<g, x> + gamma <= 0``.
    cone_rows : sequence of (block, G)
        Rows ``G x`` that must lie in ``block`` (shifts live in the block).

    Returns
    -------
    DomainDrivenProblem
        Variables are ``x`` followed by the auxiliaries in order of
        appearance; block order is cone rows, epigraph blocks, then one
        LinearBlock holding every linear row.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size != n:
        raise LiftError(f"c has length {c.size}, expected {n}")
    terms = [t for con in constraints for t in con.terms] + list(objective_terms)
    for t in terms:
        if t.alpha < 0:
            raise LiftError(f"term coefficient alpha={t.alpha} must be nonnegative")
        if len(t.a) != n:
            raise LiftError(f"term vector a has length {len(t.a)}, expected {n}")
    N = n + len(terms)

    rows, blocks = [], []
    for blk, G in cone_rows:
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if G.shape != (blk.dim, n):
            raise LiftError(f"cone row matrix has shape {G.shape}, expected {(blk.dim, n)}")
        rows.append(np.hstack([G, np.zeros((blk.dim, N - n))]))
        blocks.append(blk)

    for i, t in enumerate(terms):
        R = np.zeros((2, N))
        R[0, :n] = t.a
        R[1, n + i] = 1.0
        rows.append(R)
        blocks.append(t.block())

    lin_rows, lin_beta = [], []
    k = 0
    for con in constraints:
        if len(con.g) != n:
            raise LiftError(f"constraint vector g has length {len(con.g)}, expected {n}")
        r = np.zeros(N)
        r[:n] = con.g
        for t in con.terms:
            r[n + k] = t.alpha
            k += 1
        lin_rows.append(r)
        lin_beta.append(-float(con.gamma))
    for g, gamma in linear_rows:
        g = np.asarray(g, dtype=float).reshape(-1)
        if g.size != n:
            raise LiftError(f"linear row has length {g.size}, expected {n}")
        lin_rows.append(np.concatenate([g, np.zeros(N - n)]))
        lin_beta.append(-float(gamma))
    if lin_rows:
        rows.append(np.array(lin_rows))
        blocks.append(LinearBlock(lin_beta))
    if not blocks:
        raise LiftError("no constraints given")

    cost = np.concatenate([c, np.zeros(N - n)])
    for i, t in enumerate(objective_terms):
        cost[N - len(objective_terms) + i] = t.alpha
    return DomainDrivenProblem(np.vstack(rows), cost, direct_sum(blocks), z0)


# ----------------------------------------------------------------------------
# file format


class ProblemFormatError(ValueError):
    """Malformed problem document.  ``where`` is a field path or a
    ``line L column C`` location."""

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where


def _block_to_dict(blk):
    d = {"kind": blk.kind}
    d.update(blk.params())
    return d


def dumps(problem):
    """Serialize to a ``ddipm-problem v1`` JSON document."""
    bar = problem.barrier
    blocks = []
    for blk, (a, b) in zip(bar.blocks, zip(bar.offsets[:-1], bar.offsets[1:])):
        d = _block_to_dict(blk)
        d["rows"] = [a, b]
        blocks.append(d)
    doc = {
        "format": FORMAT_HEADER,
        "n": problem.n,
        "c": problem.c.tolist(),
        "blocks": blocks,
        "A": problem.A.tolist(),
        "z0": problem.z0.tolist(),
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def save(problem, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(problem))


def _vector(doc, key, where, length=None):
    if key not in doc:
        raise ProblemFormatError(f"{where}{key}", "missing field")
    v = doc[key]
    if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ProblemFormatError(f"{where}{key}", "expected a list of numbers")
    if length is not None and len(v) != length:
        raise ProblemFormatError(f"{where}{key}", f"expected {length} entries, got {len(v)}")
    return np.array(v, dtype=float)


def _matrix(v, where):
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise ProblemFormatError(where, "expected a list of rows")
    widths = {len(r) for r in v}
    if len(widths) > 1:
        raise ProblemFormatError(where, "rows have unequal lengths")
    for i, r in enumerate(v):
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in r):
            raise ProblemFormatError(f"{where}[{i}]", "expected numbers")
    return np.array(v, dtype=float)


def _block_from_dict(d, where):
    if not isinstance(d, dict):
        raise ProblemFormatError(where, "expected an object")
    kind = d.get("kind")
    if kind not in BLOCK_KINDS:
        raise ProblemFormatError(f"{where}.kind", f"unknown block kind {kind!r}; known: {sorted(BLOCK_KINDS)}")
    allowed = {"kind", "rows", "shift"} | {"linear": {"beta"}, "socp": {"n"}, "sdp": {"B"}, "power": {"p"}}.get(kind, set())
    extra = set(d) - allowed
    if extra:
        raise ProblemFormatError(f"{where}.{sorted(extra)[0]}", f"unexpected field for {kind} block")
    shift = _vector(d, "shift", where + ".") if "shift" in d else None
    try:
        if kind == "linear":
            return LinearBlock(_vector(d, "beta", where + "."))
        if kind == "socp":
            if not isinstance(d.get("n"), int):
                raise ProblemFormatError(f"{where}.n", "expected an integer")
            return SocpBlock(d["n"], shift=shift)
        if kind == "sdp":
            if "B" not in d:
                raise ProblemFormatError(f"{where}.B", "missing field")
            return SdpBlock(_matrix(d["B"], f"{where}.B"))
        if kind == "power":
            if not isinstance(d.get("p"), (int, float)):
                raise ProblemFormatError(f"{where}.p", "expected a number")
            return PowerBlock(d["p"], shift=shift)
        return BLOCK_KINDS[kind](shift=shift)
    except ProblemFormatError:
        raise
    except ValueError as exc:
        raise ProblemFormatError(where, str(exc)) from None


def loads(text):
    """Parse a ``ddipm-problem v1`` document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise ProblemFormatError("<root>", "expected an object")
    if doc.get("format") != FORMAT_HEADER:
        raise ProblemFormatError("format", f"expected {FORMAT_HEADER!r}, got {doc.get('format')!r}")
    extra = set(doc) - {"format", "n", "c", "blocks", "A", "z0"}
    if extra:
        raise ProblemFormatError(sorted(extra)[0], "unexpected field")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFormatError("n", "expected a positive integer")
    c = _vector(doc, "c", "", n)
    if not isinstance(doc.get("blocks"), list) or not doc["blocks"]:
        raise ProblemFormatError("blocks", "expected a nonempty list")
    blocks, row = [], 0
    for i, d in enumerate(doc["blocks"]):
        where = f"blocks[{i}]"
        blk = _block_from_dict(d, where)
        span = d.get("rows")
        if span is not None:
            if not (isinstance(span, list) and len(span) == 2 and all(isinstance(s, int) for s in span)):
                raise ProblemFormatError(f"{where}.rows", "expected [start, stop]")
            if span != [row, row + blk.dim]:
                raise ProblemFormatError(f"{where}.rows", f"expected [{row}, {row + blk.dim}] for a {blk.kind} block of dimension {blk.dim}")
        row += blk.dim
        blocks.append(blk)
    if "A" not in doc:
        raise ProblemFormatError("A", "missing field")
    A = _matrix(doc["A"], "A")
    if A.shape != (row, n):
        raise ProblemFormatError("A", f"expected shape ({row}, {n}), got {A.shape}")
    z0 = _vector(doc, "z0", "", row) if "z0" in doc else None
    return DomainDrivenProblem(A, c, direct_sum(blocks), z0)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
