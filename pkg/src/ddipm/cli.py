"""Command-line front end: ``ddipm solve FILE [options]``.

Exit codes: 0 optimal, 1 infeasible, 2 unbounded, 3 iteration or mu limit,
4 input error, 5 numerical failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .problem import ProblemFormatError, ValidationError, load
from .solver import Settings, SolveReport, Status, TraceRecord, solve

__all__ = ["main", "run", "report_to_dict", "report_from_dict", "write_trace", "read_trace", "EXIT_CODES"]

REPORT_FORMAT = "ddipm-report v1"

EXIT_CODES = {
    Status.OPTIMAL: 0,
    Status.INFEASIBLE: 1,
    Status.UNBOUNDED: 2,
    Status.MU_LIMIT: 3,
    Status.ITER_LIMIT: 3,
    Status.NUMERICAL_FAILURE: 5,
}
EXIT_INPUT = 4

_VECTORS = ("x", "y", "y_hat", "certificate", "ray")
_SCALARS = ("tau", "mu", "objective", "gap_lower", "gap_upper", "certificate_residual", "certificate_support")
_COUNTS = ("iterations", "predictors", "correctors")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit with status 2, which is taken by Unbounded
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _parser():
    p = _Parser(prog="ddipm", description="Domain-driven predictor-corrector interior-point solver.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file", help="problem file (JSON, format 'ddipm-problem v1')")
    d = Settings()
    s.add_argument("--xi", type=float, default=d.xi)
    s.add_argument("--delta1", type=float, default=d.delta1)
    s.add_argument("--delta2", type=float, default=d.delta2)
    s.add_argument("--eps-gap", type=float, default=d.eps_gap)
    s.add_argument("--eps-feas", type=float, default=d.eps_feas)
    s.add_argument("--eps-cert", type=float, default=d.eps_cert)
    s.add_argument("--max-iter", type=int, default=d.max_iter)
    s.add_argument("--mu-max", type=float, default=d.mu_max)
    s.add_argument("--strict", action="store_true", help="theoretical neighborhoods and fixed corrector step")
    s.add_argument("--trace", metavar="PATH", help="write per-iteration CSV")
    s.add_argument("--format", choices=("text", "structured"), default="text")
    return p


def _settings(ns):
    return Settings(
        xi=ns.xi,
        delta1=ns.delta1,
        delta2=ns.delta2,
        eps_gap=ns.eps_gap,
        eps_feas=ns.eps_feas,
        eps_cert=ns.eps_cert,
        mu_max=ns.mu_max,
        max_iter=ns.max_iter,
        strict=ns.strict,
    )


def _list(v):
    return None if v is None else [float(t) for t in np.asarray(v).ravel()]


def report_to_dict(rep):
    """JSON-ready dict; floats survive ``json`` round trips exactly."""
    out = {"format": REPORT_FORMAT, "status": str(rep.status), "message": rep.message}
    for k in _COUNTS:
        out[k] = int(getattr(rep, k))
    for k in _SCALARS:
        v = getattr(rep, k)
        out[k] = None if v is None else float(v)
    for k in _VECTORS:
        out[k] = _list(getattr(rep, k))
    out["trace"] = [[getattr(r, f) for f in TraceRecord.FIELDS] for r in rep.trace]
    return out


def report_from_dict(doc):
    if doc.get("format") != REPORT_FORMAT:
        raise ValueError(f"expected format {REPORT_FORMAT!r}")
    kw = {"status": Status(doc["status"]), "message": doc.get("message", "")}
    for k in _COUNTS + _SCALARS:
        kw[k] = doc.get(k)
    for k in _VECTORS:
        v = doc.get(k)
        kw[k] = None if v is None else np.array(v, dtype=float)
    kw["trace"] = [TraceRecord(*row) for row in doc.get("trace", [])]
    return SolveReport(**kw)


def _g17(v):
    return "%.17g" % v


def write_trace(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TraceRecord.FIELDS)
        for r in trace:
            w.writerow([r.iter, r.phase] + [_g17(getattr(r, f)) for f in TraceRecord.FIELDS[2:]])


def read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        TraceRecord(int(r["iter"]), r["phase"], *(float(r[f]) for f in TraceRecord.FIELDS[2:]))
        for r in rows
    ]


def _vec(v):
    return "[" + ", ".join("%.10g" % t for t in v) + "]"


def _text(rep):
    lines = [
        f"status      {rep.status}",
        f"objective   {rep.objective:.12g}",
        f"tau         {rep.tau:.6g}",
        f"mu          {rep.mu:.6g}",
        f"iterations  {rep.iterations} ({rep.predictors} predictor, {rep.correctors} corrector)",
        f"gap bounds  [{rep.gap_lower:.6g}, {rep.gap_upper:.6g}]",
    ]
    if rep.status is Status.OPTIMAL:
        lines.append(f"x           {_vec(rep.x)}")
        lines.append(f"y/tau       {_vec(rep.y_hat)}")
    if rep.status is Status.INFEASIBLE:
        lines.append(f"certificate {_vec(rep.certificate)}")
        lines.append(f"  |A^T y|   {rep.certificate_residual:.3e}")
        lines.append(f"  support  <= {rep.certificate_support:.6g}")
    if rep.status is Status.UNBOUNDED:
        lines.append(f"ray         {_vec(rep.ray)}")
    if rep.message:
        lines.append(f"note        {rep.message}")
    return "\n".join(lines)


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, solve, print a report; return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = _parser().parse_args(argv)
        settings = _settings(ns)
        problem = load(ns.file)
    except CliError as exc:
        print(exc, file=stderr)
        return EXIT_INPUT
    except (ProblemFormatError, ValueError) as exc:
        print(f"ddipm: {exc}", file=stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"ddipm: cannot read {exc.filename}: {exc.strerror}", file=stderr)
        return EXIT_INPUT
    try:
        rep = solve(problem, settings)
    except ValidationError as exc:
        print(f"ddipm: {exc}", file=stderr)
        return EXIT_INPUT
    if ns.trace:
        write_trace(rep.trace, ns.trace)
    if ns.format == "structured":
        print(json.dumps(report_to_dict(rep)), file=stdout)
    else:
        print(_text(rep), file=stdout)
    return EXIT_CODES[rep.status]


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
