"""Write a problem file, solve it through the command-line entry point,
and replay the trace."""

import json
import tempfile
from pathlib import Path

from ddipm import save
from ddipm.cli import read_trace, run
from ddipm.instances import random_lp

problem, _, _ = random_lp(4, seed=7)
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    save(problem, tmp / "lp.json")
    print((tmp / "lp.json").read_text()[:300], "...")
    code = run(["solve", str(tmp / "lp.json"), "--trace", str(tmp / "trace.csv")])
    print(f"exit code {code}")
    trace = read_trace(tmp / "trace.csv")
    n_pred = sum(r.phase == "predictor" for r in trace)
    print(f"{len(trace)} trace rows, {n_pred} predictors, final mu {trace[-1].mu:.3e}")
    print(json.dumps({"first": trace[0].__dict__, "last": trace[-1].__dict__}, indent=1))
