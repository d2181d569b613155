import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ddipm import instances
from ddipm.cli import main, read_trace, report_from_dict, report_to_dict, run, write_trace
from ddipm.problem import DomainDrivenProblem, save
from ddipm.barriers import LinearBlock
from ddipm.solver import Status, solve


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, p in [
        ("lp1", instances.lp_1d()),
        ("infeas", instances.infeasible_lp()),
        ("unb", instances.unbounded_lp()),
        ("two", instances.lp_two_var()),
    ]:
        path = tmp_path / f"{name}.prob"
        save(p, path)
        out[name] = str(path)
    return out


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _structured(argv):
    code, out, _ = _run(argv + ["--format", "structured"])
    return code, json.loads(out)


def test_solve_lp1(files):
    code, out, _ = _run(["solve", files["lp1"]])
    assert code == 0
    assert "Optimal" in out
    code, doc = _structured(["solve", files["lp1"]])
    assert doc["objective"] == pytest.approx(-1.0, abs=1e-6)
    assert doc["format"] == "ddipm-report v1"


def test_solve_infeasible_prints_certificate(files):
    code, out, _ = _run(["solve", files["infeas"]])
    assert code == 1
    assert "Infeasible" in out and "certificate" in out


def test_solve_unbounded(files):
    code, out, _ = _run(["solve", files["unb"]])
    assert code == 2 and "ray" in out


def test_limits_exit_three(files):
    assert _run(["solve", files["two"], "--max-iter", "1"])[0] == 3
    assert _run(["solve", files["two"], "--mu-max", "10", "--eps-gap", "1e-300", "--eps-feas", "1e-300"])[0] == 3


def test_eps_gap_monotone(files):
    _, loose = _structured(["solve", files["lp1"], "--eps-gap", "1e-4", "--eps-feas", "1e-4"])
    _, tight = _structured(["solve", files["lp1"], "--eps-gap", "1e-10", "--eps-feas", "1e-10"])
    assert loose["status"] == tight["status"] == "Optimal"
    assert loose["iterations"] < tight["iterations"]


def test_all_flags_accepted(files):
    argv = ["solve", files["two"], "--xi", "3", "--delta1", "0.04", "--delta2", "0.4", "--eps-gap", "1e-7",
            "--eps-feas", "1e-7", "--eps-cert", "1e-7", "--max-iter", "300", "--mu-max", "1e11"]
    assert _run(argv)[0] == 0


def test_strict_flag(files):
    code, doc = _structured(["solve", files["lp1"], "--strict", "--max-iter", "20000"])
    assert code == 0 and doc["status"] == "Optimal"


@pytest.mark.parametrize(
    "extra",
    [["--bogus"], ["--delta1", "0.2"], ["--xi", "1"], ["--max-iter", "x"], ["--format", "xml"]],
)
def test_bad_flags_exit_four(files, extra):
    code, _, err = _run(["solve", files["lp1"]] + extra)
    assert code == 4 and err


def test_missing_subcommand_and_file(tmp_path):
    assert _run([])[0] == 4
    code, _, err = _run(["solve", str(tmp_path / "nope.prob")])
    assert code == 4 and "nope.prob" in err


def test_parse_error_context(tmp_path):
    path = tmp_path / "bad.prob"
    path.write_text('{\n  "format": "ddipm-problem v1",\n  "n": 1\n  "c": [1]\n}')
    code, _, err = _run(["solve", str(path)])
    assert code == 4 and "line 4" in err
    path.write_text(json.dumps({"format": "ddipm-problem v1", "n": 1, "c": [1], "blocks": [{"kind": "donut"}], "A": [[1]]}))
    code, _, err = _run(["solve", str(path)])
    assert code == 4 and "blocks[0].kind" in err


def test_invalid_problem_exit_four(tmp_path):
    path = tmp_path / "rank.prob"
    save(DomainDrivenProblem([[1.0, 1.0], [1.0, 1.0]], [1.0, 0.0], [LinearBlock([1.0, 1.0])]), path)
    code, _, err = _run(["solve", str(path)])
    assert code == 4 and "rank" in err


def test_structured_round_trip(files):
    _, doc = _structured(["solve", files["two"]])
    rep = report_from_dict(json.loads(json.dumps(doc)))
    direct = solve(instances.lp_two_var())
    assert rep.status is direct.status is Status.OPTIMAL
    np.testing.assert_array_equal(rep.x, direct.x)
    np.testing.assert_array_equal(rep.y, direct.y)
    assert rep.trace == direct.trace
    assert report_to_dict(rep) == doc


def test_trace_csv(files, tmp_path):
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    _run(["solve", files["two"], "--trace", str(t1)])
    _run(["solve", files["two"], "--trace", str(t2)])
    text = t1.read_text()
    assert text.splitlines()[0] == "iter,phase,mu,omega,tau,alpha2,gap_lo,gap_hi"
    assert text == t2.read_text()
    direct = solve(instances.lp_two_var())
    assert read_trace(t1) == direct.trace


def test_trace_csv_exact_doubles(tmp_path):
    rep = solve(instances.random_lp(3, seed=2)[0])
    path = tmp_path / "t.csv"
    write_trace(rep.trace, path)
    assert read_trace(path) == rep.trace


def test_main_exits_with_code(files):
    with pytest.raises(SystemExit) as exc:
        main(["solve", files["infeas"], "--format", "structured"])
    assert exc.value.code == 1


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "ddipm.cli", "solve", files["lp1"]], capture_output=True, text=True)
    assert proc.returncode == 0 and "Optimal" in proc.stdout
