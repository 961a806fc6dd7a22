import csv
import io
import json
import subprocess
import sys

import pytest

from transport_chi import cli
from transport_chi.errors import AccuracyError


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_distance_example():
    code, out, _ = run("distance", "--q", "2", "--mu", "laplace(0,1)", "--nu", "laplace(1,1)")
    assert code == 0
    (rec,) = records(out)
    assert rec["value"] == pytest.approx(1.0, rel=1e-9)
    assert rec["settings"] == {"abs_tol": 1e-10, "rel_tol": 1e-8, "max_depth": 60, "trunc_q": 1e-9}


def test_distance_all_methods_and_overrides():
    code, out, _ = run("distance", "--mu", "gaussian(0,1)", "--nu", "gaussian(1,1)", "--method", "all",
                       "--tol", "1e-9", "--trunc-q", "1e-8", "--max-depth", "40", "--samples", "1000")
    assert code == 0
    recs = records(out)
    assert [r["method"] for r in recs] == ["quantile", "double_integral", "empirical"]
    assert all(abs(r["value"] - 1.0) < 1e-2 for r in recs)
    assert recs[0]["settings"]["abs_tol"] == 1e-9 and recs[0]["settings"]["max_depth"] == 40


def test_verify_chain_example():
    code, out, _ = run("verify-chain", "--mu", "laplace(0,1)", "--nu", "gaussian(0.3,1)")
    assert code == 0
    recs = records(out)
    assert [r["check"] for r in recs] == ["prop1", "prop2", "tchi_16b"]
    assert all(r["passed"] for r in recs)
    for key in ("check", "lhs", "rhs", "constant", "margin", "passed", "vacuous", "settings"):
        assert key in recs[0]


def test_counterexample_gn_example():
    code, out, _ = run("counterexample", "gn", "--n", "4")
    assert code == 0
    head, *checks = records(out)
    assert {"chi_sq", "chi_lb", "fg_int", "fg_ub"} <= set(head)
    assert head["chi_sq"] > head["chi_lb"] and head["fg_int"] <= head["fg_ub"]
    assert len(checks) == 3 and head["passed"]


def test_counterexample_shift():
    code, out, _ = run("counterexample", "shift", "--m", "2")
    head = records(out)[0]
    assert code == 0 and head["w2_sq"] == 4.0


def test_divergence_infinity_encoding():
    code, out, _ = run("divergence", "--mu", "gaussian(0,1)", "--nu", "laplace(0,1)", "--kind", "chi")
    assert code == 0
    (rec,) = records(out)
    assert rec["value"] == "inf" and rec["abs_cont"] is True


def test_muckenhoupt_command():
    code, out, _ = run("muckenhoupt", "--mu", "uniform(0,1)")
    assert code == 0 and records(out)[0]["b"] == pytest.approx(1 / 16)


def test_mollify_and_tensorize():
    code, out, _ = run("mollify-check", "--mu", "gaussian(0,1)", "--nu", "gaussian(1,1)", "--n", "1", "10")
    assert code == 0 and len(records(out)) == 6
    code, out, _ = run("tensorize", "--C1", "1", "--C2", "1", "--rhogd", "20", "--seed", "7")
    recs = records(out)
    assert code == 0 and recs[0]["value"] == pytest.approx(4.2360679775)
    assert len(recs) == 21


@pytest.mark.parametrize("argv", [
    ("distance", "--mu", "gaussian(0,-1)", "--nu", "gaussian(0,1)"),
    ("distance", "--mu", "nonsense(", "--nu", "gaussian(0,1)"),
    ("suite", "nope"),
    ("distance", "--mu", "gaussian(0,1)", "--nu", "gaussian(0,1)", "--tol", "-1"),
    ("tensorize", "--C1", "0", "--C2", "1"),
    (),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == cli.EXIT_USAGE


def test_failed_check_exit(monkeypatch):
    def failing(args, s):
        yield {"check": "x", "passed": True}
        yield {"check": "y", "passed": False}
    monkeypatch.setitem(cli.COMMANDS, "muckenhoupt", failing)
    assert run("muckenhoupt", "--mu", "gaussian(0,1)")[0] == cli.EXIT_FAIL


def test_accuracy_exit_keeps_partial_output(monkeypatch):
    def partial(args, s):
        yield {"check": "first", "value": 1.0}
        raise AccuracyError("budget", 2.0, 0.1)
    monkeypatch.setitem(cli.COMMANDS, "muckenhoupt", partial)
    code, out, err = run("muckenhoupt", "--mu", "gaussian(0,1)")
    assert code == cli.EXIT_ACCURACY
    assert records(out) == [{"check": "first", "value": 1.0}]
    assert "accuracy" in err


def test_byte_identical_runs():
    argv = ("tensorize", "--C1", "2", "--C2", "0.5", "--d2", "3", "--rhogd", "40", "--seed", "11")
    assert run(*argv)[1] == run(*argv)[1]
    chain = ("verify-chain", "--mu", "gaussian(0,1)", "--nu", "mix(0.5*gaussian(-1,1),0.5*gaussian(1,1))")
    assert run(*chain)[1] == run(*chain)[1]


def test_csv_matches_json():
    argv = ["verify-chain", "--mu", "laplace(0,1)", "--nu", "laplace(0.5,1)"]
    js = records(run(*argv)[1])
    rows = list(csv.DictReader(io.StringIO(run(*argv, "--output", "csv")[1])))
    assert len(rows) == len(js)
    for rec, row in zip(js, rows):
        for key in ("lhs", "rhs", "margin", "tol"):
            assert f"{float(row[key]):.12g}" == f"{rec[key]:.12g}"


def test_human_output():
    code, out, _ = run("verify-chain", "--mu", "gaussian(0,1)", "--nu", "gaussian(0.5,1)", "--output", "human")
    assert code == 0
    assert out.count("PASS") == 3


def test_suite_tensor_seed():
    code, out, _ = run("suite", "tensor", "--seed", "7")
    recs = records(out)
    assert code == 0
    assert sum(r["check"] == "rhogd" for r in recs) == 1000
    assert all(r["passed"] for r in recs)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "transport_chi", "distance", "--mu", "laplace(0,1)",
                           "--nu", "laplace(2,1)", "--output", "human"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "value=2" in proc.stdout
