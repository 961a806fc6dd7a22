"""Command-line entry point.

Every command writes one record per computed quantity or checked
inequality. Exit status: 0 when every check passed (vacuous passes
included), 1 when some check failed, 2 for usage or distribution-spec
errors, 3 when a computation could not reach the requested accuracy
(records produced before the failure are still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Iterable, Iterator

from . import __version__
from .distributions import Distribution1D, make_family, parse_spec
from .divergences import chi_square_sq, rel_entropy
from .errors import AccuracyError, BracketError, DomainError, PositivityError, ShapeError, SpecError
from .family import DEFAULT_SEED, SUITES, run_suite
from .inequalities import (counterexample_gn, counterexample_shift, muckenhoupt_b, verify_prop1,
                           verify_prop2, verify_tchi_from_b)
from .mollification import contraction_sweep
from .numerics import DEFAULT_SETTINGS, QuadSettings
from .reports import InequalityReport, encode
from .tensorization import TensorConstantInput, random_rhogd_reports, tensor_constant
from .transport import METHODS, wasserstein

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ACCURACY = 0, 1, 2, 3


def _law(text: str) -> Distribution1D:
    return make_family(parse_spec(text))


def _settings(args) -> QuadSettings:
    d = DEFAULT_SETTINGS
    try:
        return QuadSettings(
            abs_tol=args.tol if args.tol is not None else d.abs_tol,
            rel_tol=args.rel_tol if args.rel_tol is not None else d.rel_tol,
            max_depth=args.max_depth if args.max_depth is not None else d.max_depth,
            trunc_q=args.trunc_q if args.trunc_q is not None else d.trunc_q,
        )
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def _record(check: str, s: QuadSettings, **fields) -> dict:
    return encode({"check": check, **fields, "settings": s.as_dict()})


def _reports(reports: Iterable[InequalityReport]) -> Iterator[dict]:
    for r in reports:
        yield r.to_dict()


def cmd_distance(args, s) -> Iterator[dict]:
    mu, nu = _law(args.mu), _law(args.nu)
    if args.method != "all":
        methods = (args.method,)
    elif args.q == 1:
        methods = ("quantile", "cdf_l1")
    elif args.q == 2:
        methods = ("quantile", "double_integral", "empirical")
    else:
        methods = ("quantile",)
    for method in methods:
        r = wasserstein(mu, nu, args.q, method, s, n_samples=args.samples)
        yield _record("distance", s, label=f"{args.mu} | {args.nu}", method=r.method, q=r.power,
                      value=r.value, est_error=r.est_error)


def cmd_divergence(args, s) -> Iterator[dict]:
    mu, nu = _law(args.mu), _law(args.nu)
    kinds = ("chi", "entropy") if args.kind == "both" else (args.kind,)
    for k in kinds:
        r = chi_square_sq(nu, mu, s) if k == "chi" else rel_entropy(nu, mu, s)
        yield _record("divergence", s, label=f"{args.nu} || {args.mu}", kind=r.kind, value=r.value,
                      abs_cont=r.abs_cont, est_error=r.est_error)


def cmd_muckenhoupt(args, s) -> Iterator[dict]:
    r = muckenhoupt_b(_law(args.mu), s)
    yield _record("muckenhoupt", s, label=args.mu, **r.as_dict())


def cmd_verify_chain(args, s) -> Iterator[dict]:
    mu, nu = _law(args.mu), _law(args.nu)
    label = f"{args.mu} | {args.nu}"
    b = muckenhoupt_b(mu, s)
    yield from _reports([verify_prop1(mu, nu, s, label=label),
                         verify_prop2(mu, nu, s, b=b, label=label),
                         verify_tchi_from_b(mu, nu, s, b=b, label=label)])


def cmd_counterexample(args, s) -> Iterator[dict]:
    if args.kind == "shift":
        rec = counterexample_shift(args.m, s)
    else:
        rec = counterexample_gn(args.n, s)
    data = rec.to_dict()
    checks = data.pop("checks")
    yield _record(f"counterexample_{args.kind}", s, passed=all(c["passed"] for c in checks), **data)
    yield from checks


def cmd_mollify_check(args, s) -> Iterator[dict]:
    yield from _reports(contraction_sweep(_law(args.mu), _law(args.nu), tuple(args.n), s,
                                          label=f"{args.mu} | {args.nu}"))


def cmd_tensorize(args, s) -> Iterator[dict]:
    inp = TensorConstantInput(args.C1, args.d1, args.C2, args.d2)
    yield _record("tensor_constant", s, C1=inp.C1, d1=inp.d1, C2=inp.C2, d2=inp.d2,
                  value=tensor_constant(inp))
    if args.rhogd:
        yield from _reports(random_rhogd_reports(args.rhogd, args.seed))


def cmd_suite(args, s) -> Iterator[dict]:
    reports = run_suite(args.name, s, args.seed)
    yield from _reports(sorted(reports, key=lambda r: (r.label, r.check)))


COMMANDS = {
    "distance": cmd_distance,
    "divergence": cmd_divergence,
    "muckenhoupt": cmd_muckenhoupt,
    "verify-chain": cmd_verify_chain,
    "counterexample": cmd_counterexample,
    "mollify-check": cmd_mollify_check,
    "tensorize": cmd_tensorize,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("numerics")
    g.add_argument("--tol", type=float, help=f"absolute quadrature tolerance (default {DEFAULT_SETTINGS.abs_tol:g})")
    g.add_argument("--rel-tol", type=float, help=f"relative quadrature tolerance (default {DEFAULT_SETTINGS.rel_tol:g})")
    g.add_argument("--trunc-q", type=float, help=f"tail mass cut from unbounded domains (default {DEFAULT_SETTINGS.trunc_q:g})")
    g.add_argument("--max-depth", type=int, help=f"bisection limit per panel (default {DEFAULT_SETTINGS.max_depth})")
    common.add_argument("--output", choices=("json", "csv", "human"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"seed for randomized checks (default {DEFAULT_SEED})")

    p = argparse.ArgumentParser(prog="transport-chi", description="One-dimensional transport and "
                                "chi-square inequality toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    law_help = "distribution: shorthand like 'laplace(0,1)', inline JSON, or a .json file"

    d = sub.add_parser("distance", parents=[common], help="Wasserstein distance W_q(mu, nu)")
    d.add_argument("--mu", required=True, help=law_help)
    d.add_argument("--nu", required=True, help=law_help)
    d.add_argument("--q", type=int, default=2)
    d.add_argument("--method", choices=METHODS + ("all",), default="quantile")
    d.add_argument("--samples", type=int, default=10_000, help="sample size for --method empirical")

    v = sub.add_parser("divergence", parents=[common], help="chi-square / entropy of nu relative to mu")
    v.add_argument("--mu", required=True, help=law_help)
    v.add_argument("--nu", required=True, help=law_help)
    v.add_argument("--kind", choices=("chi", "entropy", "both"), default="both")

    m = sub.add_parser("muckenhoupt", parents=[common], help="Muckenhoupt constant b of mu")
    m.add_argument("--mu", required=True, help=law_help)

    c = sub.add_parser("verify-chain", parents=[common], help="W2^2 <= 4 int (F-G)^2/f <= 16 b chi2")
    c.add_argument("--mu", required=True, help=law_help)
    c.add_argument("--nu", required=True, help=law_help)

    x = sub.add_parser("counterexample", help="shifted Laplace or g_n counterexample")
    xs = x.add_subparsers(dest="kind", required=True)
    xm = xs.add_parser("shift", parents=[common])
    xm.add_argument("--m", type=float, default=1.0)
    xg = xs.add_parser("gn", parents=[common])
    xg.add_argument("--n", type=int, default=4)

    o = sub.add_parser("mollify-check", parents=[common], help="contraction under Gaussian mollification")
    o.add_argument("--mu", required=True, help=law_help)
    o.add_argument("--nu", required=True, help=law_help)
    o.add_argument("--n", type=float, nargs="+", default=[1.0, 10.0, 100.0])

    t = sub.add_parser("tensorize", parents=[common], help="constant for a product of two laws")
    t.add_argument("--C1", type=float, required=True)
    t.add_argument("--d1", type=int, default=1)
    t.add_argument("--C2", type=float, required=True)
    t.add_argument("--d2", type=int, default=1)
    t.add_argument("--rhogd", type=int, default=0, metavar="COUNT",
                   help="also check the density lemma on COUNT random grids")

    su = sub.add_parser("suite", parents=[common], help="run a built-in property suite")
    su.add_argument("name", choices=SUITES)
    return p


def _flatten(rec: dict) -> dict:
    return {k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v) for k, v in rec.items()}


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if fmt == "csv":
        rows = [_flatten(r) for r in records]
        cols = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()
    lines = []
    for r in records:
        status = ""
        if "passed" in r:
            status = "PASS" if r["passed"] else "FAIL"
            if r.get("vacuous"):
                status += " (vacuous)"
        skip = {"check", "label", "settings", "details", "passed", "vacuous", "lhs_label", "rhs_label"}
        body = ", ".join(f"{k}={_human(v)}" for k, v in sorted(r.items()) if k not in skip)
        if "lhs_label" in r:
            body = f"{r['lhs_label']} = {_human(r['lhs'])} <= {r['rhs_label']} = {_human(r['rhs'])}"
        lines.append(" ".join(p for p in (status, r.get("check", ""), r.get("label", ""), body) if p))
    return "".join(line + "\n" for line in lines)


def _human(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _status(records: list[dict]) -> int:
    flags = [r["passed"] for r in records if "passed" in r]
    return EXIT_OK if all(flags) else EXIT_FAIL


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    records: list[dict] = []
    try:
        s = _settings(args)
        for rec in COMMANDS[args.command](args, s):
            records.append(rec)
    except (SpecError, ShapeError, DomainError, PositivityError, BracketError) as exc:
        stdout.write(render(records, args.output))
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        stdout.write(render(records, args.output))
        print(f"accuracy not reached: {exc}", file=stderr)
        return EXIT_ACCURACY
    stdout.write(render(records, args.output))
    return _status(records)


__all__ = ["COMMANDS", "EXIT_ACCURACY", "EXIT_FAIL", "EXIT_OK", "EXIT_USAGE", "build_parser", "main", "render"]
