"""Command-line front end.

Subcommands: eval, lln, clt, gnormal, counterexample, check-independence,
diagnose, enlarge.  Models come from JSON files (see the schemas in
measures.py / independence.py); test functions are expressions over the
phi grammar.  Exit codes: 0 success, 1 usage, 2 invalid model,
3 numerical failure, 4 model-too-large.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import limits
from .errors import SublinError, UsageError
from .gheat import GParams, GridConfig, g_normal_expectation, gaussian_quadrature
from .independence import (
    check_peng_independence,
    check_pseudo_independence,
    enlarge_vertices,
    load_joint_model,
)
from .limits import ExperimentTable, _fmt, moment_summary
from .measures import NumericMode, load_ambiguity_set
from .phi import parse_phi
from .recursion import StepSequence, sublinear_eval_sum


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _mode(args) -> NumericMode:
    return NumericMode.EXACT if args.exact else NumericMode.FLOAT64


def _grid(args) -> GridConfig:
    return GridConfig(dx=args.dx, cfl=args.cfl, domain=args.domain, T=args.T)


def _schedule(text: str):
    try:
        ns = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise UsageError(f"bad n-schedule {text!r}") from e
    if not ns or any(n < 1 for n in ns) or ns != sorted(set(ns)):
        raise UsageError("n-schedule must be strictly increasing positive integers")
    return ns


def _emit_table(table: ExperimentTable, args):
    for row in table:
        print(f"n={row.n} value={_fmt(row.value)} prediction={_fmt(row.prediction)} "
              f"gap={_fmt(row.gap)}")
    if args.out:
        table.to_csv(args.out)
    if args.json:
        table.to_json(args.json)


def _add_common(p, grid=False):
    p.add_argument("--exact", action="store_true", help="exact-rational mode")
    p.add_argument("--out", metavar="PATH", help="write the result table as CSV")
    p.add_argument("--json", metavar="PATH", help="write a JSON report")
    if grid:
        p.add_argument("--dx", type=float, default=0.01)
        p.add_argument("--cfl", type=float, default=0.4)
        p.add_argument("--domain", type=float, default=None, metavar="L")
        p.add_argument("--T", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sublin", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("eval", help="single DP value of E[phi(S_n)] (scaled)")
    q.add_argument("--model", required=True, help="measures JSON file")
    q.add_argument("--phi", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--normalize", choices=["none", "n", "sqrt-n"], default="none")
    q.add_argument("--lower", action="store_true", help="lower instead of upper")
    _add_common(q)

    q = sub.add_parser("lln", help="LLN experiment table over an n-schedule")
    q.add_argument("--model", required=True)
    q.add_argument("--phi", required=True)
    q.add_argument("--n-schedule", default="16,32,64,128,256,512,1024")
    _add_common(q)

    q = sub.add_parser("clt", help="CLT experiment table against the G-heat PDE")
    q.add_argument("--model", required=True)
    q.add_argument("--phi", required=True)
    q.add_argument("--n-schedule", default="25,100,400")
    q.add_argument("--truncate-sqrt-n", action="store_true",
                   help="clip step atoms to [-sqrt(n), sqrt(n)] first")
    _add_common(q, grid=True)

    q = sub.add_parser("gnormal", help="G-normal expectation via the PDE solver")
    q.add_argument("--sigma-lo", type=float, required=True)
    q.add_argument("--sigma-hi", type=float, required=True)
    q.add_argument("--phi", required=True)
    _add_common(q, grid=True)

    q = sub.add_parser("counterexample", help="LLN/CLT failure counterexamples on the heavy-tail family")
    q.add_argument("--which", choices=["lln", "clt"], required=True)
    q.add_argument("--K", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--clamp", type=float, default=None,
                   help="bounded-modification level M (default: 2 for lln, 1 for clt)")
    _add_common(q)

    q = sub.add_parser("check-independence", help="pseudo/Peng independence checks")
    q.add_argument("--config", required=True, help="joint-model JSON file")
    q.add_argument("--mode", choices=["pseudo", "peng-probe", "peng-exact"],
                   required=True)
    q.add_argument("--step", type=int, default=None,
                   help="step n to check (default: last variable)")
    _add_common(q)

    q = sub.add_parser("diagnose", help="H1/H2 and Cesaro moment tables")
    q.add_argument("--model", help="measures JSON file")
    q.add_argument("--counterexample-K", type=int, default=None,
                   help="diagnose the exact counterexample family instead")
    q.add_argument("--n-max", type=int, default=10000)
    _add_common(q)

    q = sub.add_parser("enlarge", help="dump the enlargement's vertex joints")
    q.add_argument("--config", required=True, help="joint-model JSON file")
    _add_common(q)
    return p


def _cmd_eval(args):
    mode = _mode(args)
    aset = load_ambiguity_set(args.model, mode)
    phi = parse_phi(args.phi)
    seq = StepSequence.iid(aset, args.n, mode)
    exact = mode is NumericMode.EXACT
    if args.normalize == "n":
        scale = Fraction(args.n) if exact else float(args.n)
    elif args.normalize == "sqrt-n":
        scale = limits._exact_sqrt(args.n) if exact else math.sqrt(args.n)
    else:
        scale = 1
    direction = "lower" if args.lower else "upper"
    value = sublinear_eval_sum(seq, lambda s: phi(s / scale, exact=exact), direction)
    print(f"value={_fmt(value)}")
    _dump_json(args, {"value": _fmt(value)})
    return 0


def _cmd_lln(args):
    aset = load_ambiguity_set(args.model, _mode(args))
    phi = parse_phi(args.phi)
    table = limits.lln_experiment(aset, phi, _schedule(args.n_schedule), _mode(args))
    _emit_table(table, args)
    return 0


def _cmd_clt(args):
    aset = load_ambiguity_set(args.model, _mode(args))
    phi = parse_phi(args.phi)
    table = limits.clt_experiment(
        aset,
        phi,
        _schedule(args.n_schedule),
        grid=_grid(args),
        truncate_sqrt_n=args.truncate_sqrt_n,
        mode=_mode(args),
    )
    _emit_table(table, args)
    return 0


def _cmd_gnormal(args):
    phi = parse_phi(args.phi)
    params = GParams(args.sigma_lo, args.sigma_hi)
    value = g_normal_expectation(phi, params, _grid(args))
    print(f"value={value:.17g}")
    if params.sigma_lo == params.sigma_hi:
        oracle = gaussian_quadrature(phi, params.sigma_hi)
        print(f"quadrature={oracle:.17g}")
    _dump_json(args, {"value": value})
    return 0


def _cmd_counterexample(args):
    mode = _mode(args)
    if args.which == "lln":
        clamp = 2.0 if args.clamp is None else args.clamp
        value, bound = limits.prop62_experiment(args.K, args.n, clamp, mode)
        classical = 0.0  # phi(1): the classical LLN prediction for E[X^2] = 1
        print(f"value={_fmt(value)} lower-bound={_fmt(bound)} "
              f"classical-reference={classical:.17g} robust-limit=1")
        _dump_json(args, {"value": _fmt(value), "lower_bound": _fmt(bound),
                          "classical_reference": classical, "robust_limit": 1})
    else:
        clamp = 1.0 if args.clamp is None else args.clamp
        value, bound = limits.prop63_experiment(args.K, args.n, clamp, mode)
        classical = 1.0 - math.sqrt(2.0 / math.pi)
        print(f"value={_fmt(value)} lower-bound={_fmt(bound)} "
              f"classical-reference={classical:.17g} robust-limit=1")
        _dump_json(args, {"value": _fmt(value), "lower_bound": _fmt(bound),
                          "classical_reference": classical, "robust_limit": 1})
    return 0


def _fmt_witness(v):
    if isinstance(v, (int, float, Fraction)) and not isinstance(v, bool):
        return _fmt(v)
    return str(v)


def _cmd_check_independence(args):
    model = load_joint_model(args.config, _mode(args))
    step = args.step if args.step is not None else model.n_variables
    if args.mode == "pseudo":
        report = check_pseudo_independence(model, step)
    elif args.mode == "peng-probe":
        report = check_peng_independence(model, step, mode="probe")
    else:
        report = check_peng_independence(model, step, mode="exact")
    print(f"verdict={'true' if report.verdict else 'false'} gap={_fmt(report.gap)}")
    if report.witness:
        parts = " ".join(f"{k}={_fmt_witness(v)}" for k, v in report.witness.items())
        print(f"witness: {parts}")
    _dump_json(args, {"verdict": report.verdict, "gap": _fmt(report.gap),
                      "witness": {k: _fmt_witness(v) for k, v in report.witness.items()}
                      if report.witness else None})
    return 0


def _cmd_diagnose(args):
    mode = _mode(args)
    if args.counterexample_K is not None:
        aset = limits.counterexample_family(args.counterexample_K)
    elif args.model:
        aset = load_ambiguity_set(args.model, mode)
    else:
        raise UsageError("diagnose needs --model or --counterexample-K")
    summary = moment_summary(StepSequence.iid(aset, 1, mode), args.n_max)
    print(f"mu=[{_fmt(summary.mu_lo)}, {_fmt(summary.mu_bar)}] "
          f"sigma2=[{_fmt(summary.sigma2_lo)}, {_fmt(summary.sigma2_bar)}]")
    print("n,nV(|X|>=n),nV(X^2>=n),cesaro")
    lines = []
    for (n, a), (_, s), (_, c) in zip(summary.tail_abs, summary.tail_sq, summary.cesaro):
        line = f"{n},{_fmt(a)},{_fmt(s)},{_fmt(c)}"
        lines.append(line)
        print(line)
    print(f"H1-decaying={summary.h1_decaying} H2-decaying={summary.h2_decaying}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("n,tail_abs,tail_sq,cesaro\n")
            fh.write("\n".join(lines) + "\n")
    _dump_json(args, {
        "mu": [_fmt(summary.mu_lo), _fmt(summary.mu_bar)],
        "sigma2": [_fmt(summary.sigma2_lo), _fmt(summary.sigma2_bar)],
        "h1_decaying": summary.h1_decaying,
        "h2_decaying": summary.h2_decaying,
    })
    return 0


def _cmd_enlarge(args):
    model = load_joint_model(args.config, _mode(args))
    enlarged = enlarge_vertices(model)
    print(f"vertices={len(enlarged.tables)}")
    doc = {
        "variables": list(enlarged.variable_names),
        "supports": [[_fmt(x) for x in s] for s in enlarged.supports],
        "measures": [{"table": [_fmt(w) for w in t]} for t in enlarged.tables],
    }
    for i, t in enumerate(enlarged.tables):
        print(f"vertex {i}: " + " ".join(_fmt(w) for w in t))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return 0


_DISPATCH = {
    "eval": _cmd_eval,
    "lln": _cmd_lln,
    "clt": _cmd_clt,
    "gnormal": _cmd_gnormal,
    "counterexample": _cmd_counterexample,
    "check-independence": _cmd_check_independence,
    "diagnose": _cmd_diagnose,
    "enlarge": _cmd_enlarge,
}


def _dump_json(args, doc):
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def threads_cap() -> int:
    """Parallelism cap from SUBLIN_THREADS (engine modules stay sequential
    below this; numpy obeys its own env vars)."""
    try:
        return max(1, int(os.environ.get("SUBLIN_THREADS", "1")))
    except ValueError:
        return 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _DISPATCH[args.command](args)
    except SublinError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
