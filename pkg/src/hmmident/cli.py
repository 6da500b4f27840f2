"""Command-line front end.

Exit codes: 0 affirmative, 1 negative, 2 input or internal error,
3 construction unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .casestudy import run_casestudy
from .hmm import ConvergenceError, HmmParams, MultiHmmParams, equivalent
from .identifiability import (
    ConstructionError,
    Verdict,
    construct_rank1_recombination,
    construct_state_inflation,
    verdict_multi,
    verdict_nonstationary,
    verdict_single,
)
from .matrix import DEFAULT_TOL, InputError, Tolerance
from .nstar import VARIANTS, canonical_variant, n_star, vandermonde_witness

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR, EXIT_UNAVAILABLE = 0, 1, 2, 3
_STATUS = {EXIT_OK: "affirmative", EXIT_NEGATIVE: "negative", EXIT_ERROR: "error",
           EXIT_UNAVAILABLE: "unavailable"}

SETTINGS = ("auto", "single", "homogeneous", "heterogeneous", "non-stationary")


class _Unavailable(Exception):
    pass


def _rows1(cert) -> str:
    return "full" if cert is None else "{" + ",".join(str(i + 1) for i in cert) + "}"


def _cli_tol(args) -> Tolerance | None:
    rel = getattr(args, "tol_rel", None)
    ab = getattr(args, "tol_abs", None)
    if rel is None and ab is None:
        return None
    return Tolerance(DEFAULT_TOL.rel_eps if rel is None else rel,
                     DEFAULT_TOL.abs_eps if ab is None else ab)


def _verdict_lines(v: Verdict) -> list[str]:
    c = v.condition_value
    lines = [
        f"setting: {v.setting}",
        f"verdict: {'identifiable' if v.identifiable else 'NOT identifiable'}",
        f"governing krank: {c.value} of q={v.required} (dependent rows {_rows1(c.certificate)})",
    ]
    for name, k in v.factor_kranks.items():
        lines.append(f"  krank({name}) = {k.value} (dependent rows {_rows1(k.certificate)})")
    s = v.sufficient_sum_check
    if s is not None:
        lines.append(f"sum route: {s.detail} -> lower bound {s.lower}, "
                     f"{'fires' if v.sum_route_fired else 'does not fire'}")
    for r in v.reasons:
        lines.append(f"reason: {r}")
    if not v.identifiable:
        lines.append("counterexample: " + ("available (rank-1 recombination)"
                                           if v.counterexample is not None else
                                           "not constructed; certificate-only evidence"))
    return lines


def _dispatch(mf: io.ModelFile, setting: str):
    m, tol = mf.model, mf.tol
    expected = {"hmm": "single", "multi-hmm": None, "schedule": "non-stationary"}
    if mf.kind == "quasi-hmm":
        raise InputError("quasi-hmm files carry no stochastic parameters to analyze")
    if mf.kind == "multi-hmm":
        auto = "homogeneous" if m.homogeneous else "heterogeneous"
    else:
        auto = expected[mf.kind]
    if setting not in ("auto", auto):
        raise InputError(f"setting {setting!r} does not match a {mf.kind} file ({auto})")
    if mf.kind == "hmm":
        return [verdict_single(m, tol)]
    if mf.kind == "multi-hmm":
        return [verdict_multi(m, tol)]
    return verdict_nonstationary(m, tol)


def cmd_analyze(args, out) -> tuple[int, dict]:
    mf = io.load(args.path, _cli_tol(args))
    verdicts = _dispatch(mf, args.setting)
    ok = all(v.identifiable for v in verdicts)
    report = {"path": str(args.path), "kind": mf.kind, "notes": mf.notes,
              "identifiable": ok, "verdicts": [v.to_dict() for v in verdicts]}
    if isinstance(mf.model, MultiHmmParams):
        report["observers"] = [
            {"observer": j + 1, "identifiable": v.identifiable,
             "condition": v.condition_value.to_dict()}
            for j, v in enumerate(verdict_single(mf.model.observer(j), mf.tol, construct=False)
                                  for j in range(mf.model.m))]
    if not args.json:
        for note in mf.notes:
            print(f"note: {note}", file=out)
        for t, v in enumerate(verdicts):
            if len(verdicts) > 1:
                print(f"-- step {t + 1}", file=out)
            print("\n".join(_verdict_lines(v)), file=out)
        for o in report.get("observers", []):
            print(f"observer {o['observer']} alone: "
                  f"{'identifiable' if o['identifiable'] else 'NOT identifiable'}", file=out)
    return (EXIT_OK if ok else EXIT_NEGATIVE), report


def _load_any(path, tol):
    mf = io.load(path, tol)
    if mf.kind == "schedule":
        raise InputError(f"{path}: schedules have no equivalence semantics")
    return mf


def _fmt_seq(seq) -> str:
    return " ".join("(" + ",".join(map(str, y)) + ")" if isinstance(y, tuple) else str(y)
                    for y in seq)


def cmd_equivalence(args, out) -> tuple[int, dict]:
    tol = _cli_tol(args)
    m1 = _load_any(args.path1, tol).model
    m2 = _load_any(args.path2, tol).model
    res = equivalent(m1, m2, max_len=args.max_len, tol=args.prob_tol)
    report = {"paths": [str(args.path1), str(args.path2)], "prob_tol": args.prob_tol,
              **res.to_dict()}
    if not args.json:
        for n, d in enumerate(res.max_abs_diff, start=1):
            print(f"length {n}: max |P1 - P2| = {d:.3e}", file=out)
        if res.equivalent:
            print(f"equivalent up to length {res.max_len}", file=out)
        else:
            print(f"NOT equivalent: sequence {_fmt_seq(res.witness)} has "
                  f"P1 = {res.p1:.17g}, P2 = {res.p2:.17g}", file=out)
    return (EXIT_OK if res.equivalent else EXIT_NEGATIVE), report


def _parse_mode(mode: str) -> tuple[str, int | None]:
    if mode == "recombination":
        return mode, None
    if mode.startswith("inflate:"):
        try:
            return "inflate", int(mode.split(":", 1)[1])
        except ValueError:
            pass
    raise InputError(f"--mode must be 'recombination' or 'inflate:Q', got {mode!r}")


def cmd_counterexample(args, out) -> tuple[int, dict]:
    mode, q_tilde = _parse_mode(args.mode)
    mf = io.load(args.path, _cli_tol(args))
    if mf.kind == "schedule":
        raise InputError("counterexamples are built for a single model, not a schedule")
    m, tol = mf.model, mf.tol
    if mode == "recombination":
        if mf.kind == "quasi-hmm":
            raise InputError("recombination needs a stochastic model")
        if isinstance(m, MultiHmmParams) and not m.homogeneous:
            v = verdict_multi(m, tol)
            raise _Unavailable(
                "recombination is only constructed for single or homogeneous observers; "
                f"heterogeneous verdict: {'identifiable' if v.identifiable else 'NOT identifiable'}")
        v = verdict_single(m, tol, construct=False) if isinstance(m, HmmParams) \
            else verdict_multi(m, tol)
        if v.identifiable:
            raise _Unavailable("model is identifiable; no equivalent model exists")
        ce = construct_rank1_recombination(m, tol)
        if ce is None:
            raise _Unavailable(
                "no proportional row pair in A or B; NOT identifiable by certificate only: "
                + "; ".join(v.reasons))
    else:
        ce = construct_state_inflation(m, q_tilde, tol)
    text = io.dumps(ce)
    report = {"path": str(args.path), "mode": args.mode, "provenance": ce.provenance,
              "q": ce.q, "written_to": None if args.out is None else str(args.out)}
    if args.out is None:
        out.write(text)
        return EXIT_OK, report
    Path(args.out).write_text(text)
    if not args.json:
        print(f"wrote {args.out}: {ce.provenance}", file=out)
    return EXIT_OK, report


def _kappas(text: str) -> list[int]:
    try:
        ks = [int(k) for k in text.split(",")]
    except ValueError:
        raise InputError(f"--kappa must be integers separated by commas, got {text!r}") from None
    return ks


def cmd_nstar(args, out) -> tuple[int, dict]:
    variant = canonical_variant(args.variant)
    ks = _kappas(args.kappa)
    kappa = ks[0] if variant != "heterogeneous" else ks
    bound = n_star(variant, args.q, kappa, args.m)
    report = {"bound": bound.to_dict()}
    code = EXIT_OK
    if not args.json:
        print(f"variant {variant}, q={bound.q}, kappas={list(bound.kappas)}, m={bound.m}",
              file=out)
        for N, b in bound.binomial_trace[1:]:
            print(f"  N={N}: binomial {b} {'>=' if b >= bound.q else '<'} {bound.q}", file=out)
        print(f"N* = {bound.n_star}", file=out)
    if args.witness:
        N = bound.n_star if args.N is None else args.N
        m = None if variant in ("single-strong", "single-weak") else bound.m
        primes = None if args.primes is None else _kappas(args.primes)
        w = vandermonde_witness(args.q, kappa, N, m, primes, _cli_tol(args) or DEFAULT_TOL)
        report["witness"] = w.to_dict()
        code = EXIT_OK if w.full_rank else EXIT_NEGATIVE
        if not args.json:
            print(f"witness N={N}: generators {[list(g) for g in w.generators]}, "
                  f"{w.q}x{w.columns} stack, rank {w.rank}, krank {w.krank}, "
                  f"distinct monomials {w.distinct_monomials}", file=out)
    return code, report


def cmd_casestudy(args, out) -> tuple[int, dict]:
    report = run_casestudy(_cli_tol(args) or DEFAULT_TOL)
    if not args.json:
        for c in report["checks"]:
            print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}", file=out)
        print("all checks passed" if report["all_passed"] else "some checks FAILED", file=out)
    return (EXIT_OK if report["all_passed"] else EXIT_NEGATIVE), report


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's copy from overwriting flags given before it
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--tol-rel", type=float, default=argparse.SUPPRESS,
                   help="relative rank tolerance (default 1e-9)")
    g.add_argument("--tol-abs", type=float, default=argparse.SUPPRESS,
                   help="absolute rank tolerance (default 1e-12)")
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="print the machine-readable report")
    g.add_argument("--out", type=Path, default=argparse.SUPPRESS,
                   help="write the report (or model file) to PATH")
    return g


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    p = argparse.ArgumentParser(prog="hmmident", parents=[flags],
                                description="HMM identifiability via Kruskal rank")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[flags], help="identifiability verdict for a model file")
    a.add_argument("path", type=Path)
    a.add_argument("--setting", choices=SETTINGS, default="auto")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("equivalence", parents=[flags], help="compare two models on all short sequences")
    e.add_argument("path1", type=Path)
    e.add_argument("path2", type=Path)
    e.add_argument("--max-len", type=int, default=5)
    e.add_argument("--prob-tol", type=float, default=1e-10)
    e.set_defaults(func=cmd_equivalence)

    c = sub.add_parser("counterexample", parents=[flags], help="export an equivalent quasi-model")
    c.add_argument("path", type=Path)
    c.add_argument("--mode", default="recombination", help="recombination | inflate:Q")
    c.set_defaults(func=cmd_counterexample)

    n = sub.add_parser("nstar", parents=[flags], help="observation length for generic identifiability")
    n.add_argument("--variant", required=True,
                   help=f"one of {', '.join(VARIANTS)} (or hetero)")
    n.add_argument("--q", type=int, required=True)
    n.add_argument("--kappa", required=True, help="K or K1,K2,... for heterogeneous")
    n.add_argument("--m", type=int, default=None)
    n.add_argument("--witness", action="store_true", help="check with a Vandermonde witness")
    n.add_argument("--N", type=int, default=None, help="witness length (default N*)")
    n.add_argument("--primes", default=None, help="comma-separated generators")
    n.set_defaults(func=cmd_nstar)

    s = sub.add_parser("casestudy", parents=[flags], help="reproduce the SSH analysis")
    s.set_defaults(func=cmd_casestudy)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    for name, default in (("tol_rel", None), ("tol_abs", None), ("json", False), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)

    out = sys.stdout
    try:
        code, report = args.func(args, out)
    except _Unavailable as e:
        print(f"unavailable: {e}", file=sys.stderr)
        code, report = EXIT_UNAVAILABLE, {"message": str(e)}
    except (InputError, ConvergenceError, ConstructionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        code, report = EXIT_ERROR, {"message": str(e)}

    report = {"command": args.command, "status": _STATUS[code], "exit_code": code, **report}
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    model_on_stdout = args.command == "counterexample" and args.out is None and code == EXIT_OK
    if args.json and not model_on_stdout:
        out.write(text)
    if args.out is not None and args.command != "counterexample":
        Path(args.out).write_text(text)
    return code


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
