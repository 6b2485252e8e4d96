"""Command-line surface.

Subcommands::

    pexkit analyze SIGNAL.csv --window T [--ppe] [--rank-trace OUT.csv]
    pexkit check SYSTEM.json SIGNAL.csv --theorem {suf,nec} --class {x,xu}
    pexkit counterexample --id {sufficiency,necessity} --out DIR
    pexkit synth --n N --m M --domain {dt,ct} --class {x,xu} --seed S --out PREFIX

Exit codes: 0 success, 1 input/validation error, 2 assertion failed
(``--assert-pe`` on a non-PE signal), 3 theorem violation.  Structured
results go to stdout as JSON; traces and signals are CSV files.  All outputs
are deterministic functions of the inputs, flags, and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import counterexamples, fileio
from .conditions import (UncertifiedSystemError, check_necessary_dt,
                         check_sufficient_dt)
from .excitation import pe_check, ppe_degree, rank_trace
from .synthesis import SynthesisError, SynthesisRequest, synthesize_sr_input

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_ASSERTION_FAILED = 2
EXIT_THEOREM_VIOLATION = 3


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors: exit 1, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pexkit",
                     description="Persistency-of-excitation analysis for LTI systems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    analyze = sub.add_parser("analyze", help="PE verdict (and options) for a signal CSV")
    analyze.add_argument("signal", help="signal CSV (header row; time column first)")
    analyze.add_argument("--window", type=float, default=100,
                         help="PE window (samples for dt, seconds for ct)")
    analyze.add_argument("--tol", type=float, default=None,
                         help="PE tolerance (default: scale-aware)")
    analyze.add_argument("--domain", choices=("dt", "ct"), default="dt")
    analyze.add_argument("--ppe", action="store_true",
                         help="also estimate the partial-PE degree")
    analyze.add_argument("--rank-trace", metavar="OUT.csv", default=None,
                         help="write the cumulative-rank trace CSV here")
    analyze.add_argument("--rank-tol", type=float, default=1e-8)
    analyze.add_argument("--assert-pe", action="store_true",
                         help="exit 2 when the signal is not PE")

    check = sub.add_parser("check", help="evaluate a richness condition on a system + input")
    check.add_argument("system", help="system JSON file")
    check.add_argument("signal", help="input signal CSV")
    check.add_argument("--theorem", choices=("suf", "nec"), required=True)
    check.add_argument("--class", dest="output_class", choices=("x", "xu"), default=None,
                       help="regressor class (default: the system file's tag, else 'x')")
    check.add_argument("--window", type=float, default=100)
    check.add_argument("--tol", type=float, default=None)

    counter = sub.add_parser("counterexample", help="run an embedded tightness experiment")
    counter.add_argument("--id", required=True, choices=("sufficiency", "necessity"))
    counter.add_argument("--out", required=True, help="output directory for CSVs + summary")

    synth = sub.add_parser("synth", help="synthesize a certified sufficiently rich input")
    synth.add_argument("--n", type=int, required=True, help="state dimension")
    synth.add_argument("--m", type=int, default=1, help="input dimension")
    synth.add_argument("--domain", choices=("dt", "ct"), default="dt")
    synth.add_argument("--class", dest="output_class", choices=("x", "xu"), default="x")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--horizon", type=float, default=None,
                       help="samples (dt, default 1000) or seconds (ct, default 40)")
    synth.add_argument("--max-tones", type=int, default=64)
    synth.add_argument("--out", required=True,
                       help="output prefix: writes PREFIX.csv and PREFIX.json")
    return parser


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _report_payload(report) -> dict:
    payload = {
        "is_pe": bool(report.is_pe),
        "margin": float(report.margin),
        "window": report.window,
        "tol": report.tol,
        "domain": report.domain,
        "worst_window_start": report.worst_start,
    }
    if report.ppe_degree is not None:
        payload["ppe_degree"] = int(report.ppe_degree)
    return payload


def _cmd_analyze(args) -> int:
    signal = fileio.load_signal_csv(args.signal, domain=args.domain)
    window = int(args.window) if args.domain == "dt" else args.window
    if args.ppe:
        report = ppe_degree(signal, window, args.tol)
    else:
        report = pe_check(signal, window, args.tol)
    if args.rank_trace:
        fileio.write_rank_trace_csv(args.rank_trace, rank_trace(signal, args.rank_tol))
    _emit(_report_payload(report))
    if args.assert_pe and not report.is_pe:
        return EXIT_ASSERTION_FAILED
    return EXIT_OK


def _cmd_check(args) -> int:
    sys_obj, tag = fileio.load_system(args.system)
    if sys_obj.domain != "dt":
        raise fileio.SystemFormatError(
            "the check command handles discrete-time systems; continuous-time "
            "inputs need closed-form signals, available through the library API")
    output_class = args.output_class or tag or "x"
    signal = fileio.load_signal_csv(args.signal, domain="dt")
    checker = check_sufficient_dt if args.theorem == "suf" else check_necessary_dt
    result = checker(sys_obj, signal, np.zeros(sys_obj.n), int(args.window),
                     args.tol, output_class=output_class)
    payload = {
        "condition": result.condition,
        "class": result.output_class,
        "premise_holds": result.premise_holds,
        "conclusion_holds": result.conclusion_holds,
        "theorem_violation": result.violation,
        "marginal": result.marginal,
        "premise": _report_payload(result.premise),
        "conclusion": _report_payload(result.conclusion),
    }
    if result.required_degree is not None:
        payload["required_degree"] = result.required_degree
    _emit(payload)
    return EXIT_THEOREM_VIOLATION if result.violation else EXIT_OK


def _cmd_counterexample(args) -> int:
    report = counterexamples.run_counterexample(args.id)
    counterexamples.emit_figures(report, args.out)
    _emit(report.summary())
    return EXIT_OK


def _cmd_synth(args) -> int:
    horizon = args.horizon
    if horizon is None:
        horizon = 1000 if args.domain == "dt" else 40.0
    request = SynthesisRequest(n=args.n, m=args.m, domain=args.domain,
                               output_class=args.output_class, horizon=horizon,
                               seed=args.seed, max_tones=args.max_tones)
    result = synthesize_sr_input(request)
    signal = result.signal
    if args.domain == "ct":
        from .signals import sample
        length = int(round(horizon / request.step)) + 1
        signal = sample(signal, request.step, length)
    fileio.save_signal_csv(f"{args.out}.csv", signal)
    certificate = {
        "n": args.n,
        "m": args.m,
        "domain": args.domain,
        "class": args.output_class,
        "seed": args.seed,
        "horizon": horizon,
        "stack_depth": request.stack_depth,
        "stack_dim": request.stack_dim,
        "tones": [list(ch) for ch in result.tones],
        "window": result.window,
        "is_pe": bool(result.certificate.is_pe),
        "margin": float(result.certificate.margin),
        "tol": float(result.certificate.tol),
    }
    fileio.write_json(f"{args.out}.json", certificate)
    _emit(certificate)
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "check": _cmd_check,
    "counterexample": _cmd_counterexample,
    "synth": _cmd_synth,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (fileio.SignalFormatError, fileio.SystemFormatError, UncertifiedSystemError,
            SynthesisError, FileNotFoundError, ValueError) as exc:
        print(f"pexkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
