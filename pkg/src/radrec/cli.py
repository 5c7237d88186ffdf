"""``radrec`` command line: run, verify, sweep.

Exit codes: 0 success, 1 validation failure, 2 numerical diagnostic
failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .errors import (ConfigError, DerivativeInconsistent, DomainError, ExtrapolationFailed,
                     InsufficientGrid, InvalidInput, InvalidModel, InvalidParameter, IoError,
                     PoleOutsideGrid, QuasiDegenerate, ResidualSingularity, SingularResolvent)
from .io import RunConfig, emit_report, emit_sweep, load_model, run_pipeline, sweep
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

NUMERICAL = (SingularResolvent, QuasiDegenerate, ResidualSingularity, ExtrapolationFailed,
             DerivativeInconsistent, PoleOutsideGrid, InsufficientGrid, DomainError)
VALIDATION = (ConfigError, InvalidModel, InvalidInput, InvalidParameter)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radrec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate all diagram classes for a model config")
    run.add_argument("--config", required=True)
    run.add_argument("--output", required=True)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--eta", type=float, default=None, help="use the eta-regularised free resolvent")
    run.add_argument("--fd-step", type=float, default=None, help="override the finite-difference step")

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", required=True, choices=SUITES)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--output", default=None, help="write the residual report as JSON")

    sw = sub.add_parser("sweep", help="evaluate the pipeline across parameter values")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", required=True, choices=("gamma", "eta", "grid_n", "epsilon"))
    sw.add_argument("--values", required=True, help="comma separated list")
    sw.add_argument("--output", default=None)
    sw.add_argument("--format", choices=("json", "csv"), default="csv")
    return ap


def _values(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("--values", f"not a comma separated list of numbers: {text!r}") from None
    if not vals:
        raise ConfigError("--values", "must be a nonempty list")
    return vals


def _run(args) -> int:
    cfg = RunConfig(args.config, args.output, args.format, args.eta, args.fd_step)
    report = run_pipeline(load_model(cfg.model_path), cfg)
    emit_report(report, cfg.format, cfg.output_path)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _verify(args) -> int:
    rep = run_suite(args.suite, args.seed)
    print(rep.line())
    if args.output:
        try:
            with open(args.output, "w") as fh:
                json.dump({"name": rep.name, "value": rep.value, "tolerance": rep.tolerance,
                           "pass": rep.passed, "context": rep.context}, fh, sort_keys=True, indent=2,
                          default=str)
        except OSError as exc:
            raise IoError(f"cannot write {args.output}: {exc}") from exc
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


def _sweep(args) -> int:
    values = _values(args.values)
    RunConfig(args.config, args.output, args.format, sweep={"param": args.param, "values": values})
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    rows = sweep(doc, args.param, values)
    if args.output:
        emit_sweep(rows, args.format, args.output)
    else:
        print("param,value,total_coefficient,cross_section,amplitude_sq,residual")
        for r in rows:
            print(",".join([r["param"]] + [repr(r[k]) for k in
                                           ("value", "total_coefficient", "cross_section",
                                            "amplitude_sq", "residual")]))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _run, "verify": _verify, "sweep": _sweep}[args.command]
    try:
        return handler(args)
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NUMERICAL as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VALIDATION as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
