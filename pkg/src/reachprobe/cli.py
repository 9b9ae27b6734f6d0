"""Command-line entry point.

Every subcommand prints one JSON report (or writes it to ``--output``) that
echoes the resolved configuration.  Exit status: 0 on success, 2 for bad
input, 3 when a violation is found or a certificate is refused.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import _json
from ._validation import CertificateInfeasibleError, InvalidInputError, SamplingError, check_count, check_positive
from .certificates import cross_check_with_estimator, delta0_certificate
from .domains import LocalGraph, builtin, domain_from_dict, extract_local_graph
from .estimators import equivalence_report
from .fourball import run_trials
from .geometry import EUCLIDEAN, lp

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 2, 3


def _param(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_parser():
    parser = argparse.ArgumentParser(prog="reachprobe", description="Boundary regularity analysis.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="also write the scalar report fields as CSV")

    def domain_args(p):
        p.add_argument("--builtin", help="ball, ellipsoid, dumbbell or tail")
        p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
        p.add_argument("--dim", type=int, help="ambient dimension for a builtin domain")

    a = sub.add_parser("analyze", help="estimate the supporting radius and the normal Lipschitz constant")
    domain_args(a)
    a.add_argument("--input", help="domain description JSON file")
    a.add_argument("--samples", type=int, default=2000)
    a.add_argument("--r-max", type=float)
    a.add_argument("--refine-iters", type=int, default=6)
    common(a)

    f = sub.add_parser("fourball", help="random Euclidean four-ball campaign")
    f.add_argument("--dim", type=int, default=3)
    f.add_argument("--r", type=float, default=1.0)
    f.add_argument("--trials", type=int, default=100000)
    common(f)

    q = sub.add_parser("lp", help="random lp four-ball campaign")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--dim", type=int, default=8)
    q.add_argument("--r", type=float, default=1.0)
    q.add_argument("--trials", type=int, default=100000)
    common(q)

    c = sub.add_parser("certify", help="supporting-ball certificate from a local graph")
    domain_args(c)
    c.add_argument("--input", help="graph JSON file")
    c.add_argument("--point", type=float, nargs="+", help="boundary base point (with --builtin)")
    c.add_argument("--rho", type=float, default=0.3)
    c.add_argument("--h", type=float, default=0.3)
    c.add_argument("--grid-n", type=int, default=41)
    c.add_argument("--r", type=float, required=True, help="envelope radius")
    c.add_argument("--cross-check", action="store_true", help="verify the balls on dense boundary samples")
    c.add_argument("--emit-graph", help="write the extracted graph JSON here")
    common(c)
    return parser


def _domain(args):
    if args.input and args.builtin:
        raise InvalidInputError("give either --input or --builtin, not both")
    if args.input:
        return domain_from_dict(_read_json(args.input))
    if not args.builtin:
        raise InvalidInputError("a domain is required: --input FILE or --builtin NAME")
    params = dict(args.param)
    if args.dim is not None:
        params["dim"] = args.dim
    return builtin(args.builtin, **params)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON (line {exc.lineno}, column {exc.colno})") from None


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "csv", "emit_graph")}
    if "param" in cfg:
        cfg["param"] = {k: v for k, v in cfg["param"]}
    return cfg


def _analyze(args):
    d = _domain(args)
    check_count(args.refine_iters, "refine-iters", 0)
    r_max = None if args.r_max is None else check_positive(args.r_max, "r-max")
    rep = equivalence_report(d, args.samples, args.seed, r_max, args.refine_iters)
    return rep.to_dict(), EXIT_OK


def _campaign(args, ctx):
    rep = run_trials(ctx, args.dim, args.r, args.trials, args.seed)
    return rep.to_dict(), EXIT_VIOLATION if rep.violations else EXIT_OK


def _certify(args):
    d = None
    if args.input and not args.builtin:
        g = LocalGraph.from_dict(_read_json(args.input))
    else:
        d = _domain(args)
        if args.point is None:
            raise InvalidInputError("--point is required with --builtin")
        g = extract_local_graph(d, np.asarray(args.point), args.rho, args.h, args.grid_n)
    if args.emit_graph:
        g.dump(args.emit_graph)
    try:
        cert = delta0_certificate(g, args.r)
    except CertificateInfeasibleError as exc:
        return {"ok": False, "envelope_ok": False, "reason": str(exc),
                "offending_node": np.asarray(exc.sample).tolist()}, EXIT_VIOLATION
    out = cert.to_dict()
    if args.cross_check:
        if d is None:
            raise InvalidInputError("--cross-check needs a domain (--builtin)")
        out["cross_check"] = bool(cross_check_with_estimator(g, d, cert, seed=args.seed))
        out["ok"] = out["ok"] and out["cross_check"]
    return out, EXIT_OK if out["ok"] else EXIT_VIOLATION


def _write_csv(path, report):
    flat = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        keys = sorted(flat)
        w.writerow(keys)
        w.writerow([format(flat[k], ".17g") if isinstance(flat[k], float) else flat[k] for k in keys])


def run(args):
    """Execute a parsed command; returns ``(exit_code, json_text)``."""
    try:
        if args.subcommand == "analyze":
            report, code = _analyze(args)
        elif args.subcommand == "fourball":
            report, code = _campaign(args, EUCLIDEAN)
        elif args.subcommand == "lp":
            report, code = _campaign(args, lp(args.p))
        else:
            report, code = _certify(args)
    except (InvalidInputError, SamplingError) as exc:
        return EXIT_INPUT, _json.dumps({"error": str(exc), "config": _config(args)})
    report["config"] = _config(args)
    if args.csv:
        _write_csv(args.csv, report)
    return code, _json.dumps(report)


def main(argv=None):
    args = build_parser().parse_args(argv)
    code, text = run(args)
    if code == EXIT_INPUT:
        sys.stderr.write(text)
    elif args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
