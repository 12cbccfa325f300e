"""Command-line entry point: ``tlwavelab <command> [options]``.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 I/O error.
Reports are JSON with ``"schema": "tlwavelab/1"`` written under the output
directory (``--out``, overridden by ``TLWAVELAB_OUT``), one subdirectory per job.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import checks
from .experiments import (
    duality_pairing_check,
    inclusion_demo,
    lacunary_demo,
    riesz_char_check,
    trivial_fs_decomposition,
)
from .grid import GridSpec, analyze, synthesize
from .gridio import GridFileError, read_coefficients, read_grid, write_coefficients, write_grid
from .meyer import DEFAULT_QUAD_TOL, MeyerSystem, QuadratureError, default_system, wavelet_at_zero_bound
from .norms import norm_report
from .riesz import NonzeroMeanError, riesz_apply, square_sum_error

SCHEMA = "tlwavelab/1"
EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- output helpers --------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dump_json(payload):
    return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def output_root(args):
    return Path(os.environ.get("TLWAVELAB_OUT") or args.out)


def write_job(args, job, payload, series=None):
    """Write ``report.json`` (and CSV series) for one job; returns the directory."""
    folder = output_root(args) / job
    folder.mkdir(parents=True, exist_ok=True)
    (folder / "report.json").write_text(dump_json({"schema": SCHEMA, **payload}))
    for name, (header, rows) in (series or {}).items():
        (folder / f"{name}.csv").write_text(csv_text(header, rows))
    return folder


def run_config(args):
    return {
        "dim": args.dim,
        "period_exp": args.period_exp,
        "grid_exp": args.grid_exp,
        "q": args.q,
        "seed": args.seed,
        "quad_tol": args.quad_tol,
    }


def grid_spec(args):
    defaults = {1: (5, 14), 2: (3, 9)}
    if args.dim not in defaults:
        raise UsageError(f"--dim must be 1 or 2, got {args.dim}")
    p = args.period_exp if args.period_exp is not None else defaults[args.dim][0]
    g = args.grid_exp if args.grid_exp is not None else defaults[args.dim][1]
    try:
        return GridSpec(args.dim, p, g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def meyer_system(args, dim=1):
    if args.quad_tol == DEFAULT_QUAD_TOL:
        return default_system(dim)
    return MeyerSystem(dim=dim, quad_tol=args.quad_tol)


def _print_checks(results):
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.summary}  (value {r.value:.3e})")


# -- commands -------------------------------------------------------------------------


def cmd_wavelet(args):
    system = meyer_system(args)
    if args.action == "build":
        results = checks.profile_checks(system)
        _print_checks(results)
        zero = wavelet_at_zero_bound(system)
        folder = write_job(
            args,
            "wavelet-build",
            {
                "command": "wavelet build",
                "config": run_config(args),
                "checks": [r.to_dict() for r in results],
                "passed": checks.all_passed(results),
                "summary": [f"{'PASS' if r.passed else 'FAIL'}: {r.summary}" for r in results],
                "profile": {"quad_tol_requested": system.quad_tol, "quad_tol_achieved": system.bump.quad_tol,
                            "nodes": system.bump.n_nodes},
                "wavelet_at_zero": zero._asdict(),
            },
        )
        print(f"report: {folder / 'report.json'}")
        failed = [r.name for r in results if not r.passed]
        if failed:
            print("violated: " + ", ".join(failed), file=sys.stderr)
            return EXIT_CHECK
        return EXIT_OK
    # table
    xi = np.linspace(-args.xi_max, args.xi_max, args.points)
    psi = system.wavelet_spectrum(xi)
    rows = zip(xi, system.scaling_spectrum(xi), system.low_pass(xi), psi.real, psi.imag)
    zero = wavelet_at_zero_bound(system)
    folder = write_job(
        args,
        "wavelet-table",
        {
            "command": "wavelet table",
            "config": run_config(args),
            "quad_tol": system.quad_tol,
            "quad_tol_achieved": system.bump.quad_tol,
            "nodes": system.bump.n_nodes,
            "points": args.points,
            "wavelet_at_zero": zero._asdict(),
        },
        {"profile": (("xi", "Phi", "m_phi", "Re psi_hat", "Im psi_hat"), rows)},
    )
    print(f"table: {folder / 'profile.csv'}")
    return EXIT_OK


def cmd_analyze(args):
    f = read_grid(args.input)
    c = analyze(f, meyer_system(args, f.spec.dim))
    write_coefficients(args.output, c)
    print(f"{len(c)} coefficients -> {args.output}")
    return EXIT_OK


def cmd_synthesize(args):
    spec = grid_spec(args)
    c = read_coefficients(args.input, spec)
    f = synthesize(c, meyer_system(args, spec.dim))
    write_grid(args.output, f)
    print(f"grid function -> {args.output}")
    return EXIT_OK


def cmd_norm(args):
    f = read_grid(args.input)
    system = meyer_system(args, f.spec.dim)
    report = norm_report(args.which, analyze(f, system), f, args.q, system)
    payload = {"command": "norm", "config": run_config(args), "input": str(args.input), "report": report.to_dict()}
    write_job(args, f"norm-{args.which}", payload)
    sys.stdout.write(dump_json({"schema": SCHEMA, **payload}))
    return EXIT_OK


def cmd_riesz(args):
    if args.input is None:
        raise UsageError("riesz needs --input")
    f = read_grid(args.input)
    if args.ell > f.spec.dim or args.ell < 0:
        raise UsageError(f"--ell must lie in 0..{f.spec.dim}")
    status = EXIT_OK
    payload = {"command": "riesz", "config": run_config(args), "ell": args.ell}
    if args.output:
        write_grid(args.output, riesz_apply(args.ell, f))
    if args.check_square_sum:
        try:
            err = square_sum_error(f)
            payload["square_sum_rel_err"] = err
            payload["square_sum_passed"] = err <= 1e-10
            print(f"{'PASS' if err <= 1e-10 else 'FAIL'}  square-sum identity rel err = {err:.3e}")
            if err > 1e-10:
                status = EXIT_CHECK
        except NonzeroMeanError as exc:
            payload["square_sum_error"] = str(exc)
            print(f"FAIL  {exc}")
            status = EXIT_CHECK
    write_job(args, "riesz", payload)
    return status


def cmd_verify(args):
    spec = grid_spec(args)
    if args.input:
        # validates the file before spending time on the suite
        read_grid(args.input)
    quad_tol = None if args.quad_tol == DEFAULT_QUAD_TOL else args.quad_tol
    results = checks.verify_suite(spec, quad_tol, args.seed, args.jobs)
    _print_checks(results)
    passed = checks.all_passed(results)
    folder = write_job(
        args,
        f"verify-d{spec.dim}",
        {
            "command": "verify",
            "config": run_config(args),
            "grid": {"dim": spec.dim, "period_exp": spec.period_exp, "grid_exp": spec.grid_exp,
                     "j_lo": spec.j_lo, "j_hi": spec.j_hi},
            "checks": [r.to_dict() for r in results],
            "passed": passed,
        },
    )
    print(f"report: {folder / 'report.json'}")
    return EXIT_OK if passed else EXIT_CHECK


def cmd_demo(args):
    name = args.demo
    if name == "inclusion":
        rep = inclusion_demo(args.q, args.j_floor, dim=args.dim, system=meyer_system(args))
    elif name == "lacunary":
        terms = range(1, args.terms + 1)
        rep = lacunary_demo(args.q_prime, terms, order=args.order, levels=args.levels, system=meyer_system(args))
    elif name == "riesz-char":
        spec = grid_spec(args)
        rep = riesz_char_check(spec, args.q, args.trials, args.seed, system=meyer_system(args, spec.dim),
                               budget=args.budget)
    elif name == "duality":
        spec = grid_spec(args)
        rep = duality_pairing_check(spec, args.q, args.trials, args.seed, system=meyer_system(args, spec.dim))
    else:
        if not args.input:
            raise UsageError("fs-trivial needs --input")
        f = read_grid(args.input)
        try:
            _, rep = trivial_fs_decomposition(f, args.q_prime, meyer_system(args, f.spec.dim))
        except NonzeroMeanError as exc:
            print(f"FAIL  {exc}", file=sys.stderr)
            return EXIT_CHECK
    job = f"demo-{name}" if args.dim == 1 or name == "lacunary" else f"demo-{name}-d{args.dim}"
    folder = write_job(args, job, {"command": f"demo {name}", "config": run_config(args),
                                              "report": rep.to_dict()}, rep.series)
    for key, ok in rep.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {key}")
    for note in rep.notes:
        print(f"note: {note}")
    print(f"report: {folder / 'report.json'}")
    return EXIT_OK if rep.passed else EXIT_CHECK


# -- parser ---------------------------------------------------------------------------


def _global_flags(parser, suppress):
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--dim", type=int, default=default(1), help="dimension D (1 or 2)")
    parser.add_argument("--period-exp", type=int, default=default(None), help="torus period 2^P")
    parser.add_argument("--grid-exp", type=int, default=default(None), help="2^G samples per axis")
    parser.add_argument("--q", type=float, default=default(2.0), help="exponent q")
    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--out", default=default("tlwavelab-out"), help="output directory")
    parser.add_argument("--jobs", type=int, default=default(1), help="worker threads")
    parser.add_argument("--quad-tol", type=float, default=default(DEFAULT_QUAD_TOL))


def build_parser():
    parser = argparse.ArgumentParser(prog="tlwavelab", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wavelet", parents=[common], help="build/check the profile or tabulate it")
    p.add_argument("action", choices=["build", "table"])
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--xi-max", type=float, default=3.0 * math.pi)
    p.set_defaults(handler=cmd_wavelet)

    p = sub.add_parser("analyze", parents=[common], help="grid file -> coefficient CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("synthesize", parents=[common], help="coefficient CSV -> grid file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_synthesize)

    p = sub.add_parser("norm", parents=[common], help="evaluate one norm of a grid file")
    p.add_argument("--which", required=True, choices=["l1", "linf", "h1", "f01q", "f0infq", "we1q", "weinfq", "min1q", "sum1q"])
    p.add_argument("--input", required=True)
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("riesz", parents=[common], help="apply a Riesz transform")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--check-square-sum", action="store_true")
    p.set_defaults(handler=cmd_riesz)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--input", help="optional grid file to validate first")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("demo", parents=[common], help="scripted experiments")
    demos = p.add_subparsers(dest="demo", required=True)
    d = demos.add_parser("inclusion", parents=[common])
    d.add_argument("--j-floor", type=int, default=-9)
    d = demos.add_parser("lacunary", parents=[common])
    d.add_argument("--q-prime", type=float, default=2.0)
    d.add_argument("--terms", type=int, default=8)
    d.add_argument("--order", type=int, default=16)
    d.add_argument("--levels", type=int, default=12)
    for name in ("riesz-char", "duality"):
        d = demos.add_parser(name, parents=[common])
        d.add_argument("--trials", type=int, default=50)
        if name == "riesz-char":
            d.add_argument("--budget", type=float, help="fail if the max/min ratio spread exceeds this")
    d = demos.add_parser("fs-trivial", parents=[common])
    d.add_argument("--input")
    d.add_argument("--q-prime", type=float, default=2.0)
    p.set_defaults(handler=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GridFileError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QuadratureError as exc:
        print(f"quadrature failure: {exc} (achieved {exc.achieved:.3e})", file=sys.stderr)
        return EXIT_CHECK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
