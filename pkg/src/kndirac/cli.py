"""Command line front end: ``kndirac {spec2,enclose,convergence,sweep,verify}``.

Exit codes: 0 success, 1 failed self-check, 2 invalid parameters or usage,
3 solver failure.
"""
from __future__ import annotations

import argparse
import contextlib
import sys

from . import experiments as ex
from .discretization import QuadratureSpec, assemble_pencil, dump_pencil, mesh_for_width
from .enclosure import isolating_segments, load_apriori
from .errors import KNDiracError, QuadratureNonConvergence
from .operator_model import OperatorParams, validate_params
from .quadratic_spectrum import (
    FULL_SPECTRUM_MAX_DIM, SolverConfig, dump_spectrum, solve_spec2,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
DESK_H = 0.05
PRODUCTION_H = 0.001


class UsageError(Exception):
    pass


def _warn(msg: str) -> None:
    print(f"kndirac: {msg}", file=sys.stderr)


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _params(args) -> OperatorParams:
    return validate_params(OperatorParams(args.kappa, args.am, args.aw))


def _h(args) -> float:
    if args.h is not None:
        return args.h
    return PRODUCTION_H if args.production else DESK_H


def _floats(text: str):
    return [float(t.replace("−", "-")) for t in text.replace(";", ",").split(",") if t.strip()]


def _add_physics(p, kappa_required=True):
    p.add_argument("--kappa", type=float, required=kappa_required,
                   help="angular quantum number, |kappa| >= 1/2")
    p.add_argument("--am", type=float, default=0.0, help="product a*m")
    p.add_argument("--aw", type=float, default=0.0, help="product a*omega")


def _add_solver(p):
    p.add_argument("--h", type=float, default=None,
                   help=f"mesh width; the mesh has ceil(pi/h) elements (default {DESK_H}, "
                        f"{PRODUCTION_H} with --production)")
    p.add_argument("--nevp", type=int, default=6, help="points computed near the shift")
    p.add_argument("--rtol", type=float, default=1e-12, help="Arnoldi tolerance")
    p.add_argument("--production", action="store_true",
                   help="full-resolution defaults; allows dense solves above "
                        f"dimension {FULL_SPECTRUM_MAX_DIM}")


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


# -- subcommands ----------------------------------------------------------------

def cmd_spec2(args) -> int:
    params = _params(args)
    h = _h(args)
    mesh = mesh_for_width(h)
    if args.full:
        dim = 2 * mesh.ndof
        if dim > FULL_SPECTRUM_MAX_DIM and not args.production:
            raise UsageError(f"dense solve of dimension {dim} exceeds {FULL_SPECTRUM_MAX_DIM}; "
                             "drop --full or pass --production")
        cfg = SolverConfig("full", rtol=args.rtol)
    else:
        cfg = SolverConfig("shifted", shift=args.shift, nevp=args.nevp, rtol=args.rtol)
    if args.production:
        _warn("production resolution; dense solves may take hours")
    pencil = assemble_pencil(params, mesh)
    if args.dump_matrices:
        dump_pencil(pencil, args.dump_matrices)
    spec = solve_spec2(pencil, cfg)
    with _output(args.out) as out:
        out.write(f"# kappa={params.kappa!r} am={params.am!r} aw={params.aw!r} "
                  f"h={mesh.h:.17g} n={mesh.n} dim={pencil.dim} method={cfg.method} "
                  f"shift={complex(cfg.shift).real:.17g} nevp={cfg.nevp}\n")
        out.write(f"# residual_certificate={spec.residual_certificate:.17g} "
                  f"discarded_infinite={spec.meta['discarded_infinite']}\n")
        out.write("# re im\n")
        dump_spectrum(spec, out)
    return EXIT_OK


def _segments(args):
    segs = []
    for path in args.apriori or ():
        segs.extend(load_apriori(path))
    if args.isolate and segs:
        segs = isolating_segments(segs)
    return segs


def cmd_enclose(args) -> int:
    params = _params(args)
    h = _h(args)
    if args.targets_file:
        with open(args.targets_file, encoding="utf-8") as fh:
            text = ",".join(line.split("#", 1)[0] for line in fh)
    else:
        text = args.targets
    if not text:
        raise UsageError("give --targets or --targets-file")
    try:
        targets = ex.parse_targets(text)
    except ValueError as exc:
        raise UsageError(f"bad target list: {exc}") from exc
    if not targets:
        raise UsageError("empty target list")
    segs = _segments(args)
    if args.production:
        _warn("production resolution; runs may be slow")
    recs = ex.run_enclosures(params, h, targets, segs, nevp=args.nevp, rtol=args.rtol,
                             timings=args.timings)
    with _output(args.out) as out:
        ex.write_records(recs, out, args.format)
    if all(r.error for r in recs):
        _warn("no target produced an enclosure")
        return EXIT_SOLVER
    return EXIT_OK


def cmd_convergence(args) -> int:
    if args.kappa_grid:
        try:
            lo, hi, count = args.kappa_grid.split(":")
            kappas = ex.kappa_grid(float(lo), float(hi), int(count))
        except ValueError as exc:
            raise UsageError(f"--kappa-grid must look like lo:hi:count ({exc})") from exc
    elif args.kappa:
        kappas = _floats(args.kappa)
    else:
        raise UsageError("give --kappa or --kappa-grid")
    if args.hs:
        hs = _floats(args.hs)
    else:
        hs = list(ex.PRODUCTION_H_GRID if args.production else ex.DESK_H_GRID)
    if args.production:
        _warn("production h grid; expect long runtimes")
    if len(hs) < 3:
        raise UsageError(f"need at least 3 h values, got {len(hs)}")
    for k in kappas:
        if not abs(k) > 0.5:
            raise UsageError(f"convergence study needs |kappa| > 1/2, got {k}")
    if args.target == 0:
        raise UsageError("target index must be nonzero")
    est = ex.convergence(kappas, hs, target=args.target, nevp=args.nevp, rtol=args.rtol,
                         jobs=args.jobs)
    with _output(args.out) as out:
        ex.write_table([ex.slope_row(s) for s in est], ex.SLOPE_COLUMNS, out, "slope",
                       args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    validate_params(OperatorParams(args.kappa))
    try:
        aws, ams = ex.parse_grid(args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    h = args.h if args.h is not None else (PRODUCTION_H if args.production else 0.1)
    rows = ex.sweep(args.kappa, aws, ams, h=h, nevp=args.nevp, rtol=args.rtol, jobs=args.jobs)
    with _output(args.out) as out:
        ex.write_table(rows, ex.SWEEP_COLUMNS, out, "sweep", args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    quad = None
    if args.inject_quadrature_order is not None:
        quad = QuadratureSpec(order=args.inject_quadrature_order,
                              endpoint_order=args.inject_quadrature_order, check=False)
    checks = ex.verify(quad)
    with _output(args.out) as out:
        if args.format == "json":
            rows = [{"check": c.name, "passed": ex.fmt(c.passed), "detail": c.detail}
                    for c in checks]
            ex.write_table(rows, ("check", "passed", "detail"), out, "verify", "json")
        else:
            out.write(ex.format_report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kndirac",
        description="Certified eigenvalue enclosures for the angular Kerr-Newman Dirac "
                    "operator by the quadratic (second order spectrum) method.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spec2", help="second order spectrum near a shift")
    _add_physics(p)
    _add_solver(p)
    p.add_argument("--shift", type=float, default=0.0, help="shift for the Arnoldi solve")
    p.add_argument("--full", action="store_true", help="all points by dense QZ")
    p.add_argument("--dump-matrices", metavar="PREFIX", default=None,
                   help="also write PREFIX{Q,R,S}.txt as 'row col re im'")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spec2)

    p = sub.add_parser("enclose", help="certified enclosures of selected eigenvalues")
    _add_physics(p)
    _add_solver(p)
    p.add_argument("--targets", default=None,
                   help="comma separated reals or indices n=K, e.g. '2.25,n=-1'")
    p.add_argument("--targets-file", default=None, help="targets, one or more per line")
    p.add_argument("--apriori", action="append", default=None,
                   help="segment file 'a b label' per line; may repeat")
    p.add_argument("--isolate", action="store_true",
                   help="widen consecutive segments to maximal isolating segments")
    p.add_argument("--timings", action="store_true",
                   help="record wall times (output is then not reproducible)")
    _add_output(p)
    p.set_defaults(func=cmd_enclose)

    p = sub.add_parser("convergence", help="log-log slopes of |z - lambda| against h")
    p.add_argument("--kappa", default=None, help="comma separated kappa values")
    p.add_argument("--kappa-grid", default=None,
                   help="lo:hi:count, equally spaced points strictly inside (lo, hi)")
    p.add_argument("--hs", default=None, help="comma separated mesh widths (at least 3)")
    p.add_argument("--target", type=int, default=1, help="eigenvalue index")
    p.add_argument("--nevp", type=int, default=6)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--production", action="store_true",
                   help="use h from 1e-3 to 1e-2")
    _add_output(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("sweep", help="enclosures of lambda_1 and lambda_-1 over an (aw, am) grid")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--grid", required=True, help="awmin:awmax:naw,ammin:ammax:nam")
    _add_solver(p)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant self-check")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.add_argument("--inject-quadrature-order", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    except QuadratureNonConvergence as exc:
        _warn(f"solver failure: {exc}")
        return EXIT_SOLVER
    except (KNDiracError, ValueError) as exc:
        code = EXIT_SOLVER if isinstance(exc, RuntimeError) else EXIT_USAGE
        _warn(f"{'solver failure' if code == EXIT_SOLVER else 'invalid input'}: {exc}")
        return code
    except OSError as exc:
        _warn(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
