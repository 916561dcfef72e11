"""Command line front end: ``ptberry {validate,phase,evolve,sweep}``.

Exit codes: 0 success, 1 contract violation, 2 usage or configuration error.
All angles in configuration files are radians.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from .adiabatic_evolution import evolve_loop
from .config import ConfigError, RunConfig, SweepSpec
from .errors import NonAdiabaticError, PTBerryError, ResolutionError
from .geometric_phase import flux_formula, line_integral, solid_angle
from .hermitian_map import evolve_hermitian_picture
from .sweep import SWEEP_COLUMNS, run_sweep, write_csv
from .validation import CHECKS, run_invariant_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

PHASE_COLUMNS = (
    "kind",
    "theta0",
    "winding",
    "U",
    "omega",
    "gamma_analytic",
    "monopole_part",
    "string_part",
    "flux_total",
)
EVOLVE_COLUMNS = (
    "picture",
    "total_phase",
    "dynamical_phase",
    "geometric_phase",
    "analytic_phase",
    "residual",
    "unitarity_drift",
    "final_transition_prob",
)



@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _print_json(record):
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(type(o))

    print(json.dumps(record, default=default, sort_keys=True))


def cmd_validate(args) -> int:
    if args.draws < 1:
        print("error: --draws must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    tolerance = 1e-10 if args.tolerance is None else args.tolerance
    result = run_invariant_suite(args.seed, args.draws)
    print(f"invariant suite: seed={args.seed} draws={args.draws} tolerance={tolerance:.1e}")
    for name in CHECKS:
        value = result.max_residual[name]
        flag = "ok" if value <= tolerance else "FAIL"
        print(f"  {name:<20s} max residual {value:.3e}  {flag}")
    print(
        "  exceptional point b=a rejected at construction: "
        + ("yes" if result.exceptional_point_rejected else "NO")
    )
    bad = result.violations(tolerance)
    if bad or not result.exceptional_point_rejected:
        for name in bad:
            print(f"  offending point for {name}: {result.worst_point[name]!r}")
        return EXIT_VIOLATION
    return EXIT_OK


def _run_config(args) -> RunConfig:
    return RunConfig.load(args.config)


def cmd_phase(args) -> int:
    cfg = _run_config(args)
    tol = cfg.build_tolerances()
    path = cfg.build_path()
    try:
        path.check_nonsingular("+", tol)
        flux = flux_formula(path, tol=tol)
        record = {
            "kind": path.kind,
            "theta0": path.theta0,
            "winding": path.winding,
            "U": path.base.u,
            "omega": solid_angle(path, tol),
            "gamma_analytic": line_integral(path, tol=tol),
            "monopole_part": flux.monopole_part,
            "string_part": flux.string_part,
            "flux_total": flux.total,
        }
    except PTBerryError as exc:
        print(f"error: singular loop: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    _print_json(record)
    out = args.out or cfg.output.get("csv")
    if out:
        with _open_out(out) as fh:
            write_csv(fh, PHASE_COLUMNS, [record])
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = _run_config(args)
    tol = cfg.build_tolerances()
    limit = tol.phase if args.tolerance is None else args.tolerance
    path = cfg.build_path()
    evo = cfg.build_evolution()
    if evo is None:
        raise ConfigError("evolve needs an 'evolution' section")
    try:
        reports = [evolve_loop(path, evo, tol)]
        if args.hermitian_picture:
            reports.append(evolve_hermitian_picture(path, evo, tol=tol))
    except NonAdiabaticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    rows = [r.as_dict() for r in reports]
    for row in rows:
        _print_json(row)
    out = args.out or cfg.output.get("csv")
    if out:
        with _open_out(out) as fh:
            write_csv(fh, EVOLVE_COLUMNS, rows)
    ok = all(r.residual <= limit for r in reports)
    if len(reports) == 2:
        gap = abs(np.angle(np.exp(1j * (reports[0].geometric_phase - reports[1].geometric_phase))))
        ok = ok and gap <= limit
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    spec = SweepSpec.load(args.config, evolution_enabled=not args.no_evolution)
    rows, _ = run_sweep(spec)
    with _open_out(args.out) as fh:
        write_csv(fh, SWEEP_COLUMNS, rows)
    if spec.evolution is not None:
        limit = spec.tolerances.phase if args.tolerance is None else args.tolerance
        if any(r["residual"] > limit for r in rows):
            return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptberry",
        description="Berry-like phases of 2x2 PT-symmetric Hamiltonians (angles in radians).",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="randomised invariant suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--draws", type=int, default=10_000)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("phase", help="analytic phase and flux decomposition of one loop")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("evolve", help="adiabatic evolution around one loop")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--hermitian-picture", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="grid sweep over theta0, b/a, delta")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--no-evolution", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s"
    )
    try:
        return args.func(args)
    except (ConfigError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
