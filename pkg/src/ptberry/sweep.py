"""Grid sweeps over latitude loops, written as CSV."""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .adiabatic_evolution import evolve_loop
from .config import SweepSpec
from .errors import PTBerryError
from .geometric_phase import flux_formula, line_integral, solid_angle
from .paths import LoopPath
from .pt_model import ParamPoint

__all__ = ["SWEEP_COLUMNS", "sweep_row", "run_sweep", "write_csv", "format_value"]

log = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "theta0",
    "b_over_a",
    "delta",
    "winding",
    "U",
    "omega",
    "gamma_analytic",
    "gamma_numeric",
    "residual",
    "unitarity_drift",
    "transition_prob",
)


def format_value(value) -> str:
    """12 significant digits, locale independent; ``None``/NaN become empty fields."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if np.isnan(value):
        return ""
    return f"{value:.12g}"


def write_csv(fh, columns, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])


def sweep_row(spec: SweepSpec, point) -> dict:
    theta0, b_over_a, delta = point
    base = ParamPoint(spec.epsilon, spec.a, b_over_a * spec.a, theta0, 0.0, delta)
    loop = LoopPath.latitude(base, theta0, spec.winding)
    tol = spec.tolerances
    loop.check_nonsingular("+", tol)
    row = {
        "theta0": theta0,
        "b_over_a": b_over_a,
        "delta": delta,
        "winding": spec.winding,
        "U": base.u,
        "omega": solid_angle(loop, tol),
        "gamma_analytic": line_integral(loop, tol=tol),
    }
    if spec.evolution is not None:
        report = evolve_loop(loop, spec.evolution, tol)
        row.update(
            gamma_numeric=report.geometric_phase,
            residual=report.residual,
            unitarity_drift=report.unitarity_drift,
            transition_prob=report.final_transition_prob,
        )
    return row


def _safe_row(args):
    spec, point = args
    try:
        return sweep_row(spec, point), None
    except PTBerryError as exc:
        return None, f"skipped theta0={point[0]:.12g} b_over_a={point[1]:.12g} delta={point[2]:.12g}: {exc}"


def run_sweep(spec: SweepSpec):
    """Rows in grid order plus a list of warnings for skipped (singular) points."""
    jobs = [(spec, p) for p in spec.points()]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_safe_row, jobs))
    else:
        results = [_safe_row(job) for job in jobs]
    rows, warnings = [], []
    for row, warning in results:
        if row is None:
            log.warning(warning)
            warnings.append(warning)
        else:
            rows.append(row)
    return rows, warnings


def flux_check(row: dict, spec: SweepSpec) -> float:
    """Difference between a row's analytic phase and the flux formula (for auditing sweeps)."""
    base = ParamPoint(spec.epsilon, spec.a, row["b_over_a"] * spec.a, row["theta0"], 0.0, row["delta"])
    flux = flux_formula(LoopPath.latitude(base, row["theta0"], spec.winding))
    return float(abs(np.angle(np.exp(1j * (flux.total - row["gamma_analytic"])))))
