"""Berry-like phase of the + branch: closed forms, connection quadrature, flux picture.

The cyclic phase is the loop integral of the connection

    A = i [ <psi|W|d psi> + <psi|W M|psi> ]

whose components for the + branch are

    F_phi   = (1 + U cos(theta)) / 2
    F_theta = (b/a) cos(delta) / (2 [1 + (b/a) sin(delta) sin(theta) - U cos(theta)])

Geometrically this is the flux of a monopole of charge ``-U/2`` plus a string
along +z that carries ``(1 + U) pi`` per winding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import ConsistencyError, GaugeSingularError
from .metric_dynamics import m_field
from .paths import LoopPath
from .pt_model import (
    DEFAULT_TOLERANCES,
    ParamPoint,
    Tolerances,
    branch_sign,
    eigenvector_field,
    metric_field,
)

__all__ = [
    "ConnectionSample",
    "FluxDecomposition",
    "BEffSample",
    "wrap_phase",
    "phase_distance",
    "connection_analytic",
    "connection_terms",
    "connection_numeric",
    "circulation",
    "line_integral",
    "solid_angle",
    "flux_formula",
    "b_eff_sample",
    "gauge_invariance_check",
    "fit_monopole_charge",
]

FD_STEP = 1e-6
MIN_PANELS = 10_000


@dataclass(frozen=True)
class ConnectionSample:
    f_theta: float
    f_phi: float


@dataclass(frozen=True)
class FluxDecomposition:
    monopole_part: float
    string_part: float
    total: float


@dataclass(frozen=True)
class BEffSample:
    field: np.ndarray
    on_string: bool
    string_flux: float


def wrap_phase(x):
    """Map onto ``[0, 2 pi)``."""
    return np.mod(x, 2 * np.pi)


def phase_distance(x, y) -> float:
    """Distance between two phases on the circle."""
    return float(abs(np.angle(np.exp(1j * (np.asarray(x) - np.asarray(y))))))


# -- connection ---------------------------------------------------------

def _analytic_field(X: ParamPoint, theta, tol: Tolerances = DEFAULT_TOLERANCES):
    theta = np.asarray(theta, float)
    denom = 1.0 + X.ratio * np.sin(X.delta) * np.sin(theta) - X.u * np.cos(theta)
    if np.any(denom < tol.singular):
        raise GaugeSingularError(
            f"connection denominator vanishes (min {np.min(denom):.3e}); gauge singular point"
        )
    f_theta = X.ratio * np.cos(X.delta) / (2.0 * denom)
    f_phi = 0.5 * (1.0 + X.u * np.cos(theta))
    return f_theta, f_phi


def connection_analytic(X: ParamPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> ConnectionSample:
    """Closed-form connection components of the + branch at ``X``."""
    f_theta, f_phi = _analytic_field(X, X.theta, tol)
    return ConnectionSample(float(f_theta), float(f_phi))


def connection_terms(X: ParamPoint, theta, phi, branch="+", gauge=None, step: float = FD_STEP,
                     tol: Tolerances = DEFAULT_TOLERANCES):
    """Complex pieces of the connection on arrays of angles.

    Returns ``(berry, metric)``, each a pair ``(theta_component, phi_component)``
    where ``berry = i <psi|W|d psi>`` (central differences of the gauge-fixed
    eigenvector) and ``metric = i <psi|W M|psi>``.  ``gauge(theta, phi)``, if
    given, multiplies the eigenvector by ``exp(i gauge)`` before differencing.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))

    def state(t, p):
        psi = eigenvector_field(X, t, p, branch, tol)
        if gauge is not None:
            psi = psi * np.exp(1j * np.asarray(gauge(t, p)))[..., None]
        return psi

    psi = state(theta, phi)
    W = metric_field(X, theta, phi)
    w_psi = np.einsum("...ij,...j->...i", W, psi)
    d_theta = (state(theta + step, phi) - state(theta - step, phi)) / (2 * step)
    d_phi = (state(theta, phi + step) - state(theta, phi - step)) / (2 * step)
    m_theta, m_phi = m_field(X, theta, phi)

    def bracket(left, mat_or_vec):
        return 1j * np.einsum("...i,...i->...", left.conj(), mat_or_vec)

    berry = (bracket(w_psi, d_theta), bracket(w_psi, d_phi))
    metric = (
        bracket(w_psi, np.einsum("...ij,...j->...i", m_theta, psi)),
        bracket(w_psi, np.einsum("...ij,...j->...i", m_phi, psi)),
    )
    return berry, metric


def _numeric_field(X, theta, phi, branch="+", gauge=None, tol=DEFAULT_TOLERANCES):
    (b_t, b_p), (m_t, m_p) = connection_terms(X, theta, phi, branch, gauge, tol=tol)
    f_theta, f_phi = b_t + m_t, b_p + m_p
    worst = max(np.max(np.abs(f_theta.imag), initial=0.0), np.max(np.abs(f_phi.imag), initial=0.0))
    if worst > tol.imaginary:
        raise ConsistencyError(f"connection has imaginary part {worst:.3e}")
    return f_theta.real, f_phi.real


def connection_numeric(X: ParamPoint, branch="+", tol: Tolerances = DEFAULT_TOLERANCES) -> ConnectionSample:
    """Connection from finite differences of the eigenvectors plus the metric term."""
    f_theta, f_phi = _numeric_field(X, X.theta, X.phi, branch, tol=tol)
    return ConnectionSample(float(f_theta), float(f_phi))


# -- quadrature ---------------------------------------------------------

def _panels_per_segment(path: LoopPath, panels: int) -> np.ndarray:
    lengths = path.segment_lengths
    total = lengths.sum()
    if total == 0:
        return np.zeros(len(lengths), dtype=int)
    n = np.ceil(panels * lengths / total).astype(int)
    n = np.where(lengths > 0, np.maximum(n, 2), 0)
    return n + (n % 2)


def _simpson_loop(path: LoopPath, integrand, panels: int) -> float:
    """Composite Simpson of ``integrand(theta, phi, dtheta, dphi)`` segment by segment."""
    total = 0.0
    for (p0, p1), n in zip(zip(path.vertices[:-1], path.vertices[1:]), _panels_per_segment(path, panels)):
        if n == 0:
            continue
        u = np.linspace(0.0, 1.0, n + 1)
        d = p1 - p0
        values = integrand(p0[0] + u * d[0], p0[1] + u * d[1], d[0], d[1])
        total += simpson(values, x=u)
    return float(total)


def _converged(path, integrand, panels, tol: Tolerances) -> float:
    coarse = _simpson_loop(path, integrand, panels)
    fine = _simpson_loop(path, integrand, 2 * panels)
    if abs(fine - coarse) > tol.quadrature * max(1.0, abs(fine)):
        raise ConsistencyError(
            f"quadrature not converged: {coarse!r} vs {fine!r} with {panels} panels"
        )
    return fine


def circulation(path: LoopPath, use_analytic: bool = True, branch="+", gauge=None,
                panels: int = MIN_PANELS, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Unwrapped loop integral of the connection (not reduced modulo 2 pi)."""
    X = path.base
    if use_analytic:
        if branch_sign(branch) != 1:
            raise ValueError("closed-form connection exists for the + branch only")
        if gauge is not None:
            raise ValueError("gauge transformations need the numeric connection")

        def integrand(theta, phi, dt, dp):
            f_theta, f_phi = _analytic_field(X, theta, tol)
            return f_theta * dt + f_phi * dp
    else:
        def integrand(theta, phi, dt, dp):
            f_theta, f_phi = _numeric_field(X, theta, phi, branch, gauge, tol)
            return f_theta * dt + f_phi * dp

    return _converged(path, integrand, max(panels, MIN_PANELS), tol)


def line_integral(path: LoopPath, use_analytic: bool = True, branch="+",
                  tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Berry-like phase of the loop, reduced to ``[0, 2 pi)``."""
    return float(wrap_phase(circulation(path, use_analytic, branch, tol=tol)))


def solid_angle(path: LoopPath, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``Omega = loop integral of (1 - cos theta) dphi``.

    This is the signed area of the cap bounded by the loop on the side away
    from the south pole; a counter-clockwise circle around +z gives a
    positive value.
    """
    def integrand(theta, phi, dt, dp):
        return (1.0 - np.cos(theta)) * dp

    return _converged(path, integrand, MIN_PANELS, tol)


def flux_formula(path: LoopPath, X: ParamPoint | None = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> FluxDecomposition:
    """Monopole flux ``-(U/2) Omega`` plus string flux ``(1 + U) pi`` per winding."""
    X = path.base if X is None else X
    monopole = -0.5 * X.u * solid_angle(path, tol)
    string = (1.0 + X.u) * np.pi * path.winding
    return FluxDecomposition(monopole, float(string), float(wrap_phase(monopole + string)))


def b_eff_sample(r_hat, u: float, axis_tol: float = 1e-12) -> BEffSample:
    """Effective field on the unit sphere: monopole part and the +z string marker."""
    r_hat = np.asarray(r_hat, dtype=float)
    if abs(np.linalg.norm(r_hat) - 1.0) > 1e-9:
        raise ValueError("r_hat must be a unit vector")
    on_string = bool(np.hypot(r_hat[0], r_hat[1]) <= axis_tol and r_hat[2] > 0)
    return BEffSample(-0.5 * u * r_hat, on_string, (1.0 + u) * np.pi if on_string else 0.0)


def gauge_invariance_check(path: LoopPath, f, branch="+",
                           tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Change of the numeric loop phase under ``psi -> exp(i f) psi``, modulo 2 pi."""
    plain = circulation(path, use_analytic=False, branch=branch, tol=tol)
    moved = circulation(path, use_analytic=False, branch=branch, gauge=f, tol=tol)
    return phase_distance(moved, plain)


def fit_monopole_charge(base: ParamPoint, theta0s, winding: int = 1,
                        tol: Tolerances = DEFAULT_TOLERANCES):
    """Least-squares slope and intercept of the loop phase against solid angle.

    Latitude loops over ``theta0s``; the unreduced circulation is fitted so no
    2 pi jumps enter.  The slope is the monopole charge ``-U/2``.
    """
    theta0s = np.sort(np.asarray(theta0s, dtype=float))
    omega, gamma = [], []
    for t0 in theta0s:
        loop = LoopPath.latitude(base, t0, winding)
        omega.append(solid_angle(loop, tol))
        gamma.append(circulation(loop, tol=tol))
    slope, intercept = np.polyfit(np.array(omega), np.array(gamma), 1)
    return float(slope), float(intercept)
