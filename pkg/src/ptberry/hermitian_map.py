"""Map to an equivalent Hermitian problem through the positive square root of W.

``eta = c (W + 1)`` with ``c = sqrt(sqrt(a^2-b^2) / (2 (|a| + sqrt(a^2-b^2))))``
satisfies ``eta^2 = W``.  Then ``h = eta H eta^-1 = epsilon + U |a| e_r . sigma``
and ``psi_eta = eta Psi`` obeys ``i d psi_eta/dt = (h + v) psi_eta`` with the
velocity-dependent Hermitian term

    v = i (d eta eta^-1 - eta M eta^-1) . dX/dt.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adiabatic_evolution import (
    EvolutionConfig,
    PhaseReport,
    attach_analytic,
    extract_phases,
    propagate,
)
from .errors import ConsistencyError
from .metric_dynamics import MField, TangentVector, m_field, metric_gradient
from .paths import LoopPath
from .pt_model import (
    DEFAULT_TOLERANCES,
    IDENTITY,
    ParamPoint,
    Tolerances,
    build_hamiltonian,
    eigenvector_field,
    frames,
    metric_field,
    sigma_dot,
)

__all__ = [
    "HermitianPicture",
    "eta_prefactor",
    "eta_field",
    "build_eta",
    "h_field",
    "build_h",
    "v_field",
    "build_v",
    "hermitian_picture",
    "evolve_hermitian_picture",
]


@dataclass(frozen=True)
class HermitianPicture:
    eta: np.ndarray
    eta_inv: np.ndarray
    h: np.ndarray
    v: np.ndarray


def eta_prefactor(X: ParamPoint) -> float:
    return float(np.sqrt(X.root / (2.0 * (abs(X.a) + X.root))))


def eta_field(X: ParamPoint, theta, phi) -> np.ndarray:
    return eta_prefactor(X) * (metric_field(X, theta, phi) + IDENTITY)


def build_eta(X: ParamPoint):
    """``(eta, eta^-1)``; eta is Hermitian positive definite with unit determinant."""
    eta = eta_field(X, X.theta, X.phi)
    return eta, np.linalg.inv(eta)


def h_field(X: ParamPoint, theta, phi) -> np.ndarray:
    e_r, _, _ = frames(theta, phi)
    return X.epsilon * IDENTITY + X.u * abs(X.a) * sigma_dot(e_r)


def build_h(X: ParamPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Closed-form Hermitian partner of ``H``, cross-checked against ``eta H eta^-1``."""
    eta, eta_inv = build_eta(X)
    numeric = eta @ build_hamiltonian(X) @ eta_inv
    closed = h_field(X, X.theta, X.phi)
    err = np.max(np.abs(numeric - closed))
    if err > tol.structural * max(1.0, abs(X.epsilon) + abs(X.a)):
        raise ConsistencyError(f"eta H eta^-1 differs from the closed form by {err:.3e}")
    return closed


def v_field(X: ParamPoint, theta, phi, d_theta, d_phi, m: MField | None = None) -> np.ndarray:
    """Velocity term on arrays; ``m`` overrides the default ``M`` components."""
    c = eta_prefactor(X)
    eta = eta_field(X, theta, phi)
    eta_inv = np.linalg.inv(eta)
    gw_theta, gw_phi = metric_gradient(X, theta, phi)
    if m is None:
        m_theta, m_phi = m_field(X, theta, phi)
    else:
        m_theta, m_phi = m.m_theta, m.m_phi
    d_theta = np.asarray(d_theta, float)[..., None, None]
    d_phi = np.asarray(d_phi, float)[..., None, None]
    d_eta = c * (gw_theta * d_theta + gw_phi * d_phi)
    mk = m_theta * d_theta + m_phi * d_phi
    return 1j * (d_eta @ eta_inv - eta @ mk @ eta_inv)


def build_v(X: ParamPoint, v_tangent: TangentVector, m: MField | None = None) -> np.ndarray:
    """Hermitian perturbation ``i eta [eta^-1 d eta - M] eta^-1 . dX/dt``.

    Passing ``m = MField(eta^-1 d_theta eta, eta^-1 d_phi eta)`` reproduces the
    special choice for which the perturbation vanishes.
    """
    return v_field(X, X.theta, X.phi, v_tangent.d_theta, v_tangent.d_phi, m)


def hermitian_picture(X: ParamPoint, v_tangent: TangentVector = TangentVector(),
                      tol: Tolerances = DEFAULT_TOLERANCES) -> HermitianPicture:
    eta, eta_inv = build_eta(X)
    return HermitianPicture(eta, eta_inv, build_h(X, tol), build_v(X, v_tangent))


def evolve_hermitian_picture(path: LoopPath, cfg: EvolutionConfig, include_v: bool = True,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> PhaseReport:
    """Evolve ``eta psi_branch`` with ``h + v`` (or ``h`` alone) and report the phases.

    Phases are read off with the ordinary inner product, which is the image of
    the W-inner product under ``eta``.
    """
    X = path.base
    path.check_nonsingular(cfg.branch, tol)
    start = path.start

    def generator(theta, phi, v_theta, v_phi):
        gen = h_field(X, theta, phi)
        if include_v:
            gen = gen + v_field(X, theta, phi, v_theta, v_phi)
        return gen

    initial = eta_field(start, start.theta, start.phi) @ eigenvector_field(
        start, start.theta, start.phi, cfg.branch, tol
    )
    traj = propagate(generator, path, cfg, initial, picture="hermitian")
    report = attach_analytic(extract_phases(traj, path, cfg, tol), path, cfg.branch, tol)
    if not include_v:
        report.picture = "hermitian-no-v"
    return report
