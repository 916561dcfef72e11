"""Randomised invariant suite over the parameter family."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .hermitian_map import build_eta, h_field
from .metric_dynamics import build_m, metric_gradient, solve_metric_equation
from .pt_model import (
    DEFAULT_TOLERANCES,
    ParamPoint,
    build_hamiltonian,
    build_metric,
    eigenvector_field,
    norm_sq_field,
)

__all__ = ["random_points", "InvariantResult", "run_invariant_suite", "CHECKS"]

CHECKS = (
    "pseudo_hermiticity",
    "metric_determinant",
    "metric_equation",
    "eta_squared",
    "h_closed_form",
    "w_orthonormality",
)


def random_points(seed: int, draws: int, max_ratio: float = 0.99):
    """Valid points with ``|a|`` in [0.1, 10] (random sign) and ``|b/a| <= max_ratio``."""
    rng = np.random.default_rng(seed)
    mag = rng.uniform(0.1, 10.0, draws)
    a = np.where(rng.random(draws) < 0.5, -mag, mag)
    b = a * rng.uniform(-max_ratio, max_ratio, draws)
    eps = rng.uniform(-5.0, 5.0, draws)
    theta = rng.uniform(0.0, np.pi, draws)
    phi = rng.uniform(0.0, 2 * np.pi, draws)
    delta = rng.uniform(0.0, 2 * np.pi, draws)
    for row in zip(eps, a, b, theta, phi, delta):
        yield ParamPoint(*row)


@dataclass
class InvariantResult:
    draws: int
    max_residual: dict = field(default_factory=lambda: {name: 0.0 for name in CHECKS})
    worst_point: dict = field(default_factory=dict)
    exceptional_point_rejected: bool = False

    def violations(self, tolerance: float) -> dict:
        return {k: v for k, v in self.max_residual.items() if not v <= tolerance}

    def record(self, name: str, value: float, X: ParamPoint):
        if not value <= self.max_residual[name]:
            self.max_residual[name] = float(value)
            self.worst_point[name] = X


def _check_point(X: ParamPoint):
    H = build_hamiltonian(X)
    W = build_metric(X)
    yield "pseudo_hermiticity", np.max(np.abs(W @ H - H.conj().T @ W))
    yield "metric_determinant", abs(np.linalg.det(W) - 1.0)

    m = build_m(X)
    gw_theta, gw_phi = metric_gradient(X)
    yield "metric_equation", max(
        np.max(np.abs(solve_metric_equation(W, gw_theta) - m.m_theta)),
        np.max(np.abs(solve_metric_equation(W, gw_phi) - m.m_phi)),
    )

    eta, eta_inv = build_eta(X)
    yield "eta_squared", np.max(np.abs(eta @ eta - W))
    yield "h_closed_form", np.max(np.abs(eta @ H @ eta_inv - h_field(X, X.theta, X.phi)))

    floor = DEFAULT_TOLERANCES.singular * 2 * abs(X.a) * X.root
    if min(norm_sq_field(X, X.theta, 1), norm_sq_field(X, X.theta, -1)) > floor:
        p = eigenvector_field(X, X.theta, X.phi, "+")
        q = eigenvector_field(X, X.theta, X.phi, "-")
        gram = np.array([[u.conj() @ W @ v for v in (p, q)] for u in (p, q)])
        yield "w_orthonormality", np.max(np.abs(gram - np.eye(2)))


def run_invariant_suite(seed: int = 42, draws: int = 10_000) -> InvariantResult:
    """Maximum residual of each structural identity over ``draws`` random points."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    result = InvariantResult(draws)
    for X in random_points(seed, draws):
        for name, value in _check_point(X):
            result.record(name, value, X)
    try:
        ParamPoint(0.0, 1.0, 1.0, 0.5)
    except InvalidParameterError:
        result.exceptional_point_rejected = True
    return result
