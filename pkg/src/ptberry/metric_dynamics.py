"""Velocity-coupled correction to the generator for a time-dependent metric.

With ``K = M . dX/dt`` and ``grad W = M W + W M`` (``M`` Hermitian), the
generator ``Lambda = H - i K`` preserves ``<Phi|W(X(t))|Psi>``.  On the
``(theta, phi)`` manifold |beta| is constant, which gives the closed form
``M = (1/2) grad(beta) . sigma``.  :func:`solve_metric_equation` solves the
same matrix equation for arbitrary positive definite ``W`` and is used as an
independent check of the closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError
from .pt_model import ParamPoint, frames, hamiltonian_field, sigma_dot

__all__ = [
    "TangentVector",
    "MField",
    "beta_partials",
    "metric_gradient",
    "build_m",
    "build_k",
    "build_lambda",
    "m_field",
    "k_field",
    "lambda_field",
    "solve_metric_equation",
]


@dataclass(frozen=True)
class TangentVector:
    """Rates ``(dtheta/dt, dphi/dt)``."""

    d_theta: float = 0.0
    d_phi: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.d_theta) and np.isfinite(self.d_phi)):
            raise ValueError("tangent components must be finite")

    def __mul__(self, alpha: float) -> "TangentVector":
        return TangentVector(alpha * self.d_theta, alpha * self.d_phi)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MField:
    m_theta: np.ndarray
    m_phi: np.ndarray


def beta_partials(X: ParamPoint, theta, phi):
    """Closed-form ``d beta / d theta`` and ``d beta / d phi`` (shape ``(..., 3)``)."""
    e_r, e_t, e_p = frames(theta, phi)
    theta = np.asarray(theta, float)[..., None]
    r, sd, cd = X.ratio, np.sin(X.delta), np.cos(X.delta)
    d_theta = -r * sd * e_r + 0.0 * theta
    d_phi = r * (cd * np.sin(theta) * e_r + cd * np.cos(theta) * e_t + sd * np.cos(theta) * e_p)
    return d_theta, d_phi


def metric_gradient(X: ParamPoint, theta=None, phi=None):
    """Analytic ``(dW/dtheta, dW/dphi)``."""
    theta = X.theta if theta is None else theta
    phi = X.phi if phi is None else phi
    scale = abs(X.a) / X.root
    d_theta, d_phi = beta_partials(X, theta, phi)
    return scale * sigma_dot(d_theta), scale * sigma_dot(d_phi)


def m_field(X: ParamPoint, theta, phi):
    d_theta, d_phi = beta_partials(X, theta, phi)
    return 0.5 * sigma_dot(d_theta), 0.5 * sigma_dot(d_phi)


def build_m(X: ParamPoint) -> MField:
    m_theta, m_phi = m_field(X, X.theta, X.phi)
    return MField(m_theta, m_phi)


def k_field(X: ParamPoint, theta, phi, d_theta, d_phi) -> np.ndarray:
    m_theta, m_phi = m_field(X, theta, phi)
    d_theta = np.asarray(d_theta, float)[..., None, None]
    d_phi = np.asarray(d_phi, float)[..., None, None]
    return m_theta * d_theta + m_phi * d_phi


def build_k(X: ParamPoint, v: TangentVector) -> np.ndarray:
    """``K = M_theta dtheta/dt + M_phi dphi/dt``; Hermitian and linear in ``v``."""
    return k_field(X, X.theta, X.phi, v.d_theta, v.d_phi)


def lambda_field(X: ParamPoint, theta, phi, d_theta, d_phi) -> np.ndarray:
    return hamiltonian_field(X, theta, phi) - 1j * k_field(X, theta, phi, d_theta, d_phi)


def build_lambda(X: ParamPoint, v: TangentVector) -> np.ndarray:
    """Full generator ``H - i K`` of the metric-preserving evolution."""
    return lambda_field(X, X.theta, X.phi, v.d_theta, v.d_phi)


def solve_metric_equation(W: np.ndarray, grad_w: np.ndarray) -> np.ndarray:
    """Hermitian ``M`` with ``M W + W M = grad_w`` for positive definite ``W`` of any size.

    In the eigenbasis ``W = V diag(w) V^dagger`` the equation decouples into
    ``M'_ij (w_i + w_j) = G'_ij``.
    """
    W = np.asarray(W, dtype=complex)
    grad_w = np.asarray(grad_w, dtype=complex)
    if W.shape != grad_w.shape or W.shape[-1] != W.shape[-2]:
        raise ValueError("W and grad_w must be square matrices of equal shape")
    if np.max(np.abs(W - W.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(W))):
        raise NotPositiveDefiniteError("W is not Hermitian")
    w, V = np.linalg.eigh(W)
    if w.min() <= 0:
        raise NotPositiveDefiniteError(f"W has non-positive eigenvalue {w.min():.3e}")
    g = V.conj().T @ grad_w @ V
    m = g / (w[:, None] + w[None, :])
    return V @ m @ V.conj().T
