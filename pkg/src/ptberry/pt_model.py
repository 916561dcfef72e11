"""Six-parameter family of 2x2 PT-symmetric Hamiltonians, their metric and eigensystem.

A point of the family is ``X = (epsilon, a, b, theta, phi, delta)`` and

    H(X) = epsilon + (a e_r + i b cos(delta) e_theta + i b sin(delta) e_phi) . sigma
    W(X) = |a| / sqrt(a^2 - b^2) * (1 + beta . sigma)
    beta = (b / a) (sin(delta) e_theta - cos(delta) e_phi)

with the spherical frame ``(e_r, e_theta, e_phi)`` at ``(theta, phi)``.  The
``*_field`` helpers evaluate the same objects on arrays of angles with the
remaining parameters fixed; they back the vectorised integrators and
quadratures.  Matrices are plain ``numpy`` arrays of shape ``(..., 2, 2)``,
states of shape ``(..., 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GaugeSingularError, InvalidParameterError, NotPositiveDefiniteError

__all__ = [
    "PAULI",
    "IDENTITY",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "ParamPoint",
    "EigSystem",
    "branch_sign",
    "frames",
    "sigma_dot",
    "build_parity",
    "build_hamiltonian",
    "build_metric",
    "eigensystem",
    "verify_pseudo_hermiticity",
    "inner_w",
    "hamiltonian_field",
    "beta_field",
    "metric_field",
    "norm_sq_field",
    "eigenvector_field",
]

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Tolerances:
    """Single record of every numerical threshold used by the library."""

    structural: float = 1e-12
    eigen: float = 1e-10
    singular: float = 1e-8
    imaginary: float = 1e-6
    quadrature: float = 1e-8
    phase: float = 1e-3
    min_overlap: float = 0.5


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class ParamPoint:
    """One point ``(epsilon, a, b, theta, phi, delta)`` of the Hamiltonian family.

    ``theta`` is clamped into ``[0, pi]``.  ``phi`` and ``delta`` are stored
    unwrapped so that windings of paths stay meaningful.
    """

    epsilon: float
    a: float
    b: float
    theta: float
    phi: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        vals = [self.epsilon, self.a, self.b, self.theta, self.phi, self.delta]
        if not all(np.isfinite(v) for v in vals):
            raise InvalidParameterError(f"non-finite parameter in {self!r}")
        if self.a == 0:
            raise InvalidParameterError("a must be non-zero")
        if not self.a**2 > self.b**2:
            raise InvalidParameterError(
                f"a**2 > b**2 required for a real spectrum (a={self.a}, b={self.b})"
            )
        for name in ("epsilon", "a", "b", "phi", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "theta", float(min(max(self.theta, 0.0), np.pi)))

    @property
    def root(self) -> float:
        """sqrt(a^2 - b^2), half the level splitting."""
        return float(np.sqrt(self.a**2 - self.b**2))

    @property
    def u(self) -> float:
        """sqrt(a^2 - b^2) / a; carries the sign of ``a``."""
        return self.root / self.a

    @property
    def ratio(self) -> float:
        return self.b / self.a

    def at(self, theta: float, phi: float) -> "ParamPoint":
        return replace(self, theta=theta, phi=phi)

    def as_tuple(self) -> tuple:
        return (self.epsilon, self.a, self.b, self.theta, self.phi, self.delta)


def branch_sign(branch) -> int:
    """Map ``'+'``/``'-'``/``+1``/``-1`` to ``+1``/``-1``."""
    if branch in ("+", 1, "plus"):
        return 1
    if branch in ("-", -1, "minus"):
        return -1
    raise ValueError(f"unknown branch {branch!r}; expected '+' or '-'")


def frames(theta, phi):
    """Spherical unit vectors ``e_r, e_theta, e_phi``, each of shape ``(..., 3)``."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    out = np.empty((3,) + theta.shape + (3,))
    e_r, e_theta, e_phi = out
    e_r[..., 0], e_r[..., 1], e_r[..., 2] = st * cp, st * sp, ct
    e_theta[..., 0], e_theta[..., 1], e_theta[..., 2] = ct * cp, ct * sp, -st
    e_phi[..., 0], e_phi[..., 1], e_phi[..., 2] = -sp, cp, 0.0
    return e_r, e_theta, e_phi


def sigma_dot(vec):
    """``vec . sigma`` for (possibly complex) 3-vectors of shape ``(..., 3)``."""
    vec = np.asarray(vec)
    x, y, z = vec[..., 0], vec[..., 1], vec[..., 2]
    out = np.empty(vec.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = z
    out[..., 0, 1] = x - 1j * y
    out[..., 1, 0] = x + 1j * y
    out[..., 1, 1] = -z
    return out


def build_parity(theta: float, phi: float) -> np.ndarray:
    """Parity operator ``e_r . sigma``."""
    e_r, _, _ = frames(theta, phi)
    return sigma_dot(e_r)


def hamiltonian_field(X: ParamPoint, theta, phi) -> np.ndarray:
    """H at every ``(theta, phi)`` with ``epsilon, a, b, delta`` taken from ``X``."""
    e_r, e_t, e_p = frames(theta, phi)
    vec = X.a * e_r + 1j * X.b * (np.cos(X.delta) * e_t + np.sin(X.delta) * e_p)
    return X.epsilon * IDENTITY + sigma_dot(vec)


def build_hamiltonian(X: ParamPoint) -> np.ndarray:
    return hamiltonian_field(X, X.theta, X.phi)


def beta_field(X: ParamPoint, theta, phi) -> np.ndarray:
    _, e_t, e_p = frames(theta, phi)
    return X.ratio * (np.sin(X.delta) * e_t - np.cos(X.delta) * e_p)


def metric_field(X: ParamPoint, theta, phi) -> np.ndarray:
    scale = abs(X.a) / X.root
    return scale * (IDENTITY + sigma_dot(beta_field(X, theta, phi)))


def build_metric(X: ParamPoint) -> np.ndarray:
    """Metric ``W`` making ``H`` self-adjoint; Hermitian, positive definite, det 1."""
    return metric_field(X, X.theta, X.phi)


def norm_sq_field(X: ParamPoint, theta, sign: int):
    """Squared normalisation N^2 of the gauge-fixed eigenvector (independent of phi)."""
    theta = np.asarray(theta, float)
    return (
        2.0
        * abs(X.a)
        * X.root
        * (1.0 + X.ratio * np.sin(X.delta) * np.sin(theta) - sign * X.u * np.cos(theta))
    )


def _raw_eigenvector(X: ParamPoint, theta, phi, sign: int) -> np.ndarray:
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    a, b, d = X.a, X.b, X.delta
    top = np.exp(-1j * phi) * (
        a * np.sin(theta) + 1j * b * np.cos(d) * np.cos(theta) + b * np.sin(d)
    )
    bottom = -a * np.cos(theta) + 1j * b * np.cos(d) * np.sin(theta) + sign * X.root
    return np.stack([top, bottom], axis=-1)


def eigenvector_field(
    X: ParamPoint, theta, phi, branch, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """W-normalised eigenvectors in the fixed gauge (``exp(-i phi)`` on the top entry).

    Raises
    ------
    GaugeSingularError
        If N^2 falls below ``tol.singular * 2|a| sqrt(a^2 - b^2)`` anywhere.
    """
    sign = branch_sign(branch)
    n2 = norm_sq_field(X, theta, sign)
    floor = tol.singular * 2.0 * abs(X.a) * X.root
    if np.any(n2 < floor):
        bad = np.atleast_1d(np.broadcast_to(np.asarray(theta, float), np.shape(n2)))[
            np.atleast_1d(n2 < floor)
        ]
        raise GaugeSingularError(
            f"gauge singular point for branch {'+' if sign > 0 else '-'} "
            f"at theta={bad[0]!r} (N^2={np.min(n2):.3e})"
        )
    vec = _raw_eigenvector(X, theta, phi, sign)
    return vec / np.sqrt(np.broadcast_to(n2, vec.shape[:-1]))[..., None]


@dataclass(frozen=True)
class EigSystem:
    e_plus: float
    e_minus: float
    psi_plus: np.ndarray = field(repr=False)
    psi_minus: np.ndarray = field(repr=False)
    n_plus: float
    n_minus: float
    u: float

    def energy(self, branch) -> float:
        return self.e_plus if branch_sign(branch) > 0 else self.e_minus

    def state(self, branch) -> np.ndarray:
        return self.psi_plus if branch_sign(branch) > 0 else self.psi_minus


def eigensystem(X: ParamPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> EigSystem:
    """Energies ``epsilon +- sqrt(a^2-b^2)`` and the gauge-fixed, W-orthonormal eigenvectors."""
    return EigSystem(
        e_plus=X.epsilon + X.root,
        e_minus=X.epsilon - X.root,
        psi_plus=eigenvector_field(X, X.theta, X.phi, +1, tol),
        psi_minus=eigenvector_field(X, X.theta, X.phi, -1, tol),
        n_plus=float(np.sqrt(norm_sq_field(X, X.theta, +1))),
        n_minus=float(np.sqrt(norm_sq_field(X, X.theta, -1))),
        u=X.u,
    )


def verify_pseudo_hermiticity(X: ParamPoint) -> float:
    """Max-entry residual of ``W H - H^dagger W``."""
    H = build_hamiltonian(X)
    W = build_metric(X)
    return float(np.max(np.abs(W @ H - H.conj().T @ W)))


def inner_w(W: np.ndarray, phi: np.ndarray, psi: np.ndarray) -> complex:
    """W-inner product ``<phi|W|psi>``; ``W`` must be Hermitian positive definite."""
    W = np.asarray(W, dtype=complex)
    if np.max(np.abs(W - W.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(W))):
        raise NotPositiveDefiniteError("metric is not Hermitian")
    if np.min(np.linalg.eigvalsh(W)) <= 0:
        raise NotPositiveDefiniteError("metric is not positive definite")
    return complex(np.conj(phi) @ W @ psi)
