"""Time evolution along a loop and extraction of the cyclic phases.

The state obeys ``i d|Psi>/dt = (H - i K)|Psi>`` with the parameters moving
along a :class:`~ptberry.paths.LoopPath` at uniform speed.  Integration is the
classic fixed-step RK4 scheme.  Because the equation is linear, one RK4 step is
the 2x2 matrix

    P_n = I + h/6 (k1 + 2 k2 + 2 k3 + k4)   (k's as matrix polynomials of A = -i Lambda)

so the step matrices are assembled for a whole block of steps at once and
chained by a prefix product, which keeps long adiabatic runs fast without
changing the scheme.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GaugeSingularError, NonAdiabaticError, ResolutionError
from .metric_dynamics import TangentVector, lambda_field, m_field
from .paths import LoopPath
from .pt_model import (
    DEFAULT_TOLERANCES,
    IDENTITY,
    ParamPoint,
    Tolerances,
    branch_sign,
    eigenvector_field,
    frames,
    metric_field,
    norm_sq_field,
    sigma_dot,
)

__all__ = [
    "EvolutionConfig",
    "Trajectory",
    "PhaseReport",
    "propagate",
    "integrate",
    "unitarity_drift",
    "extract_phases",
    "evolve_loop",
    "eigenvector_gradient",
    "hamiltonian_gradient",
    "adiabaticity_diagnostics",
]

_BLOCK = 1 << 15


@dataclass(frozen=True)
class EvolutionConfig:
    total_time: float
    steps: int
    branch: str = "+"
    record_stride: int = 10

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if int(self.steps) != self.steps or self.steps < 100:
            raise ValueError("steps must be an integer >= 100")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "record_stride", int(self.record_stride))
        branch_sign(self.branch)

    @property
    def dt(self) -> float:
        return self.total_time / self.steps


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: np.ndarray
    base: ParamPoint
    picture: str = "pt"


@dataclass
class PhaseReport:
    total_phase: float
    dynamical_phase: float
    geometric_phase: float
    analytic_phase: float = float("nan")
    residual: float = float("nan")
    unitarity_drift: float = float("nan")
    final_transition_prob: float = float("nan")
    picture: str = "pt"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "picture": self.picture,
            "total_phase": self.total_phase,
            "dynamical_phase": self.dynamical_phase,
            "geometric_phase": self.geometric_phase,
            "analytic_phase": self.analytic_phase,
            "residual": self.residual,
            "unitarity_drift": self.unitarity_drift,
            "final_transition_prob": self.final_transition_prob,
        }


def _check_resolution(X: ParamPoint, cfg: EvolutionConfig):
    e_max = abs(X.epsilon) + X.root
    needed = 10.0 * e_max * cfg.total_time / np.pi
    if cfg.steps < needed:
        raise ResolutionError(
            f"{cfg.steps} steps cannot resolve |E|={e_max:.4g} over T={cfg.total_time:g}; "
            f"need at least {int(np.ceil(needed))}"
        )


def _step_grid(path: LoopPath, cfg: EvolutionConfig):
    """Start times and sizes of all steps, with no step straddling a vertex.

    Steps are shared among segments in proportion to their duration (largest
    remainder), so a one-segment loop gets the uniform grid ``h = T / steps``.
    """
    T, n = cfg.total_time, cfg.steps
    lengths = path.segment_lengths
    total = lengths.sum()
    if total == 0.0:
        share = np.zeros(len(lengths))
        share[0] = n
    else:
        share = n * lengths / total
    counts = np.floor(share).astype(int)
    counts = np.where((lengths > 0) & (counts == 0), 1, counts)
    while counts.sum() < n:
        counts[np.argmax(share - counts)] += 1
    while counts.sum() > n:
        counts[np.argmax(np.where(counts > 1, counts - share, -np.inf))] -= 1
    knots = np.concatenate([[0.0], np.cumsum(lengths) / total if total else np.ones(len(lengths))]) * T
    starts, sizes = [], []
    for t0, t1, m in zip(knots[:-1], knots[1:], counts):
        if m == 0:
            continue
        starts.append(t0 + (t1 - t0) * np.arange(m) / m)
        sizes.append(np.full(m, (t1 - t0) / m))
    starts, sizes = np.concatenate(starts), np.concatenate(sizes)
    return starts, sizes


def propagate(generator, path: LoopPath, cfg: EvolutionConfig, initial, picture="pt") -> Trajectory:
    """RK4 for ``i dpsi/dt = G(t) psi`` with ``G = generator(theta, phi, dtheta_dt, dphi_dt)``.

    ``generator`` must accept equal-shape arrays and return ``(..., 2, 2)``.
    Steps never cross a path vertex, and the (piecewise constant) velocity of
    a step is taken at its midpoint, so corners do not spoil the order.  The
    state is recorded at ``t = 0`` and after every ``record_stride`` steps
    (the final step is always recorded).
    """
    _check_resolution(path.base, cfg)
    T, n = cfg.total_time, cfg.steps
    starts, sizes = _step_grid(path, cfg)

    def a_matrix(t, v_theta, v_phi):
        theta, phi = path.point(t / T)
        return -1j * generator(theta, phi, v_theta / T, v_phi / T)

    psi = np.asarray(initial, dtype=complex).copy()
    times, states, params = [0.0], [psi.copy()], [path.point(0.0)]
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        t, h = starts[i0:i1], sizes[i0:i1]
        v_theta, v_phi = path.velocity((t + 0.5 * h) / T)
        a1 = a_matrix(t, v_theta, v_phi)
        a2 = a_matrix(t + 0.5 * h, v_theta, v_phi)
        a4 = a_matrix(t + h, v_theta, v_phi)
        h = h[:, None, None]
        k2 = a2 @ (IDENTITY + 0.5 * h * a1)
        k3 = a2 @ (IDENTITY + 0.5 * h * k2)
        k4 = a4 @ (IDENTITY + h * k3)
        prefix = IDENTITY + (h / 6.0) * (a1 + 2.0 * k2 + 2.0 * k3 + k4)
        # Hillis-Steele scan: prefix[j] <- P_j ... P_0
        shift = 1
        while shift < len(prefix):
            prefix[shift:] = prefix[shift:] @ prefix[:-shift]
            shift *= 2
        block_states = prefix @ psi
        idx = np.arange(i0, i1) + 1
        keep = (idx % cfg.record_stride == 0) | (idx == n)
        kept_t = np.where(idx[keep] == n, T, starts[idx[keep] - 1] + sizes[idx[keep] - 1])
        times.extend(kept_t)
        states.extend(block_states[keep])
        kept_theta, kept_phi = path.point(kept_t / T)
        params.extend(zip(kept_theta, kept_phi))
        psi = block_states[-1]
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        params=np.asarray(params, dtype=float).reshape(-1, 2),
        base=path.base,
        picture=picture,
    )


def integrate(path: LoopPath, cfg: EvolutionConfig, initial) -> Trajectory:
    """Evolve ``initial`` with the metric-preserving generator ``H - i K``."""
    X = path.base

    def generator(theta, phi, v_theta, v_phi):
        return lambda_field(X, theta, phi, v_theta, v_phi)

    return propagate(generator, path, cfg, initial, picture="pt")


def _norms(traj: Trajectory) -> np.ndarray:
    psi = traj.states
    if traj.picture == "pt":
        W = metric_field(traj.base, traj.params[:, 0], traj.params[:, 1])
        return np.einsum("ni,nij,nj->n", psi.conj(), W, psi).real
    return np.einsum("ni,ni->n", psi.conj(), psi).real


def unitarity_drift(traj: Trajectory) -> float:
    """Largest deviation of the (metric) norm from its initial value over the record."""
    norms = _norms(traj)
    return float(np.max(np.abs(norms - norms[0])))


def _reference_states(path: LoopPath, branch, picture, tol):
    X = path.start
    psi = eigenvector_field(X, X.theta, X.phi, branch, tol)
    W = metric_field(X, X.theta, X.phi)
    try:
        other = eigenvector_field(X, X.theta, X.phi, -branch_sign(branch), tol)
    except GaugeSingularError:
        # only |<other|W|.>| is needed, so any phase will do: take the
        # W-orthogonal complement of psi
        w_psi = W @ psi
        other = np.array([np.conj(w_psi[1]), -np.conj(w_psi[0])])
        other = other / np.sqrt((other.conj() @ W @ other).real)
    if picture == "pt":
        return psi, other, W
    from .hermitian_map import eta_field

    eta = eta_field(X, X.theta, X.phi)
    return eta @ psi, eta @ other, IDENTITY


def extract_phases(traj: Trajectory, path: LoopPath, cfg: EvolutionConfig,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> PhaseReport:
    """Split the final overlap with the initial eigenstate into dynamical and geometric parts."""
    psi, other, metric = _reference_states(path, cfg.branch, traj.picture, tol)
    final = traj.states[-1]
    overlap = np.conj(psi) @ metric @ final
    if abs(overlap) < tol.min_overlap:
        raise NonAdiabaticError(
            f"final overlap with the initial branch is {abs(overlap):.3g}; run is not adiabatic"
        )
    energy = path.base.epsilon + branch_sign(cfg.branch) * path.base.root
    total = float(np.angle(overlap))
    dynamical = -energy * traj.times[-1]
    return PhaseReport(
        total_phase=float(np.mod(total, 2 * np.pi)),
        dynamical_phase=float(dynamical),
        geometric_phase=float(np.mod(total - dynamical, 2 * np.pi)),
        unitarity_drift=unitarity_drift(traj),
        final_transition_prob=float(abs(np.conj(other) @ metric @ final) ** 2),
        picture=traj.picture,
    )


def attach_analytic(report: PhaseReport, path: LoopPath, branch,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> PhaseReport:
    """Fill ``analytic_phase`` (closed form for +, numeric connection for -) and ``residual``."""
    from .geometric_phase import line_integral, phase_distance

    use_analytic = branch_sign(branch) == 1
    report.analytic_phase = line_integral(path, use_analytic=use_analytic, branch=branch, tol=tol)
    report.residual = phase_distance(report.geometric_phase, report.analytic_phase)
    return report


def evolve_loop(path: LoopPath, cfg: EvolutionConfig,
                tol: Tolerances = DEFAULT_TOLERANCES) -> PhaseReport:
    """Start in the ``cfg.branch`` eigenstate, go once around ``path``, report the phases."""
    path.check_nonsingular(cfg.branch, tol)
    X = path.start
    initial = eigenvector_field(X, X.theta, X.phi, cfg.branch, tol)
    traj = integrate(path, cfg, initial)
    return attach_analytic(extract_phases(traj, path, cfg, tol), path, cfg.branch, tol)


# -- adiabaticity diagnostics ------------------------------------------

def eigenvector_gradient(X: ParamPoint, theta, phi, branch, tol: Tolerances = DEFAULT_TOLERANCES):
    """Analytic ``(d psi/d theta, d psi/d phi)`` of the gauge-fixed eigenvector."""
    sign = branch_sign(branch)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    a, b, d = X.a, X.b, X.delta
    psi = eigenvector_field(X, theta, phi, branch, tol)
    n2 = norm_sq_field(X, theta, sign)
    n = np.sqrt(n2)
    dn2_theta = 2 * abs(a) * X.root * (X.ratio * np.sin(d) * np.cos(theta) + sign * X.u * np.sin(theta))
    raw_top_theta = np.exp(-1j * phi) * (a * np.cos(theta) - 1j * b * np.cos(d) * np.sin(theta))
    raw_bot_theta = a * np.sin(theta) + 1j * b * np.cos(d) * np.cos(theta)
    d_theta = np.stack([raw_top_theta, raw_bot_theta], -1) / n[..., None]
    d_theta = d_theta - psi * (dn2_theta / (2 * n2))[..., None]
    d_phi = np.stack([-1j * psi[..., 0], np.zeros_like(psi[..., 1])], -1)
    return d_theta, d_phi


def hamiltonian_gradient(X: ParamPoint, theta, phi):
    """Analytic ``(dH/d theta, dH/d phi)``."""
    e_r, e_t, e_p = frames(theta, phi)
    theta = np.asarray(theta, float)[..., None]
    a, b, cd, sd = X.a, X.b, np.cos(X.delta), np.sin(X.delta)
    d_theta = a * e_t - 1j * b * cd * e_r
    d_phi = (
        a * np.sin(theta) * e_p
        + 1j * b * cd * np.cos(theta) * e_p
        - 1j * b * sd * (np.sin(theta) * e_r + np.cos(theta) * e_t)
    )
    return sigma_dot(d_theta), sigma_dot(d_phi)


def adiabaticity_diagnostics(X: ParamPoint, v: TangentVector,
                             tol: Tolerances = DEFAULT_TOLERANCES):
    """Diagonal rate ``G_+`` and coupling ``T_{+-}`` of the adiabatic expansion.

    ``G_+ = (<psi+|W|d psi+> + <psi+|W M|psi+>) . v`` and
    ``T_{+-} = (<psi+|W dH|psi->/(E- - E+) + <psi+|W M|psi->) . v``.
    """
    psi_p = eigenvector_field(X, X.theta, X.phi, +1, tol)
    psi_m = eigenvector_field(X, X.theta, X.phi, -1, tol)
    W = metric_field(X, X.theta, X.phi)
    d_theta, d_phi = eigenvector_gradient(X, X.theta, X.phi, +1, tol)
    h_theta, h_phi = hamiltonian_gradient(X, X.theta, X.phi)
    m_theta, m_phi = m_field(X, X.theta, X.phi)
    bra = psi_p.conj() @ W
    gap = -2.0 * X.root
    g = (bra @ d_theta + bra @ m_theta @ psi_p) * v.d_theta + (bra @ d_phi + bra @ m_phi @ psi_p) * v.d_phi
    t = (bra @ h_theta @ psi_m / gap + bra @ m_theta @ psi_m) * v.d_theta + (
        bra @ h_phi @ psi_m / gap + bra @ m_phi @ psi_m
    ) * v.d_phi
    return complex(g), complex(t)
