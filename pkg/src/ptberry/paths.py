"""Closed loops in the (theta, phi) manifold with epsilon, a, b, delta held fixed.

Every loop is stored as a vertex list joined by straight segments in the
``(theta, phi)`` coordinates.  A latitude circle is the two-vertex loop
``(theta0, phi0) -> (theta0, phi0 + 2 pi winding)``, a zero-winding latitude
is the static (zero-length) loop.  The curve parameter ``s`` runs over
``[0, 1]`` at uniform speed in the Euclidean ``(theta, phi)`` length.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GaugeSingularError, PathError
from .pt_model import DEFAULT_TOLERANCES, ParamPoint, Tolerances, branch_sign, norm_sq_field

__all__ = ["LoopPath"]

_CLOSE_TOL = 1e-9


@dataclass(frozen=True)
class LoopPath:
    base: ParamPoint
    kind: str
    vertices: np.ndarray = field(repr=False)
    theta0: float | None = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise PathError("a loop needs at least two (theta, phi) vertices")
        if not np.all(np.isfinite(v)):
            raise PathError("non-finite vertex")
        if np.any(v[:, 0] < -_CLOSE_TOL) or np.any(v[:, 0] > np.pi + _CLOSE_TOL):
            raise PathError("theta must stay within [0, pi]")
        v[:, 0] = np.clip(v[:, 0], 0.0, np.pi)
        if abs(v[-1, 0] - v[0, 0]) > _CLOSE_TOL:
            raise PathError("loop is not closed in theta")
        turns = (v[-1, 1] - v[0, 1]) / (2 * np.pi)
        if abs(turns - round(turns)) > _CLOSE_TOL:
            raise PathError("loop is not closed: phi must return modulo 2 pi")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    # -- constructors -------------------------------------------------
    @classmethod
    def latitude(cls, base: ParamPoint, theta0: float, winding: int = 1, phi0: float = 0.0):
        phi1 = phi0 + 2 * np.pi * int(winding)
        return cls(base, "latitude", np.array([[theta0, phi0], [theta0, phi1]]), float(theta0))

    @classmethod
    def polygon(cls, base: ParamPoint, vertices):
        """Polygon through ``vertices``; closed back to the first vertex if needed."""
        v = np.asarray(vertices, dtype=float)
        if len(v) == 0:
            raise PathError("empty vertex list")
        turns = (v[-1, 1] - v[0, 1]) / (2 * np.pi)
        closed = (
            len(v) > 1
            and abs(v[-1, 0] - v[0, 0]) <= _CLOSE_TOL
            and abs(turns - round(turns)) <= _CLOSE_TOL
        )
        if not closed:
            v = np.vstack([v, v[:1]])
        return cls(base, "polygon", v)

    @classmethod
    def custom(cls, base: ParamPoint, samples):
        """Densely sampled table; must already be closed."""
        return cls(base, "custom", np.asarray(samples, dtype=float))

    # -- geometry -----------------------------------------------------
    @property
    def winding(self) -> int:
        return int(round((self.vertices[-1, 1] - self.vertices[0, 1]) / (2 * np.pi)))

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.vertices, axis=0).T)

    @property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    @property
    def start(self) -> ParamPoint:
        return self.base.at(*self.vertices[0])

    def _locate(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        lengths = self.segment_lengths
        total = lengths.sum()
        if total == 0.0:
            return s, np.zeros(s.shape, dtype=int), np.zeros_like(s), total
        knots = np.concatenate([[0.0], np.cumsum(lengths)]) / total
        idx = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, len(lengths) - 1)
        # zero-length segments are never selected when a longer one covers s
        width = knots[idx + 1] - knots[idx]
        frac = np.divide(s - knots[idx], width, out=np.zeros_like(s), where=width > 0)
        return s, idx, frac, total

    def point(self, s):
        """``(theta, phi)`` at curve parameter(s) ``s``."""
        s, idx, frac, _ = self._locate(s)
        p0 = self.vertices[idx]
        d = self.vertices[idx + 1] - p0
        return p0[..., 0] + frac * d[..., 0], p0[..., 1] + frac * d[..., 1]

    def velocity(self, s):
        """``(dtheta/ds, dphi/ds)``; piecewise constant."""
        s, idx, _, total = self._locate(s)
        if total == 0.0:
            return np.zeros_like(s), np.zeros_like(s)
        d = np.diff(self.vertices, axis=0)
        lengths = self.segment_lengths
        scale = np.divide(total, lengths, out=np.zeros_like(lengths), where=lengths > 0)[idx]
        return d[idx, 0] * scale, d[idx, 1] * scale

    def sample(self, n: int = 2001):
        s = np.linspace(0.0, 1.0, n)
        return self.point(s)

    def check_nonsingular(self, branch="+", tol: Tolerances = DEFAULT_TOLERANCES, n: int = 2001):
        """Sample N^2 of ``branch`` along the loop; raise if it touches the gauge singularity."""
        theta = np.concatenate([self.sample(n)[0], self.vertices[:, 0]])
        n2 = norm_sq_field(self.base, theta, branch_sign(branch))
        floor = tol.singular * 2 * abs(self.base.a) * self.base.root
        if np.any(n2 < floor):
            raise GaugeSingularError(
                f"loop crosses the gauge singularity of branch {branch} near theta="
                f"{theta[np.argmin(n2)]:.6g}"
            )
