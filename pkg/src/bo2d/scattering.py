"""Scattering profiles: solutions pulled back by the inverse linear group.

For a global solution u the profile e^{tA}u(t) = P(-t)^{-1}u(t) is constant
for the linear equation and converges as t -> ∞ when the nonlinear
contribution is integrable in time.  The last profile serves as the
scattering state φ₊; Cauchy increments between consecutive profiles are the
evidence of convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import boundary_strip_fraction, sobolev_norm
from .evolution import Trajectory
from .params import EquationParams
from .propagator import propagate
from .spectral import SpectralField, reflect

__all__ = [
    "ScatterRecord",
    "ScatteringError",
    "pullback",
    "scattering_state",
    "valid_window_end",
    "time_reverse",
    "EXACT_TOL",
]

# relative size below which increments count as exactly zero
EXACT_TOL = 1e-12
STRIP_LIMIT = 1e-4


class ScatteringError(RuntimeError):
    """Increments do not decrease: no scattering detected."""


@dataclass
class ScatterRecord:
    times: list[float]
    profiles: list[SpectralField]
    cauchy_increments: list[float]
    r: float
    distances: list[float] = field(default_factory=list)


def pullback(u_t: SpectralField, t: float, params: EquationParams | None = None) -> SpectralField:
    """e^{tA}u_t: the inverse of ``propagate(·, t)``; the result's time is u_t.time - t."""
    return propagate(u_t, -t, params)


def valid_window_end(traj: Trajectory, limit: float = STRIP_LIMIT) -> int:
    """Number of leading snapshots whose boundary-strip mass stays below ``limit``."""
    for k, u in enumerate(traj.snapshots):
        if boundary_strip_fraction(u) >= limit:
            return k
    return len(traj.snapshots)


def scattering_state(traj: Trajectory, params: EquationParams | None = None,
                     r: float | None = None, *, window_limit: float = STRIP_LIMIT):
    """Approximate φ₊ by the last pulled-back profile inside the valid window.

    Returns:
        (φ₊, ScatterRecord) where ``record.distances`` holds
        ‖u(t) - P(-t)φ₊‖_{H^r} at each used snapshot.

    Raises:
        ScatteringError: "no scattering detected" unless the increments are
            all (relatively) zero or the final two decrease.
    """
    params = params or traj.params
    r = params.s - 1.0 if r is None else float(r)
    n = valid_window_end(traj, window_limit)
    snaps = traj.snapshots[:n]
    if len(snaps) < 3:
        raise ScatteringError(f"no scattering detected: only {len(snaps)} snapshots before wrap-around")
    t0 = snaps[0].time
    profiles = []
    for u in snaps:
        prof = pullback(u, u.time - t0, params)
        profiles.append(prof)
    incs = [sobolev_norm(b - a, r) for a, b in zip(profiles[:-1], profiles[1:])]
    phi_plus = profiles[-1]
    scale = sobolev_norm(phi_plus, r)
    record = ScatterRecord([u.time for u in snaps], profiles, incs, r)
    record.distances = [sobolev_norm(u - propagate(phi_plus, u.time - t0, params), r) for u in snaps]
    exact = all(d <= EXACT_TOL * max(scale, 1e-300) for d in incs) or scale == 0
    if not exact and not incs[-1] < incs[-2]:
        raise ScatteringError("no scattering detected: Cauchy increments are not decreasing")
    return phi_plus, record


def time_reverse(u: SpectralField) -> SpectralField:
    """Data map for the symmetry (t, x, y) -> (-t, -x, -y).

    If u solves the equation then ũ(t, x, y) = u(-t, -x, -y) does too, so the
    backward-in-time problem from φ is the forward problem from φ(-x, -y).
    """
    out = reflect(u)
    out.time = -u.time
    return out
