"""Nonlinear time integration in integrating-factor form.

The equation is advanced as û_t = -iωû + N̂(u) with the conservative
nonlinearity N(u) = -∂_x(u^{p+1})/(p+1).  Steps use the Lawson
(integrating-factor) form of classical RK4: the linear flow e^{-iωt} is
applied exactly and RK4 acts on v̂ = e^{iωt}û, so with the nonlinearity
switched off a step is the linear group to rounding.
"""

from __future__ import annotations

import logging
import math
import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .diagnostics import NormReport, norms
from .params import EquationParams, SolveSchedule
from .propagator import propagate
from .spectral import Multiplier, SpectralField, apply_multiplier, dealias_product, inverse_transform, power

__all__ = [
    "EquationParams",
    "SolveSchedule",
    "Trajectory",
    "BlowUpError",
    "ScheduleError",
    "nonlinear_rhs",
    "convective_rhs",
    "stable_dt",
    "step",
    "evolve",
    "duhamel_residual",
    "project_zero_xmean",
    "BLOWUP_THRESHOLD",
]

log = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e6


class BlowUpError(RuntimeError):
    """Raised when the state stops being finite or exceeds the amplitude threshold."""

    def __init__(self, t: float, reason: str):
        super().__init__(f"blow-up detected at t={t:.6g}: {reason}")
        self.time = t


class ScheduleError(ValueError):
    """The requested step violates the stability guard."""


@dataclass
class Trajectory:
    """Snapshots of one solve with a NormReport per snapshot.

    ``status`` is "ok" for a completed run and "blowup" when the solve stopped
    early; the snapshots then end at the last finite state.
    """

    params: EquationParams
    schedule: SolveSchedule
    snapshots: list[SpectralField] = field(default_factory=list)
    diagnostics: list[NormReport] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)
    status: str = "ok"
    nonlinear: bool = True
    dt: float = 0.0
    blowup_time: float | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([u.time for u in self.snapshots])

    @property
    def grid(self):
        return self.snapshots[0].grid

    def __len__(self) -> int:
        return len(self.snapshots)


def nonlinear_rhs(u: SpectralField, p: int) -> SpectralField:
    """N(u) = -∂_x(u^{p+1})/(p+1), products dealiased for degree p + 1."""
    w = power(u, p + 1)
    out = apply_multiplier(w, Multiplier("deriv_x"))
    out.coeffs *= -1.0 / (p + 1)
    return out


def convective_rhs(u: SpectralField, p: int) -> SpectralField:
    """-u^p u_x in convective form, for cross-checks against nonlinear_rhs."""
    ux = apply_multiplier(u, Multiplier("deriv_x"))
    out = dealias_product([u] * p + [ux], d=p + 1)
    out.coeffs *= -1.0
    return out


def _sup(u: SpectralField) -> float:
    return float(np.abs(inverse_transform(u)).max())


def stable_dt(u: SpectralField, p: int, cfl_guard: float) -> float:
    """cfl_guard / ((p + 1) |u|_∞^p ξ_max); infinite for the zero field."""
    amp = _sup(u)
    rate = (p + 1) * amp**p * u.grid.xi_max
    return math.inf if rate == 0 else cfl_guard / rate


def step(u: SpectralField, dt: float, params: EquationParams | None = None, *,
         nonlinear: bool = True) -> SpectralField:
    """One Lawson RK4 step of size ``dt``.

    Raises:
        BlowUpError: the new state is not finite or exceeds BLOWUP_THRESHOLD.
    """
    params = params or EquationParams()
    if dt == 0:
        return u.copy()
    if not nonlinear:
        return propagate(u, dt, params)
    p = params.p
    grid = u.grid
    half = Multiplier.dispersion(dt / 2, params.alpha, params.gamma).evaluate(grid)
    full = Multiplier.dispersion(dt, params.alpha, params.gamma).evaluate(grid)
    c0 = u.coeffs

    def N(c):
        return nonlinear_rhs(u.with_coeffs(c), p).coeffs

    t_new = u.time + dt
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = N(c0)
            k2 = N(half * (c0 + 0.5 * dt * k1))
            k3 = N(half * c0 + 0.5 * dt * k2)
            k4 = N(full * c0 + dt * half * k3)
            new = full * c0 + (dt / 6.0) * (full * k1 + 2.0 * half * (k2 + k3) + k4)
    except ValueError as exc:
        # an intermediate stage overflowed and was rejected as non-finite
        raise BlowUpError(t_new, "non-finite stage") from exc
    if not np.all(np.isfinite(new)):
        raise BlowUpError(t_new, "non-finite state")
    out = SpectralField(grid, new, t_new, u.real)
    amp = _sup(out)
    if amp > BLOWUP_THRESHOLD:
        raise BlowUpError(t_new, f"|u|_inf = {amp:.3g} exceeds {BLOWUP_THRESHOLD:.0e}")
    return out


def project_zero_xmean(u: SpectralField) -> SpectralField:
    c = u.coeffs.copy()
    c[0, :] = 0.0
    return u.with_coeffs(c)


def evolve(phi: SpectralField, params: EquationParams, schedule: SolveSchedule, *,
           nonlinear: bool = True, lp=(4.0,), thetas=(1.0,)) -> Trajectory:
    """Solve from ``phi`` to ``schedule.t_end``.

    The step is schedule.dt (or the stability bound when dt is None), shrunk
    so that an integer number of steps reaches t_end; a snapshot and its
    NormReport are kept every ``snapshot_stride`` steps and at the end.
    A blow-up stops the run and returns the partial trajectory with
    status "blowup".

    Raises:
        ValueError: phi is not real.
        ScheduleError: dt exceeds the stability guard at t = 0.
    """
    if not phi.real:
        raise ValueError("initial data must be a real field")
    if params.gamma != 0.0 and np.any(phi.coeffs[0, :] != 0):
        msg = "gamma != 0: projecting initial data onto zero x-mean"
        log.warning(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        phi = project_zero_xmean(phi)

    bound = stable_dt(phi, params.p, schedule.cfl_guard) if nonlinear else math.inf
    if schedule.dt is None:
        dt = min(bound, schedule.t_end)
    else:
        dt = schedule.dt
        if dt > bound:
            raise ScheduleError(f"dt={dt:.6g} exceeds the stability guard {bound:.6g}")
    n_steps = max(1, math.ceil(schedule.t_end / dt - 1e-9))
    dt = schedule.t_end / n_steps

    traj = Trajectory(params, schedule, nonlinear=nonlinear, dt=dt)
    start = _time.perf_counter()

    def record(v: SpectralField):
        traj.snapshots.append(v)
        traj.diagnostics.append(norms(v, params, lp=lp, thetas=thetas))
        traj.wall_times.append(_time.perf_counter() - start)

    u = phi.copy()
    t0 = u.time
    record(u)
    warned = False
    for k in range(1, n_steps + 1):
        try:
            u = step(u, dt, params, nonlinear=nonlinear)
        except BlowUpError as exc:
            log.warning(str(exc))
            traj.status = "blowup"
            traj.blowup_time = exc.time
            return traj
        u.time = t0 + k * dt
        if nonlinear and not warned and k % schedule.snapshot_stride == 0:
            if dt > stable_dt(u, params.p, schedule.cfl_guard):
                warnings.warn(f"step {dt:.3g} exceeds the stability guard at t={u.time:.3g}",
                              RuntimeWarning, stacklevel=2)
                warned = True
        if k % schedule.snapshot_stride == 0 or k == n_steps:
            record(u)
    return traj


def duhamel_residual(traj: Trajectory, params: EquationParams | None = None) -> float:
    """Relative L² residual of the Duhamel identity at the final snapshot.

    Checks u(T) = P(T)φ - ∫_0^T P(T - τ) ∂_x(u^{p+1}/(p+1))(τ) dτ, where P is
    the linear group, with composite Simpson over the (uniformly spaced)
    snapshots.
    """
    params = params or traj.params
    snaps = traj.snapshots
    if len(snaps) < 5:
        raise ValueError(f"duhamel_residual needs at least 5 snapshots, got {len(snaps)}")
    times = np.array([u.time for u in snaps])
    T = times[-1]
    phi = snaps[0]
    lin = propagate(phi, T - times[0], params).coeffs
    if traj.nonlinear:
        integrand = np.stack([propagate(nonlinear_rhs(u, params.p), T - u.time, params).coeffs
                              for u in snaps])
        duh = simpson(integrand, x=times, axis=0)
    else:
        duh = 0.0
    rhs = lin + duh
    num = np.sqrt(np.sum(np.abs(snaps[-1].coeffs - rhs) ** 2))
    den = np.sqrt(np.sum(np.abs(snaps[-1].coeffs) ** 2))
    return 0.0 if den == 0 and num == 0 else float(num / den)
