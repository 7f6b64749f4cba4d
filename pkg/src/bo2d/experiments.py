"""Experiment orchestration: one function per experiment kind.

Every experiment writes into an output directory and finishes with a
``manifest.txt`` recording the configuration hash and library versions.
``run`` maps failures onto exit codes: 2 for configuration problems, 3 for
blow-up, 4 for I/O errors and 1 for anything else.
"""

from __future__ import annotations

import hashlib
import logging
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, RunConfig, serialize_config
from .diagnostics import boundary_strip_fraction, fit_decay, j_closed_form_p2, j_integral, lp_norm
from .evolution import BlowUpError, ScheduleError, evolve, project_zero_xmean
from .inequalities import random_smooth_field, ratio_report
from .propagator import KernelUnavailableError, propagate, propagate_via_kernel
from .scattering import ScatteringError, scattering_state
from .spectral import Grid2D, Multiplier, SpectralField, apply_multiplier, inverse_transform, l2_norm, transform
from .storage import (
    DIAGNOSTIC_COLUMNS,
    SnapshotError,
    diagnostics_rows,
    ensure_dir,
    read_snapshot,
    write_csv,
    write_snapshot,
)

__all__ = [
    "initial_field",
    "run",
    "run_experiment",
    "ExperimentResult",
    "kernel_discrepancy",
    "decay_series",
    "EXIT_OK",
    "EXIT_ERROR",
    "EXIT_CONFIG",
    "EXIT_BLOWUP",
    "EXIT_IO",
]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 1, 2, 3, 4


@dataclass
class ExperimentResult:
    exit_code: int
    files: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    message: str = ""


def gaussian(grid: Grid2D, amplitude: float = 1.0, width: float = 1.0,
             center: tuple[float, float] = (0.0, 0.0)) -> SpectralField:
    X, Y = grid.mesh()
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    return transform(amplitude * np.exp(-r2 / (2.0 * width**2)), grid)


def dx_gaussian(grid: Grid2D, amplitude: float = 1.0, width: float = 1.0,
                center: tuple[float, float] = (0.0, 0.0)) -> SpectralField:
    """amplitude · width · ∂_x of the Gaussian, built spectrally so the x-mean is exactly 0."""
    g = gaussian(grid, amplitude * width, width, center)
    return apply_multiplier(g, Multiplier("deriv_x"))


def initial_field(cfg: RunConfig) -> SpectralField:
    grid = cfg.grid
    center = (cfg.center_x, cfg.center_y)
    if cfg.init == "gaussian":
        u = gaussian(grid, cfg.amplitude, cfg.width, center)
    elif cfg.init == "dx_gaussian":
        u = dx_gaussian(grid, cfg.amplitude, cfg.width, center)
    elif cfg.init == "random_smooth":
        u = random_smooth_field(cfg.seed, grid, cfg.decay_rate, amplitude=cfg.amplitude)
    else:
        u, _ = read_snapshot(cfg.init_file)
        if u.grid != grid:
            raise ConfigError([f"init_file: snapshot grid {u.grid} does not match configured grid {grid}"])
        u.time = 0.0
    if cfg.gamma != 0 and np.any(u.coeffs[0, :] != 0):
        log.warning("gamma != 0: projecting initial data onto zero x-mean")
        u = project_zero_xmean(u)
    return u


# --- experiments ----------------------------------------------------------

def _evolve(cfg: RunConfig, out: Path) -> ExperimentResult:
    phi = initial_field(cfg)
    traj = evolve(phi, cfg.params, cfg.schedule, nonlinear=cfg.nonlinear, thetas=(cfg.theta,))
    files = []
    if cfg.write_snapshots:
        snap_dir = ensure_dir(out / "snapshots")
        for k, u in enumerate(traj.snapshots):
            path = snap_dir / f"snap_{k:05d}.bo2d"
            write_snapshot(path, u, cfg.s)
            files.append(str(path.relative_to(out)))
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, diagnostics_rows(traj.diagnostics, cfg.theta))
    files.append("diagnostics.csv")
    summary = {"status": traj.status, "steps_dt": traj.dt, "snapshots": len(traj)}
    if traj.status == "blowup":
        return ExperimentResult(EXIT_BLOWUP, files, summary, f"blow-up detected at t={traj.blowup_time:.6g}")
    return ExperimentResult(EXIT_OK, files, summary)


def kernel_discrepancy(u: SpectralField, t: float, params=None) -> float:
    """Relative L² gap between the kernel path and the multiplier path."""
    a = propagate_via_kernel(u, t, params)
    b = propagate(u, t, params)
    den = l2_norm(b)
    return 0.0 if den == 0 else l2_norm(a - b) / den


def _kernel_check(cfg: RunConfig, out: Path) -> ExperimentResult:
    rows = []
    base = cfg.grid
    for scale in (1, 2):
        grid = Grid2D(base.nx * scale, base.ny * scale, base.Lx * scale, base.Ly * scale)
        sub = RunConfig(**{**cfg.__dict__, "nx": grid.nx, "ny": grid.ny, "Lx": grid.Lx, "Ly": grid.Ly})
        u = initial_field(sub)
        rows.append((grid.nx, grid.ny, grid.Lx, grid.Ly, cfg.kernel_t,
                     kernel_discrepancy(u, cfg.kernel_t, cfg.params)))
    write_csv(out / "kernel_check.csv", ("nx", "ny", "Lx", "Ly", "t", "rel_l2_discrepancy"), rows)
    print(f"kernel vs multiplier at t={cfg.kernel_t:g}: rel. L2 discrepancy {rows[0][-1]:.6e} "
          f"(doubled domain: {rows[1][-1]:.6e})")
    return ExperimentResult(EXIT_OK, ["kernel_check.csv"],
                            {"discrepancy": rows[0][-1], "doubled": rows[1][-1]})


def decay_exponent_q(theta: float) -> float:
    """Lebesgue exponent q = 2/(1 - θ) paired with decay rate t^{-θ}."""
    return math.inf if theta >= 1 else 2.0 / (1.0 - theta)


def decay_series(u: SpectralField, times, q: float, params=None):
    """(t, |P(-t)u|_q, boundary-strip fraction) for each time."""
    rows = []
    for t in times:
        v = propagate(u, float(t), params)
        vals = inverse_transform(v)
        rows.append((float(t), lp_norm(vals, u.grid.cell_area, q), boundary_strip_fraction(v)))
    return rows


def _decay(cfg: RunConfig, out: Path) -> ExperimentResult:
    u = initial_field(cfg)
    q = decay_exponent_q(cfg.theta)
    times = np.linspace(cfg.decay_t_min, cfg.decay_t_max, cfg.decay_samples)
    rows = decay_series(u, times, q, cfg.params)
    write_csv(out / "decay.csv", ("t", "lq_norm", "boundary_strip"), rows)
    valid = [(t, v) for t, v, strip in rows if strip < 1e-4]
    if len(valid) < 8:
        msg = f"only {len(valid)} samples before wrap-around; enlarge the domain"
        return ExperimentResult(EXIT_ERROR, ["decay.csv"], {}, msg)
    fit = fit_decay(valid, (valid[0][0], valid[-1][0]))
    write_csv(out / "decay_fit.csv",
              ("theta", "q", "t_min", "t_max", "exponent", "amplitude", "r_squared", "expected"),
              [(cfg.theta, q, fit.window[0], fit.window[1], fit.exponent, fit.amplitude,
                fit.r_squared, -cfg.theta)])
    print(f"decay theta={cfg.theta:g} (q={q:g}): exponent {fit.exponent:.4f} over "
          f"[{fit.window[0]:g}, {fit.window[1]:g}], r^2 = {fit.r_squared:.4f}")
    return ExperimentResult(EXIT_OK, ["decay.csv", "decay_fit.csv"], {"exponent": fit.exponent})


def _commutators(cfg: RunConfig, out: Path) -> ExperimentResult:
    report = ratio_report(cfg.kind, cfg.seeds)
    params = ";".join(f"{k}={v}" for k, v in sorted(report.params.items()))
    rows = []
    for level, samples in (("base", report.samples), ("refined", report.refined)):
        for smp in samples:
            rows.append((report.kind, params, level, smp.seed, smp.lhs, smp.rhs, smp.ratio))
    rows.append((report.kind, params, "max_ratio", "", "", "", report.max_ratio))
    rows.append((report.kind, params, "refined_max_ratio", "", "", "", report.refined_max_ratio))
    rows.append((report.kind, params, "refinement_ratio", "", "", "", report.refinement_ratio))
    write_csv(out / "commutators.csv", ("kind", "params", "level", "seed", "lhs", "rhs", "ratio"), rows)
    print(f"{report.kind}: max ratio {report.max_ratio:.6g}, refinement ratio {report.refinement_ratio:.4f}")
    return ExperimentResult(EXIT_OK, ["commutators.csv"],
                            {"max_ratio": report.max_ratio, "refinement_ratio": report.refinement_ratio})


def jbound_times(t_max: float) -> list[float]:
    ts = [0.0]
    k = 0
    while 10.0**k < t_max:
        ts.append(10.0**k)
        k += 1
    ts.append(float(t_max))
    return ts


def _jbound(cfg: RunConfig, out: Path) -> ExperimentResult:
    rows = []
    for t in jbound_times(cfg.t_max):
        closed = j_closed_form_p2(t) if cfg.jbound_p == 2 else None
        rows.append((cfg.jbound_p, t, j_integral(t, cfg.jbound_p), closed))
    write_csv(out / "jbound.csv", ("p", "t", "J", "closed_form_p2"), rows)
    for _, t, J, _ in rows:
        print(f"J({t:g}) = {J:.10g}")
    return ExperimentResult(EXIT_OK, ["jbound.csv"], {"J_tmax": rows[-1][2]})


def _scatter(cfg: RunConfig, out: Path) -> ExperimentResult:
    phi = initial_field(cfg)
    traj = evolve(phi, cfg.params, cfg.schedule, nonlinear=cfg.nonlinear, thetas=(cfg.theta,))
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, diagnostics_rows(traj.diagnostics, cfg.theta))
    if traj.status == "blowup":
        return ExperimentResult(EXIT_BLOWUP, ["diagnostics.csv"], {},
                                f"blow-up detected at t={traj.blowup_time:.6g}")
    try:
        phi_plus, rec = scattering_state(traj, cfg.params, cfg.r_value)
    except ScatteringError as exc:
        return ExperimentResult(EXIT_ERROR, ["diagnostics.csv"], {}, str(exc))
    rows = [(t, None if k == 0 else rec.cauchy_increments[k - 1], d)
            for k, (t, d) in enumerate(zip(rec.times, rec.distances))]
    write_csv(out / "scatter.csv", ("t", "cauchy_increment", "distance_to_free"), rows)
    write_snapshot(out / "phi_plus.bo2d", phi_plus, cfg.s)
    print(f"scattering state from {len(rec.times)} profiles; last increment {rec.cauchy_increments[-1]:.6e}")
    return ExperimentResult(EXIT_OK, ["diagnostics.csv", "scatter.csv", "phi_plus.bo2d"],
                            {"last_increment": rec.cauchy_increments[-1]})


_RUNNERS = {
    "evolve": _evolve,
    "kernel_check": _kernel_check,
    "decay": _decay,
    "commutators": _commutators,
    "jbound": _jbound,
    "scatter": _scatter,
}


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


def write_manifest(cfg: RunConfig, out: Path, result: ExperimentResult) -> None:
    lines = [
        f"experiment = {cfg.experiment}",
        f"config_sha256 = {config_hash(cfg)}",
        f"bo2d = {__version__}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
        f"scipy = {scipy.__version__}",
        f"exit_code = {result.exit_code}",
    ]
    lines += [f"file = {f}" for f in result.files]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")
    (out / "config.txt").write_text(serialize_config(cfg))


def run_experiment(cfg: RunConfig, out_dir: str | Path | None = None) -> ExperimentResult:
    """Run the configured experiment; exceptions propagate."""
    out = ensure_dir(out_dir if out_dir is not None else cfg.output_dir)
    for note in cfg.notices:
        log.warning(note)
    result = _RUNNERS[cfg.experiment](cfg, out)
    write_manifest(cfg, out, result)
    return result


def run(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    """Run the configured experiment and return its exit code."""
    try:
        result = run_experiment(cfg, out_dir)
    except (ConfigError, ScheduleError, KernelUnavailableError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BLOWUP
    except (OSError, SnapshotError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.message:
        print(result.message, file=sys.stderr)
    return result.exit_code
