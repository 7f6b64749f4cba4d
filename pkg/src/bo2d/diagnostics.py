"""Norms, decay fits and the scalar functionals tracked along solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

from .params import EquationParams
from .spectral import Multiplier, SpectralField, apply_multiplier, inverse_transform

__all__ = [
    "NormReport",
    "DecayFit",
    "norms",
    "sobolev_norm",
    "xs_norm",
    "lp_norm",
    "w1inf_norm",
    "weighted_norm",
    "fit_decay",
    "j_integral",
    "j_closed_form_p2",
    "gronwall_envelope",
    "calibrate_gronwall",
    "WeightedBound",
    "calibrate_weighted_bound",
    "boundary_strip_fraction",
    "spectral_shell_fraction",
    "XMEAN_FLAG_TOL",
]

XMEAN_FLAG_TOL = 1e-10


@dataclass
class NormReport:
    """Scalar functionals of one snapshot.

    ``xs`` is None when the ξ = 0 column carries more than XMEAN_FLAG_TOL of
    the relative L² mass, i.e. when ∂_x^{-1}u is not meaningful.
    """

    time: float
    l2: float
    hs: float
    s: float
    xs: float | None
    linf: float
    w1inf: float
    gronwall_integrand: float
    lp: dict[float, float] = field(default_factory=dict)
    weighted: dict[float, float] = field(default_factory=dict)
    l11: float | None = None
    l1_grad: float | None = None
    xmean: float = 0.0


@dataclass(frozen=True)
class DecayFit:
    window: tuple[float, float]
    exponent: float
    amplitude: float
    r_squared: float
    n_samples: int


def sobolev_norm(u: SpectralField, s: float) -> float:
    """‖Λ^s u‖_{L²} with Λ = (1 - Δ)^{1/2}, by Parseval."""
    XI, ETA = u.grid.frequency_mesh()
    w = (1.0 + XI**2 + ETA**2) ** s
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs) ** 2) * u.grid.mode_area))


def homogeneous_sobolev_norm(u: SpectralField, s: float) -> float:
    """‖|∇|^s u‖_{L²}, the zero mode annihilated."""
    XI, ETA = u.grid.frequency_mesh()
    r2 = XI**2 + ETA**2
    with np.errstate(divide="ignore"):
        w = np.where(r2 > 0, r2**s, 0.0)
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs) ** 2) * u.grid.mode_area))


def xmean_fraction(u: SpectralField) -> float:
    total = np.sum(np.abs(u.coeffs) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(u.coeffs[0, :]) ** 2) / total)


def xs_norm(u: SpectralField, s: float) -> float | None:
    """‖u‖_{H^s} + ‖∂_x^{-1}u‖_{H^s}, or None when u has x-mean."""
    if xmean_fraction(u) > XMEAN_FLAG_TOL:
        return None
    g = apply_multiplier(u, Multiplier("inv_dx"))
    return sobolev_norm(u, s) + sobolev_norm(g, s)


def lp_norm(values: np.ndarray, cell_area: float, p: float) -> float:
    if math.isinf(p):
        return float(np.abs(values).max())
    return float((np.sum(np.abs(values) ** p) * cell_area) ** (1.0 / p))


def w1inf_norm(u: SpectralField) -> float:
    """|u|_∞ + |∂_x u|_∞ + |∂_y u|_∞ on the grid."""
    return float(sum(np.abs(inverse_transform(v)).max() for v in _value_and_gradient(u)))


def _value_and_gradient(u: SpectralField):
    return (u, apply_multiplier(u, Multiplier("deriv_x")), apply_multiplier(u, Multiplier("deriv_y")))


def weighted_norm(u: SpectralField, theta: float, values: np.ndarray | None = None) -> float:
    """‖(1 + x² + y²)^{θ/2} u‖_{L²} with the weight truncated to the box."""
    if values is None:
        values = inverse_transform(u)
    if theta == 0:
        return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2) * u.grid.mode_area))
    X, Y = u.grid.mesh()
    w = (1.0 + X**2 + Y**2) ** (theta / 2.0)
    return float(np.sqrt(np.sum(np.abs(w * values) ** 2) * u.grid.cell_area))


def norms(u: SpectralField, params: EquationParams | None = None, *,
          lp: Iterable[float] = (), thetas: Iterable[float] = (),
          l1_sobolev: bool = False) -> NormReport:
    """Compute the standard functionals of ``u``.

    Args:
        u: Real field.
        params: Supplies s (Sobolev index) and p (Gronwall integrand power).
        lp: Lebesgue exponents to report, by grid quadrature.
        thetas: Weight exponents for weighted L² norms.
        l1_sobolev: Also report ‖Λ¹u‖_{L¹} and |u|_{L¹} + |∇u|_{L¹}.
    """
    params = params or EquationParams()
    grid = u.grid
    area = grid.cell_area
    v, vx, vy = (inverse_transform(f) for f in _value_and_gradient(u))
    linf = float(np.abs(v).max())
    uxinf = float(np.abs(vx).max())
    l2 = float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2) * grid.mode_area))
    report = NormReport(
        time=u.time,
        l2=l2,
        hs=sobolev_norm(u, params.s),
        s=params.s,
        xs=xs_norm(u, params.s),
        linf=linf,
        w1inf=linf + uxinf + float(np.abs(vy).max()),
        gronwall_integrand=uxinf * linf ** (params.p - 1),
        xmean=float(np.sqrt(np.sum(np.abs(u.coeffs[0, :]) ** 2) * grid.mode_area)),
    )
    for q in lp:
        report.lp[float(q)] = lp_norm(v, area, float(q))
    for th in thetas:
        report.weighted[float(th)] = weighted_norm(u, float(th), v)
    if l1_sobolev:
        lam = inverse_transform(apply_multiplier(u, Multiplier.lambda_s(1.0)))
        report.l11 = float(np.sum(np.abs(lam)) * area)
        report.l1_grad = float((np.sum(np.abs(v)) + np.sum(np.hypot(vx, vy))) * area)
    return report


# --- decay fits -----------------------------------------------------------

def fit_decay(series: Sequence[tuple[float, float]], window: tuple[float, float] | None = None) -> DecayFit:
    """Least-squares power law v ≈ A t^k on samples with t in ``window``.

    Raises:
        ValueError: fewer than 8 samples in the window, or a value ≤ 0.

    Example:
        >>> ts = np.linspace(1, 10, 20)
        >>> round(fit_decay([(t, 5 / t) for t in ts]).exponent, 10)
        -1.0
    """
    pts = np.asarray(series, dtype=float).reshape(-1, 2)
    if window is None:
        window = (float(pts[:, 0].min()), float(pts[:, 0].max()))
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must satisfy t_min < t_max, got {window}")
    sel = pts[(pts[:, 0] >= lo) & (pts[:, 0] <= hi)]
    if len(sel) < 8:
        raise ValueError(f"insufficient samples: {len(sel)} in window {window}, need 8")
    if np.any(sel[:, 0] <= 0) or np.any(sel[:, 1] <= 0):
        raise ValueError("nonpositive values cannot be fitted on a log scale")
    lt, lv = np.log(sel[:, 0]), np.log(sel[:, 1])
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-300 else max(0.0, 1.0 - ss_res / ss_tot)
    return DecayFit((float(lo), float(hi)), float(slope), float(math.exp(intercept)), r2, len(sel))


# --- J(t) -----------------------------------------------------------------

def j_integral(t: float, p: int) -> float:
    """J(t) = (1 + t) ∫_0^t dτ / ((1 + t - τ)(1 + τ)^{p-1}).

    Each half of [0, t] is mapped to a logarithmic variable centred on its
    endpoint singularity scale, leaving smooth integrands for ``quad``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if p < 1:
        raise ValueError("p must be at least 1")
    if t == 0:
        return 0.0
    top = math.log1p(t / 2.0)
    # τ = e^σ - 1 on [0, t/2]; 1 + t - τ = e^σ on [t/2, t]
    first, _ = quad(lambda s: math.exp(s * (2 - p)) / (2.0 + t - math.exp(s)), 0.0, top,
                    epsabs=1e-13, epsrel=1e-13, limit=200)
    second, _ = quad(lambda s: (2.0 + t - math.exp(s)) ** (1 - p), 0.0, top,
                     epsabs=1e-13, epsrel=1e-13, limit=200)
    return (1.0 + t) * (first + second)


def j_closed_form_p2(t: float) -> float:
    """J(t) for p = 2 by partial fractions: 2(1 + t) ln(1 + t) / (2 + t)."""
    return 2.0 * (1.0 + t) * math.log1p(t) / (2.0 + t)


# --- Gronwall and weighted-norm envelopes ---------------------------------

def _gronwall_series(traj):
    reps = traj.diagnostics
    times = np.array([r.time for r in reps])
    g = np.array([r.gronwall_integrand for r in reps])
    hs = np.array([r.hs for r in reps])
    return times, cumulative_trapezoid(g, times, initial=0.0) if len(times) > 1 else np.zeros(1), hs


def gronwall_envelope(traj, c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """‖φ‖_s exp(c ∫_0^t |u_x|_∞ |u|_∞^{p-1}) along a trajectory.

    The time integral is a cumulative trapezoid over the snapshot records.

    Returns:
        (times, envelope, measured ‖u(t)‖_s).
    """
    times, G, hs = _gronwall_series(traj)
    return times, hs[0] * np.exp(c * G), hs


def calibrate_gronwall(traj, t_cal: float) -> float:
    """Smallest c ≥ 0 making the Gronwall envelope hold on [0, t_cal]."""
    times, G, hs = _gronwall_series(traj)
    c = 0.0
    for tk, Gk, hk in zip(times, G, hs):
        if tk > t_cal * (1 + 1e-12) or tk == times[0]:
            continue
        if hk > hs[0] > 0:
            if Gk <= 0:
                return math.inf
            c = max(c, math.log(hk / hs[0]) / Gk)
    return c


@dataclass(frozen=True)
class WeightedBound:
    """Envelope W(t) ≤ e^{Bt}(W(0)² + t A M²)^{1/2}, M = max_τ ‖u(τ)‖_{X^s}."""

    A: float
    B: float
    w0: float
    xs_max: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(self.B * t) * np.sqrt(self.w0**2 + t * self.A * self.xs_max**2)


def _a_for_b(B: float, t: np.ndarray, w: np.ndarray, w0: float, m2: float) -> float:
    need = (np.exp(-2.0 * B * t) * w**2 - w0**2) / (t * m2)
    return max(0.0, float(need.max()))


def calibrate_weighted_bound(times, weighted, xs_max: float, t_cal: float) -> WeightedBound:
    """Smallest (A, B) making the weighted envelope hold on (0, t_cal].

    Minimality of a pair is made definite by choosing, among all pairs that
    hold on the calibration snapshots, the one whose squared envelope has the
    least initial growth rate 2 B W(0)² + A M²; the admissible A for each B
    is explicit, so this is a one-dimensional search in B.
    """
    times = np.asarray(times, dtype=float)
    w = np.asarray(weighted, dtype=float)
    w0 = float(w[0])
    sel = (times > 0) & (times <= t_cal * (1 + 1e-12))
    if not sel.any():
        raise ValueError("no calibration samples after t = 0")
    t, ws = times[sel], w[sel]
    m2 = xs_max**2
    if m2 == 0 or w0 == 0:
        return WeightedBound(0.0, 0.0, w0, xs_max)
    # B alone suffices at B_top (A = 0); scan [0, B_top] then refine
    b_top = max(0.0, float(np.max(np.log(ws / w0) / t)))
    if b_top == 0.0:
        return WeightedBound(0.0, 0.0, w0, xs_max)

    def rate(B):
        return 2.0 * B * w0**2 + _a_for_b(B, t, ws, w0, m2) * m2

    grid = np.linspace(0.0, b_top, 401)
    k = int(np.argmin([rate(b) for b in grid]))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    fine = np.linspace(lo, hi, 401)
    B = float(fine[int(np.argmin([rate(b) for b in fine]))])
    return WeightedBound(_a_for_b(B, t, ws, w0, m2), B, w0, xs_max)


# --- resolution and window health -----------------------------------------

def boundary_strip_fraction(u: SpectralField, width: float = 0.1) -> float:
    """Fraction of L² mass within ``width`` (relative) of the box boundary."""
    v = inverse_transform(u)
    X, Y = u.grid.mesh()
    strip = (np.abs(X) > (1 - width) * u.grid.Lx) | (np.abs(Y) > (1 - width) * u.grid.Ly)
    total = np.sum(np.abs(v) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(v[strip]) ** 2) / total)


def spectral_shell_fraction(u: SpectralField) -> float:
    """Fraction of energy in modes beyond two thirds of the Nyquist frequency."""
    g = u.grid
    jx = np.abs(g.jx)[:, None] / (g.nx // 2)
    jy = np.abs(g.jy)[None, :] / (g.ny // 2)
    shell = np.maximum(jx, jy) > 2.0 / 3.0
    e = np.abs(u.coeffs) ** 2
    total = e.sum()
    return 0.0 if total == 0 else float(e[shell].sum() / total)
