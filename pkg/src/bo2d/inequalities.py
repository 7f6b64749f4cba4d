"""Empirical constants for commutator and product estimates.

Each estimator evaluates the two sides of an inequality on concrete fields
and returns their ratio.  A report runs many seeded samples at a base
resolution and at twice that resolution; a maximum ratio that stays put
under refinement is the numerical shadow of a finite constant.  Nothing
here proves an inequality: it can only fail to find blow-up.

Random fields are prefix-stable across resolutions: the phase of mode
(j, k) depends only on the seed and the mode, so refining a grid adds
modes without changing the ones already present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .diagnostics import homogeneous_sobolev_norm, lp_norm, sobolev_norm
from .spectral import (
    Grid2D,
    Multiplier,
    SpectralField,
    apply_multiplier,
    dealias_product,
    inverse_transform,
    make_grid,
)

__all__ = [
    "RatioSample",
    "RatioReport",
    "KINDS",
    "random_smooth_field",
    "random_smooth_field_1d",
    "line_grid",
    "kato_commutator_ratio",
    "kato_ponce_ratio",
    "leibniz_ratio",
    "calderon_ratio",
    "product_ratio",
    "product_dx_ratio",
    "wiener_norm",
    "ratio_report",
    "default_grid",
]

KINDS = ("kato", "kato_ponce", "leibniz", "calderon", "product_A", "product_dx")

# two evaluation orders agreeing to this relative level are the same number
ROUNDOFF_FLOOR = 1e-13


@dataclass(frozen=True)
class RatioSample:
    seed: int
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.lhs == 0.0:
            return 0.0
        if self.rhs == 0.0:
            return math.inf
        return self.lhs / self.rhs


@dataclass
class RatioReport:
    kind: str
    params: dict
    samples: list[RatioSample]
    refined: list[RatioSample] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((s.ratio for s in self.samples), default=0.0)

    @property
    def refined_max_ratio(self) -> float:
        return max((s.ratio for s in self.refined), default=0.0)

    @property
    def refinement_ratio(self) -> float:
        base = self.max_ratio
        if not self.refined:
            return math.nan
        if base == 0.0:
            return 1.0 if self.refined_max_ratio == 0.0 else math.inf
        return self.refined_max_ratio / base


# --- random fields --------------------------------------------------------

def _shell_phases(seed: int, R: int, one_d: bool) -> np.ndarray:
    """Uniform phases on signed modes |j|, |k| ≤ R, drawn shell by shell.

    Shell r holds the modes with max(|j|, |k|) = r, visited in lexicographic
    order, so the draws for shells ≤ r never depend on R.
    """
    rng = np.random.default_rng(seed)
    side = 2 * R + 1
    if one_d:
        out = np.zeros(side)
        out[R] = rng.uniform(0, 2 * np.pi)
        for r in range(1, R + 1):
            out[R - r], out[R + r] = rng.uniform(0, 2 * np.pi, 2)
        return out
    out = np.zeros((side, side))
    out[R, R] = rng.uniform(0, 2 * np.pi)
    for r in range(1, R + 1):
        idx = np.arange(-r, r + 1)
        J, K = np.meshgrid(idx, idx, indexing="ij")
        ring = np.maximum(np.abs(J), np.abs(K)) == r
        vals = rng.uniform(0, 2 * np.pi, int(ring.sum()))
        out[J[ring] + R, K[ring] + R] = vals
    return out


def _hermitian_coeffs(grid: Grid2D, mag: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # θ(k) - θ(-k) is antisymmetric, so the coefficients are conjugate-symmetric
    anti = theta - theta[::-1, ::-1] if theta.ndim == 2 else theta - theta[::-1]
    return mag * np.exp(1j * anti)


def random_smooth_field(seed: int, grid: Grid2D, decay_rate: float, *,
                        amplitude: float = 1.0) -> SpectralField:
    """Real field with |û| = (1 + |ξ|² + |η|²)^{-decay_rate/2} and seeded phases.

    The (0, 0) mode and the Nyquist modes are zero.
    """
    if decay_rate <= 1:
        raise ValueError(f"decay_rate must exceed 1, got {decay_rate}")
    Rx, Ry = grid.nx // 2 - 1, grid.ny // 2 - 1
    R = max(Rx, Ry)
    theta = _shell_phases(seed, R, one_d=False)[R - Rx:R + Rx + 1, R - Ry:R + Ry + 1]
    jx = np.arange(-Rx, Rx + 1)
    jy = np.arange(-Ry, Ry + 1)
    XI = (jx * grid.dxi)[:, None]
    ETA = (jy * grid.deta)[None, :]
    mag = (1.0 + XI**2 + ETA**2) ** (-decay_rate / 2.0)
    mag[Rx, Ry] = 0.0
    block = amplitude * _hermitian_coeffs(grid, mag, theta)
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[np.ix_(jx % grid.nx, jy % grid.ny)] = block
    return SpectralField(grid, coeffs, 0.0, True)


def line_grid(n: int, L: float = math.pi) -> Grid2D:
    """Grid carrying one-dimensional fields: n points in x, constant in y."""
    return make_grid(n, 8, L, L)


def random_smooth_field_1d(seed: int, grid: Grid2D, decay_rate: float, *,
                           amplitude: float = 1.0) -> SpectralField:
    """y-independent real field with |û| = (1 + ξ²)^{-decay_rate/2}, zero mean."""
    if decay_rate <= 0.5:
        raise ValueError(f"decay_rate must exceed 1/2, got {decay_rate}")
    Rx = grid.nx // 2 - 1
    theta = _shell_phases(seed, Rx, one_d=True)
    jx = np.arange(-Rx, Rx + 1)
    mag = (1.0 + (jx * grid.dxi) ** 2) ** (-decay_rate / 2.0)
    mag[Rx] = 0.0
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[jx % grid.nx, 0] = amplitude * _hermitian_coeffs(grid, mag, theta)
    return SpectralField(grid, coeffs, 0.0, True)


# --- helpers --------------------------------------------------------------

def _lam(u: SpectralField, s: float) -> SpectralField:
    return apply_multiplier(u, Multiplier.lambda_s(s))


def _l2(u: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2) * u.grid.mode_area))


def _lp(u: SpectralField, p: float) -> float:
    if p == 2:
        return _l2(u)
    return lp_norm(inverse_transform(u), u.grid.cell_area, p)


def _sup(u: SpectralField) -> float:
    return float(np.abs(inverse_transform(u)).max())


def _grad_sup(f: SpectralField) -> float:
    fx = inverse_transform(apply_multiplier(f, Multiplier("deriv_x")))
    fy = inverse_transform(apply_multiplier(f, Multiplier("deriv_y")))
    return float(np.hypot(fx, fy).max())


def _difference(t1: SpectralField, t2: SpectralField) -> SpectralField:
    diff = t1 - t2
    scale = max(_l2(t1), _l2(t2))
    if _l2(diff) <= ROUNDOFF_FLOOR * scale:
        diff = diff * 0.0
    return diff


def wiener_norm(u: SpectralField) -> float:
    """‖u‖_A = ∫ |û|, the ℓ¹ norm of the coefficients with lattice weight."""
    return float(np.sum(np.abs(u.coeffs)) * u.grid.mode_area)


# --- estimators -----------------------------------------------------------

def kato_commutator_ratio(f: SpectralField, g: SpectralField, s_tilde: float, t_tilde: float,
                          s: float, *, seed: int = -1) -> RatioSample:
    """‖Λ^{-s̃}[Λ^{s̃+t̃+1}, M_f]Λ^{-t̃} g‖ against ‖∇f‖_{H^{s-1}} ‖g‖."""
    if abs(s_tilde) > s - 1 or abs(t_tilde) > s - 1:
        raise ValueError(f"need |s_tilde|, |t_tilde| <= s - 1 = {s - 1}")
    h = _lam(g, -t_tilde)
    order = s_tilde + t_tilde + 1
    t1 = _lam(dealias_product([f, h]), order)
    t2 = dealias_product([f, _lam(h, order)])
    lhs = _l2(_lam(_difference(t1, t2), -s_tilde))
    fx = apply_multiplier(f, Multiplier("deriv_x"))
    fy = apply_multiplier(f, Multiplier("deriv_y"))
    grad = math.hypot(sobolev_norm(fx, s - 1), sobolev_norm(fy, s - 1))
    return RatioSample(seed, lhs, grad * _l2(g))


def kato_ponce_ratio(f: SpectralField, g: SpectralField, s: float, p: float = 2.0, *,
                     seed: int = -1) -> RatioSample:
    """|[Λ^s, M_f] g|_p against |∇f|_∞ |Λ^{s-1} g|_p + |Λ^s f|_p |g|_∞."""
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    t1 = _lam(dealias_product([f, g]), s)
    t2 = dealias_product([f, _lam(g, s)])
    lhs = _lp(_difference(t1, t2), p)
    rhs = _grad_sup(f) * _lp(_lam(g, s - 1), p) + _lp(_lam(f, s), p) * _sup(g)
    return RatioSample(seed, lhs, rhs)


def leibniz_ratio(f: SpectralField, g: SpectralField, s: float, p: float = 2.0, *,
                  seed: int = -1) -> RatioSample:
    """|Λ^s(fg)|_p against |f|_∞ |Λ^s g|_p + |Λ^s f|_p |g|_∞."""
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    lhs = _lp(_lam(dealias_product([f, g]), s), p)
    rhs = _sup(f) * _lp(_lam(g, s), p) + _lp(_lam(f, s), p) * _sup(g)
    return RatioSample(seed, lhs, rhs)


def calderon_ratio(A: SpectralField, f: SpectralField, *, seed: int = -1) -> RatioSample:
    """‖[H, A] f'‖ against |A'|_∞ ‖f‖ for y-independent fields.

    Both sides carry the same factor from the trivial y-direction, so the
    ratio is that of the one-dimensional inequality.
    """
    H = Multiplier.hilbert_x()
    fp = apply_multiplier(f, Multiplier("deriv_x"))
    t1 = apply_multiplier(dealias_product([A, fp]), H)
    t2 = dealias_product([A, apply_multiplier(fp, H)])
    lhs = _l2(_difference(t1, t2))
    a_prime = _sup(apply_multiplier(A, Multiplier("deriv_x")))
    return RatioSample(seed, lhs, a_prime * _l2(f))


def _bracket_norm(u: SpectralField, s: float, homogeneous: bool) -> float:
    return homogeneous_sobolev_norm(u, s) if homogeneous else sobolev_norm(u, s)


def product_ratio(g: SpectralField, h: SpectralField, s: float, *, reading: str = "symmetric",
                  homogeneous: bool = True, seed: int = -1) -> RatioSample:
    """‖gh‖_{[s]} against ‖g‖_A ‖h‖_{[s]} + ‖g‖_{[s]} X.

    ``reading`` selects X: "symmetric" uses ‖h‖_A, "literal" uses ‖g‖_A.
    ``homogeneous`` selects |ξ|^s (zero mode annihilated) or (1 + |ξ|²)^{s/2}
    for ‖·‖_{[s]}.
    """
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if reading not in ("symmetric", "literal"):
        raise ValueError(f"unknown reading {reading!r}")
    lhs = _bracket_norm(dealias_product([g, h]), s, homogeneous)
    last = wiener_norm(h) if reading == "symmetric" else wiener_norm(g)
    rhs = wiener_norm(g) * _bracket_norm(h, s, homogeneous) + _bracket_norm(g, s, homogeneous) * last
    return RatioSample(seed, lhs, rhs)


def product_dx_ratio(g: SpectralField, h: SpectralField, s: float, s0: float, *,
                     seed: int = -1) -> RatioSample:
    """‖g ∂_x h‖_s against ‖g‖_s ‖h‖_s + ‖g‖_{s0} ‖h‖_{s+1}."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if s0 <= 1:
        raise ValueError(f"s0 must exceed 1, got {s0}")
    hx = apply_multiplier(h, Multiplier("deriv_x"))
    lhs = sobolev_norm(dealias_product([g, hx]), s)
    rhs = sobolev_norm(g, s) * sobolev_norm(h, s) + sobolev_norm(g, s0) * sobolev_norm(h, s + 1)
    return RatioSample(seed, lhs, rhs)


# --- reports --------------------------------------------------------------

DEFAULTS = {
    "kato": {"s": 3.0, "s_tilde": 0.0, "t_tilde": 0.0, "decay": 6.0},
    "kato_ponce": {"s": 2.0, "p": 2.0, "decay": 6.0},
    "leibniz": {"s": 2.0, "p": 2.0, "decay": 6.0},
    "calderon": {"decay_A": 4.0, "decay_f": 3.0},
    "product_A": {"s": 2.0, "reading": "symmetric", "homogeneous": True, "decay": 6.0},
    "product_dx": {"s": 2.0, "s0": 1.5, "decay": 6.0},
}


def default_grid(kind: str, refine: int = 1) -> Grid2D:
    """128² on [-π, π)² (4096 points on the line for calderon), times ``refine``."""
    if kind == "calderon":
        return line_grid(4096 * refine)
    return make_grid(128 * refine, 128 * refine, math.pi, math.pi)


def _sample(kind: str, seed: int, grid: Grid2D, prm: dict) -> RatioSample:
    # the second field of a pair uses a disjoint seed stream
    other = seed + 1_000_003
    if kind == "calderon":
        A = random_smooth_field_1d(seed, grid, prm["decay_A"])
        f = random_smooth_field_1d(other, grid, prm["decay_f"])
        return calderon_ratio(A, f, seed=seed)
    f = random_smooth_field(seed, grid, prm["decay"])
    g = random_smooth_field(other, grid, prm["decay"])
    if kind == "kato":
        return kato_commutator_ratio(f, g, prm["s_tilde"], prm["t_tilde"], prm["s"], seed=seed)
    if kind == "kato_ponce":
        return kato_ponce_ratio(f, g, prm["s"], prm["p"], seed=seed)
    if kind == "leibniz":
        return leibniz_ratio(f, g, prm["s"], prm["p"], seed=seed)
    if kind == "product_A":
        return product_ratio(f, g, prm["s"], reading=prm["reading"],
                             homogeneous=prm["homogeneous"], seed=seed)
    if kind == "product_dx":
        return product_dx_ratio(f, g, prm["s"], prm["s0"], seed=seed)
    raise ValueError(f"unknown inequality kind {kind!r}")


def ratio_report(kind: str, seeds: Sequence[int] | int = 50, *, grid: Grid2D | None = None,
                 refine: bool = True, **overrides) -> RatioReport:
    """Sample one inequality over seeds at a base grid and at doubled resolution."""
    if kind not in KINDS:
        raise ValueError(f"unknown inequality kind {kind!r}; expected one of {KINDS}")
    prm = dict(DEFAULTS[kind])
    unknown = set(overrides) - set(prm)
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    prm.update(overrides)
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    base = grid or default_grid(kind)
    report = RatioReport(kind, prm, [_sample(kind, s, base, prm) for s in seeds])
    if refine:
        fine = base.refined(2) if kind != "calderon" else line_grid(2 * base.nx, base.Lx)
        report.refined = [_sample(kind, s, fine, prm) for s in seeds]
    return report
