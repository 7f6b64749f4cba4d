"""The linear group of the dispersive part, by multiplier and by explicit kernel.

The linearized equation u_t + H u_xx + α H u_yy - γ ∂_x^{-1} u_yy = 0 reads
û_t = -i ω(ξ, η) û in Fourier variables, so the group is the multiplier
e^{-iωt}.  For α = 1, γ = 0 the same flow is a convolution,

    u(t) = (2π)^{-1} K_t * φ,   K_t(d) = I(t)(-d),

with the oscillatory kernel

    I(t)(x, y) = (2π)^{-1} ∫∫ e^{i(xξ + yη)} e^{i sgn(ξ)(ξ² + η²) t} dξ dη
               = κ [ (c/t) e^{-i(x²+y²)/4t} F(x/√t) + conj ],

c = (1+i)/2, κ = 1/(2√(2π)), F the Fresnel tail.  The reflection d -> -d
converts between the e^{+i sgn(ξ)...} phase of I and the e^{-iωt} group
under the e^{-ixξ} forward transform.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .fresnel import fresnel_tail
from .params import EquationParams
from .spectral import Grid2D, Multiplier, SpectralField, apply_multiplier, dispersion_relation, inverse_transform, transform

__all__ = [
    "dispersion_symbol",
    "propagate",
    "kernel_I",
    "propagate_via_kernel",
    "KERNEL_SCALE",
    "XMeanError",
    "KernelUnavailableError",
]

KERNEL_SCALE = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))
_C = 0.5 + 0.5j
_XMEAN_TOL = 1e-12
_SUPPORT_TOL = 1e-10
_TAIL_TOL = 1e-6


class XMeanError(ValueError):
    """Field has a nonzero x-mean where the equation requires ∂_x-structured data."""


class KernelUnavailableError(ValueError):
    """The explicit kernel exists only for α = 1, γ = 0."""


def dispersion_symbol(xi, eta, params: EquationParams | None = None):
    """ω(ξ, η) = sgn(ξ)(ξ² + αη²) - γη²/ξ, zero on ξ = 0.

    Example:
        >>> float(dispersion_symbol(-2.0, 1.0, EquationParams(alpha=1.0, gamma=1.0)))
        -4.5
    """
    params = params or EquationParams()
    out = dispersion_relation(xi, eta, params.alpha, params.gamma)
    return float(out) if np.ndim(out) == 0 else out


def xmean_fraction(u: SpectralField) -> float:
    """Relative L² mass carried by the ξ = 0 column."""
    total = np.sum(np.abs(u.coeffs) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(u.coeffs[0, :]) ** 2) / total)


def propagate(u: SpectralField, t: float, params: EquationParams | None = None) -> SpectralField:
    """Apply the linear group for time ``t``; the result's time is u.time + t."""
    params = params or EquationParams()
    if params.gamma != 0.0 and xmean_fraction(u) > _XMEAN_TOL:
        raise XMeanError("X^s violation: gamma != 0 requires zero x-mean data")
    if t == 0:
        return u.with_coeffs(u.coeffs.copy())
    m = Multiplier.dispersion(t, params.alpha, params.gamma)
    out = apply_multiplier(u, m)
    out.time = u.time + t
    return out


def kernel_I(t: float, x, y):
    """Kernel I(t)(x, y) of the linear group (α = 1, γ = 0); real valued.

    Negative times follow from I(-t)(x, y) = I(t)(-x, -y).
    """
    if t == 0:
        raise ValueError("kernel undefined at t=0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if t < 0:
        t, x, y = -t, -x, -y
    first = (_C / t) * np.exp(-1j * (x * x + y * y) / (4.0 * t)) * fresnel_tail(x / math.sqrt(t))
    out = 2.0 * KERNEL_SCALE * np.real(first)
    return float(out) if out.ndim == 0 else out


def _support_box(values: np.ndarray) -> tuple[slice, slice] | None:
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return None
    mask = mag >= _SUPPORT_TOL * peak
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1)


def _tail_fraction(values: np.ndarray, grid: Grid2D) -> float:
    X, Y = grid.mesh()
    outside = (np.abs(X) > grid.Lx / 2) | (np.abs(Y) > grid.Ly / 2)
    total = np.sum(np.abs(values) ** 2)
    return float(np.sum(np.abs(values[outside]) ** 2) / total)


def _fine_nodes(lo: float, hi: float, h: float, reach: float, t: float, bandwidth: float):
    # trapezoid weights on [lo - h, hi + h]; the integrand's top frequency is
    # the chirp's reach/(2|t|) plus the data bandwidth, which fixes the spacing
    freq = reach / (2.0 * abs(t)) + bandwidth
    target = 0.8 * 2.0 * math.pi / freq
    a, b = lo - h, hi + h
    m = max(int(math.ceil((b - a) / min(target, h))), 2)
    return np.linspace(a, b, m + 1), (b - a) / m


def _interpolation_matrix(nodes: np.ndarray, freqs: np.ndarray, n: int, real: bool) -> np.ndarray:
    E = np.exp(1j * np.outer(nodes, freqs))
    if real:
        E[:, n // 2] = np.cos(nodes * freqs[n // 2])
    return E


def propagate_via_kernel(u: SpectralField, t: float, params: EquationParams | None = None) -> SpectralField:
    """Linear group by direct convolution with the explicit kernel.

    The data is resampled (trigonometric interpolation) onto a fine uniform
    grid covering its numerical support, which resolves the chirp of the
    kernel for every output point; the convolution then factors as
    K(d) = 2 Re[T(d₁) Y(d₂)] and is evaluated as two matrix products per
    part.  Wrap-around is not modelled: the output is the free-space
    convolution restricted to the box, which is the point of this path.
    """
    params = params or EquationParams()
    if params.alpha != 1.0 or params.gamma != 0.0:
        raise KernelUnavailableError("kernel unavailable: needs alpha = 1 and gamma = 0")
    grid = u.grid
    if t == 0:
        return u.with_coeffs(u.coeffs.copy())
    values = inverse_transform(u)
    box = _support_box(values)
    if box is None:
        return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128), u.time + t, u.real)
    tail = _tail_fraction(values, grid)
    if tail > _TAIL_TOL:
        warnings.warn(f"data not localized: {tail:.2e} of the L2 mass lies outside the half-domain",
                      RuntimeWarning, stacklevel=2)

    sx, sy = box
    x0, x1 = grid.x[sx.start], grid.x[sx.stop - 1]
    y0, y1 = grid.y[sy.start], grid.y[sy.stop - 1]
    reach_x = grid.Lx + max(abs(x0), abs(x1)) + grid.dx
    reach_y = grid.Ly + max(abs(y0), abs(y1)) + grid.dy
    xs, hx = _fine_nodes(x0, x1, grid.dx, reach_x, t, grid.xi_max)
    ys, hy = _fine_nodes(y0, y1, grid.dy, reach_y, t, math.pi / grid.dy)

    tau = abs(t)
    sign = 1.0 if t > 0 else -1.0
    d1 = grid.x[:, None] - xs[None, :]
    d2 = grid.y[:, None] - ys[None, :]
    T = KERNEL_SCALE * (_C / tau) * np.exp(-1j * d1 * d1 / (4 * tau)) * fresnel_tail(-sign * d1 / math.sqrt(tau))
    Y = np.exp(-1j * d2 * d2 / (4 * tau))
    weight = hx * hy * grid.mode_area / (2.0 * math.pi) ** 2

    # fine samples of the data are Ex C Ey^T (2π)^{-1} dξ dη; contracting the
    # kernel factors into the interpolation matrices first keeps memory at
    # O(n m) however fine the quadrature nodes are
    Ex = _interpolation_matrix(xs, grid.xi, grid.nx, u.real)
    Ey = _interpolation_matrix(ys, grid.eta, grid.ny, u.real)
    P = T @ Ex
    Q = Y @ Ey
    if u.real:
        out = 2.0 * np.real(P @ u.coeffs @ Q.T) * weight
    else:
        Pc = T @ np.conj(Ex)
        Qc = Y @ np.conj(Ey)
        out = (P @ u.coeffs @ Q.T + np.conj(Pc @ np.conj(u.coeffs) @ Qc.T)) * weight
    return transform(out, grid, u.time + t)
