"""Periodic 2D spectral substrate: grids, transforms, Fourier multipliers, products.

Coefficients approximate the unitary continuum Fourier transform

    û(ξ, η) = (2π)^{-1} ∫∫ u(x, y) e^{-i(xξ + yη)} dx dy,

sampled on the lattice ξ_j = π j / Lx, η_k = π k / Ly of the box
[-Lx, Lx) × [-Ly, Ly).  With that normalization Parseval reads

    dx dy Σ |u|² = dξ dη Σ |û|²,

and coefficients do not depend on the number of grid points, so the same
array can be zero-padded onto a finer grid and inverted there directly.

Mode order along each axis is the FFT order of ``numpy.fft.fftfreq``:
indices 0, 1, ..., n/2-1, -n/2, ..., -1.  Coefficient arrays have shape
(nx, ny), x along axis 0.

The transform kernel is e^{-i⟨x,ξ⟩} on the forward side.  Writing the forward
transform with e^{+i⟨x,ξ⟩} instead maps (ξ, η) to (-ξ, -η), which flips the
sign of every odd symbol and leaves norms, groups and decay rates unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid2D",
    "SpectralField",
    "Multiplier",
    "make_grid",
    "transform",
    "inverse_transform",
    "apply_multiplier",
    "inv_dx",
    "dx",
    "dy",
    "dealias_product",
    "power",
    "dispersion_relation",
    "inner",
    "l2_norm",
    "conjugate_symmetry_error",
    "reflect",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on [-Lx, Lx) × [-Ly, Ly) and its frequency lattice."""

    nx: int
    ny: int
    Lx: float
    Ly: float

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n:
                raise ValueError(f"{name} must be an integer, got {n!r}")
            if n % 2:
                raise ValueError(f"{name} must be even, got {n}")
            if n < 8:
                raise ValueError(f"{name} must be at least 8, got {n}")
        for name in ("Lx", "Ly"):
            L = getattr(self, name)
            if not (np.isfinite(L) and L > 0):
                raise ValueError(f"{name} must be positive, got {L!r}")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        object.__setattr__(self, "Lx", float(self.Lx))
        object.__setattr__(self, "Ly", float(self.Ly))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return 2.0 * self.Lx / self.nx

    @property
    def dy(self) -> float:
        return 2.0 * self.Ly / self.ny

    @property
    def dxi(self) -> float:
        return math.pi / self.Lx

    @property
    def deta(self) -> float:
        return math.pi / self.Ly

    @cached_property
    def jx(self) -> np.ndarray:
        """Signed integer mode indices along x, FFT order."""
        return np.fft.fftfreq(self.nx, 1.0 / self.nx).astype(np.int64)

    @cached_property
    def jy(self) -> np.ndarray:
        return np.fft.fftfreq(self.ny, 1.0 / self.ny).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        return self.dxi * self.jx

    @cached_property
    def eta(self) -> np.ndarray:
        return self.deta * self.jy

    @cached_property
    def x(self) -> np.ndarray:
        return -self.Lx + self.dx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -self.Ly + self.dy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates, each of shape (nx, ny)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def frequency_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xi, self.eta, indexing="ij")

    @cached_property
    def _phase(self) -> np.ndarray:
        # e^{i Lx ξ_j} e^{i Ly η_k} = (-1)^{j+k}: shifts the FFT origin to the box corner
        sx = 1.0 - 2.0 * (self.jx % 2)
        sy = 1.0 - 2.0 * (self.jy % 2)
        return np.outer(sx, sy)

    def _scaled_phase(self, scale: float) -> np.ndarray:
        cache = self.__dict__.setdefault("_phase_cache", {})
        if scale not in cache:
            cache[scale] = self._phase * scale
        return cache[scale]

    @property
    def xi_max(self) -> float:
        return self.dxi * (self.nx // 2)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def mode_area(self) -> float:
        return self.dxi * self.deta

    def refined(self, factor: int = 2) -> "Grid2D":
        """Same box with ``factor`` times more points per axis."""
        return Grid2D(self.nx * factor, self.ny * factor, self.Lx, self.Ly)


def make_grid(nx: int, ny: int, Lx: float, Ly: float) -> Grid2D:
    """Build a grid on [-Lx, Lx) × [-Ly, Ly) with nx × ny points.

    Example:
        >>> make_grid(8, 8, math.pi, math.pi).xi
        array([ 0.,  1.,  2.,  3., -4., -3., -2., -1.])
    """
    return Grid2D(nx, ny, Lx, Ly)


@dataclass
class SpectralField:
    """Scalar field held as continuum-normalized Fourier coefficients.

    Attributes:
        grid: Grid the coefficients live on.
        coeffs: Complex array of shape (nx, ny) in FFT mode order.
        time: Model time tag.
        real: True when the physical field is real-valued; coefficients then
            satisfy û(-ξ, -η) = conj(û(ξ, η)).
    """

    grid: Grid2D
    coeffs: np.ndarray
    time: float = 0.0
    real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients contain NaN or Inf")
        self.coeffs = c
        self.time = float(self.time)

    def with_coeffs(self, coeffs: np.ndarray, *, time: float | None = None,
                    real: bool | None = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs,
                             self.time if time is None else time,
                             self.real if real is None else real)

    def copy(self) -> "SpectralField":
        return replace(self, coeffs=self.coeffs.copy())

    def values(self) -> np.ndarray:
        return inverse_transform(self)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs, real=self.real and other.real)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs, real=self.real and other.real)

    def __mul__(self, scalar: float) -> "SpectralField":
        if not np.isscalar(scalar):
            raise TypeError("use dealias_product for field products")
        real = self.real and np.isrealobj(scalar)
        return self.with_coeffs(self.coeffs * scalar, real=real)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: Grid2D, time: float = 0.0) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), time, True)


def _check_same_grid(*fields: SpectralField) -> Grid2D:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError(f"grid mismatch: {f.grid} vs {grid}")
    return grid


# --- transforms -----------------------------------------------------------

def _forward(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    scale = grid.cell_area / (2.0 * math.pi)
    if np.isrealobj(values):
        half = sfft.rfft2(values)
        half *= grid._scaled_phase(scale)[:, : grid.ny // 2 + 1]
        return _full_from_half(half, grid.ny)
    full = sfft.fft2(values)
    full *= grid._scaled_phase(scale)
    return full


def _full_from_half(half: np.ndarray, ny: int) -> np.ndarray:
    nx = half.shape[0]
    full = np.empty((nx, ny), dtype=np.complex128)
    h = ny // 2
    full[:, : h + 1] = half
    rows = (-np.arange(nx)) % nx
    full[:, h + 1:] = np.conj(half[rows, h - 1:0:-1])
    return full


def _inverse(coeffs: np.ndarray, grid: Grid2D, real: bool) -> np.ndarray:
    phase = grid._scaled_phase(2.0 * math.pi / grid.cell_area)
    if real:
        h = grid.ny // 2 + 1
        return sfft.irfft2(coeffs[:, :h] * phase[:, :h], s=grid.shape)
    return sfft.ifft2(coeffs * phase)


def transform(values: np.ndarray, grid: Grid2D, time: float = 0.0) -> SpectralField:
    """Forward transform of grid samples; real input yields a real-flagged field."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"array shape {values.shape} does not match grid {grid.shape}")
    real = np.isrealobj(values)
    values = values.astype(np.float64 if real else np.complex128, copy=False)
    return SpectralField(grid, _forward(values, grid), time, real)


def inverse_transform(u: SpectralField) -> np.ndarray:
    """Grid samples of ``u``: real array for real-flagged fields, complex otherwise."""
    return _inverse(u.coeffs, u.grid, u.real)


def inner(f: SpectralField, g: SpectralField) -> complex:
    """Discrete L² inner product ⟨f, g⟩ = ∫ f conj(g), computed spectrally."""
    _check_same_grid(f, g)
    return complex(np.vdot(g.coeffs, f.coeffs) * f.grid.mode_area)


def l2_norm(u: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2) * u.grid.mode_area))


def conjugate_symmetry_error(u: SpectralField) -> float:
    """max |û(-k) - conj(û(k))| relative to max |û|."""
    c = u.coeffs
    scale = np.abs(c).max()
    if scale == 0:
        return 0.0
    return float(np.abs(_reflect_indices(c) - np.conj(c)).max() / scale)


def _reflect_indices(c: np.ndarray) -> np.ndarray:
    nx, ny = c.shape
    return c[np.ix_((-np.arange(nx)) % nx, (-np.arange(ny)) % ny)]


def reflect(u: SpectralField) -> SpectralField:
    """The data transform u(x, y) -> u(-x, -y)."""
    return u.with_coeffs(_reflect_indices(u.coeffs))


# --- multipliers ----------------------------------------------------------

def dispersion_relation(xi, eta, alpha: float = 1.0, gamma: float = 0.0):
    """ω(ξ, η) = sgn(ξ)(ξ² + αη²) - γη²/ξ, with ω = 0 where ξ = 0."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi, eta = np.broadcast_arrays(xi, eta)
    out = np.sign(xi) * (xi**2 + alpha * eta**2)
    if gamma != 0.0:
        nz = xi != 0
        out = np.where(nz, out - gamma * eta**2 / np.where(nz, xi, 1.0), 0.0)
    return out


@dataclass(frozen=True)
class Multiplier:
    """A Fourier multiplier symbol, evaluated lazily on a grid.

    ``kind`` is one of hilbert_x, inv_dx, deriv_x, deriv_y, lambda_s,
    homogeneous_s, dispersion or custom.  Odd symbols vanish on the ξ = 0
    column and on the Nyquist column/row of their variable so that real
    fields stay real.
    """

    kind: str
    s: float = 0.0
    t: float = 0.0
    alpha: float = 1.0
    gamma: float = 0.0
    table: np.ndarray | None = field(default=None, compare=False)

    KINDS = ("hilbert_x", "inv_dx", "deriv_x", "deriv_y", "lambda_s",
             "homogeneous_s", "dispersion", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown multiplier kind {self.kind!r}")
        if self.kind == "custom" and self.table is None:
            raise ValueError("custom multiplier needs a table")

    @classmethod
    def hilbert_x(cls) -> "Multiplier":
        return cls("hilbert_x")

    @classmethod
    def lambda_s(cls, s: float) -> "Multiplier":
        return cls("lambda_s", s=s)

    @classmethod
    def dispersion(cls, t: float, alpha: float = 1.0, gamma: float = 0.0) -> "Multiplier":
        return cls("dispersion", t=t, alpha=alpha, gamma=gamma)

    @property
    def preserves_reality(self) -> bool:
        return self.kind != "custom"

    def evaluate(self, grid: Grid2D) -> np.ndarray:
        XI, ETA = grid.frequency_mesh()
        nyq_x = grid.jx == -(grid.nx // 2)
        nyq_y = grid.jy == -(grid.ny // 2)
        k = self.kind
        if k == "hilbert_x":
            m = -1j * np.sign(XI)
            m[nyq_x, :] = 0
        elif k == "deriv_x":
            m = 1j * XI
            m[nyq_x, :] = 0
        elif k == "deriv_y":
            m = 1j * ETA
            m[:, nyq_y] = 0
        elif k == "inv_dx":
            with np.errstate(divide="ignore"):
                m = np.where(XI != 0, 1.0 / (1j * np.where(XI != 0, XI, 1.0)), 0.0)
            m[nyq_x, :] = 0
        elif k == "lambda_s":
            m = (1.0 + XI**2 + ETA**2) ** (self.s / 2.0)
        elif k == "homogeneous_s":
            r2 = XI**2 + ETA**2
            with np.errstate(divide="ignore"):
                m = np.where(r2 > 0, r2 ** (self.s / 2.0), 0.0)
        elif k == "dispersion":
            omega = dispersion_relation(XI, ETA, self.alpha, self.gamma)
            omega[nyq_x, :] = 0
            m = np.exp(-1j * omega * self.t)
        else:
            m = np.asarray(self.table)
            if m.shape != grid.shape:
                raise ValueError(f"custom table shape {m.shape} does not match grid {grid.shape}")
        return np.asarray(m, dtype=np.complex128)


def apply_multiplier(u: SpectralField, m: Multiplier | np.ndarray) -> SpectralField:
    """Pointwise product of coefficients with a symbol."""
    if isinstance(m, Multiplier):
        values = m.evaluate(u.grid)
        keeps_real = m.preserves_reality
    else:
        values = np.asarray(m)
        if values.shape != u.grid.shape:
            raise ValueError(f"symbol shape {values.shape} does not match grid {u.grid.shape}")
        keeps_real = False
    real = u.real and (keeps_real or _symbol_is_hermitian(values))
    return u.with_coeffs(u.coeffs * values, real=real)


def _symbol_is_hermitian(m: np.ndarray) -> bool:
    return bool(np.allclose(_reflect_indices(m), np.conj(m), rtol=0, atol=1e-14 * max(1.0, np.abs(m).max())))


def dx(u: SpectralField) -> SpectralField:
    return apply_multiplier(u, Multiplier("deriv_x"))


def dy(u: SpectralField) -> SpectralField:
    return apply_multiplier(u, Multiplier("deriv_y"))


def inv_dx(u: SpectralField) -> SpectralField:
    """∂_x^{-1}: divide by iξ off the ξ = 0 column, zero on it."""
    return apply_multiplier(u, Multiplier("inv_dx"))


# --- dealiased products ---------------------------------------------------

def _pad_axis(c: np.ndarray, axis: int, m: int, split_nyquist: bool) -> np.ndarray:
    c = np.moveaxis(c, axis, 0)
    n = c.shape[0]
    h = n // 2
    out = np.zeros((m,) + c.shape[1:], dtype=np.complex128)
    out[:h] = c[:h]
    out[m - h + 1:] = c[h + 1:]
    if split_nyquist:
        out[h] = 0.5 * c[h]
        out[m - h] = 0.5 * c[h]
    else:
        out[m - h] = c[h]
    return np.moveaxis(out, 0, axis)


def _truncate_axis(c: np.ndarray, axis: int, n: int, fold_nyquist: bool) -> np.ndarray:
    c = np.moveaxis(c, axis, 0)
    m = c.shape[0]
    h = n // 2
    out = np.empty((n,) + c.shape[1:], dtype=np.complex128)
    out[:h] = c[:h]
    out[h + 1:] = c[m - h + 1:]
    out[h] = c[m - h] + c[h] if fold_nyquist else c[m - h]
    return np.moveaxis(out, 0, axis)


def padded_size(n: int, degree: int) -> int:
    """Smallest even size > (degree + 1) n / 2: alias-free for degree-d products.

    The inequality is strict because the split Nyquist modes reach ±n/2, so
    a degree-d product reaches ±dn/2 and its alias must miss ±n/2 as well.
    """
    m = (degree + 1) * n // 2 + 1
    return m + (m % 2)


@lru_cache(maxsize=64)
def _padded_grid(grid: Grid2D, degree: int) -> Grid2D:
    return Grid2D(padded_size(grid.nx, degree), padded_size(grid.ny, degree), grid.Lx, grid.Ly)


def to_padded_values(u: SpectralField, fine: Grid2D) -> np.ndarray:
    """Samples of the trigonometric interpolant of ``u`` on a finer grid of the same box."""
    if not u.real:
        c = _pad_axis(u.coeffs, 0, fine.nx, False)
        c = _pad_axis(c, 1, fine.ny, False)
        return _inverse(c, fine, False)
    # real fields: pad only the half spectrum that irfft2 reads; the upper
    # half of the split y-Nyquist column is implied by conjugate symmetry
    h = u.grid.ny // 2
    c = _pad_axis(u.coeffs[:, : h + 1], 0, fine.nx, True)
    half = np.zeros((fine.nx, fine.ny // 2 + 1), dtype=np.complex128)
    half[:, :h] = c[:, :h]
    half[:, h] = 0.5 * c[:, h]
    half *= fine._scaled_phase(2.0 * math.pi / fine.cell_area)[:, : fine.ny // 2 + 1]
    return sfft.irfft2(half, s=fine.shape)


def from_padded_values(values: np.ndarray, fine: Grid2D, grid: Grid2D, time: float) -> SpectralField:
    """Coefficients of fine-grid samples, truncated to the modes of ``grid``."""
    if not np.isrealobj(values):
        c = _forward(values, fine)
        c = _truncate_axis(c, 0, grid.nx, False)
        c = _truncate_axis(c, 1, grid.ny, False)
        return SpectralField(grid, c, time, False)
    h = grid.ny // 2
    big = sfft.rfft2(values)
    rows = _truncate_axis(big[:, : h + 1], 0, grid.nx, True)
    # fold the y-Nyquist pair: the -h column is the conjugate reflection of +h
    refl = (-np.arange(grid.nx)) % grid.nx
    rows[:, h] = rows[:, h] + np.conj(rows[refl, h])
    rows *= grid._scaled_phase(fine.cell_area / (2.0 * math.pi))[:, : h + 1]
    return SpectralField(grid, _full_from_half(rows, grid.ny), time, True)


def dealias_product(factors: Sequence[SpectralField], d: int | None = None) -> SpectralField:
    """Alias-free pointwise product of fields.

    The factors are zero-padded to a grid (d + 1)/2 times finer per axis,
    multiplied in physical space and truncated back, which reproduces the
    exact coefficient convolution on the retained modes for any product of
    at most ``d`` band-limited factors.

    Args:
        factors: Two or more fields on one grid.
        d: Degree the padding must cover; defaults to ``len(factors)``.
    """
    if len(factors) < 1:
        raise ValueError("need at least one factor")
    grid = _check_same_grid(*factors)
    d = len(factors) if d is None else d
    if d < 2:
        raise ValueError(f"degree must be at least 2, got {d}")
    if d < len(factors):
        raise ValueError(f"degree {d} is smaller than the number of factors {len(factors)}")
    fine = _padded_grid(grid, d)
    cache: dict[int, np.ndarray] = {}
    prod = None
    for f in factors:
        key = id(f)
        if key not in cache:
            cache[key] = to_padded_values(f, fine)
        prod = cache[key] if prod is None else prod * cache[key]
    return from_padded_values(prod, fine, grid, factors[0].time)


def power(u: SpectralField, k: int, d: int | None = None) -> SpectralField:
    """Dealiased u**k with one padded transform pair."""
    if k < 1:
        raise ValueError("power must be positive")
    d = max(k, 2) if d is None else d
    fine = _padded_grid(u.grid, d)
    v = to_padded_values(u, fine)
    out = v
    for _ in range(k - 1):
        out = out * v
    return from_padded_values(out, fine, u.grid, u.time)
