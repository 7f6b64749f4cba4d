"""Binary snapshot files and CSV tables.

Snapshot layout (all little-endian):

    offset  size  field
    0       4     magic b"BO2D"
    4       4     format version, uint32
    8       4     nx, uint32
    12      4     ny, uint32
    16      8     Lx, float64
    24      8     Ly, float64
    32      8     t, float64
    40      8     s, float64
    48      4     flags, uint32 (bit 0: real field)
    52      16·nx·ny  coefficients, complex128, row-major (x index slowest),
                      FFT mode order on both axes
"""

from __future__ import annotations

import csv
import os
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectral import Grid2D, SpectralField

__all__ = [
    "SnapshotError",
    "write_snapshot",
    "read_snapshot",
    "HEADER",
    "HEADER_SIZE",
    "FORMAT_VERSION",
    "MAGIC",
    "format_number",
    "write_csv",
    "read_csv",
    "DIAGNOSTIC_COLUMNS",
    "diagnostics_rows",
]

MAGIC = b"BO2D"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIIIddddI")
HEADER_SIZE = HEADER.size
FLAG_REAL = 1

DIAGNOSTIC_COLUMNS = ("t", "l2", "hs", "xs", "linf", "w1inf", "weighted", "gronwall_integrand")


class SnapshotError(OSError):
    """Malformed or unreadable snapshot file."""


def write_snapshot(path: str | os.PathLike, u: SpectralField, s: float = 0.0) -> None:
    header = HEADER.pack(MAGIC, FORMAT_VERSION, u.grid.nx, u.grid.ny, u.grid.Lx, u.grid.Ly,
                         float(u.time), float(s), FLAG_REAL if u.real else 0)
    payload = np.ascontiguousarray(u.coeffs, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_snapshot(path: str | os.PathLike) -> tuple[SpectralField, float]:
    """Read a snapshot; returns the field and the stored Sobolev index s.

    Raises:
        SnapshotError: bad magic, unsupported version, truncation, or
            invalid grid fields.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise SnapshotError(f"truncated snapshot: {len(raw)} bytes, header needs {HEADER_SIZE}")
    magic, version, nx, ny, Lx, Ly, t, s, flags = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise SnapshotError(f"unsupported version {version}")
    expected = HEADER_SIZE + 16 * nx * ny
    if len(raw) < expected:
        raise SnapshotError(f"truncated snapshot: {len(raw)} bytes, expected {expected}")
    if len(raw) > expected:
        raise SnapshotError(f"trailing data in snapshot: {len(raw)} bytes, expected {expected}")
    try:
        grid = Grid2D(nx, ny, Lx, Ly)
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in snapshot header: {exc}") from exc
    coeffs = np.frombuffer(raw, dtype="<c16", offset=HEADER_SIZE).reshape(nx, ny).astype(np.complex128)
    try:
        field = SpectralField(grid, coeffs, t, bool(flags & FLAG_REAL))
    except ValueError as exc:
        raise SnapshotError(f"invalid snapshot payload: {exc}") from exc
    return field, s


def format_number(x) -> str:
    """17 significant digits; None and NaN both print as "nan"."""
    if x is None:
        return "nan"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_number(v) for v in row])


def read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def diagnostics_rows(reports, theta: float = 1.0):
    for r in reports:
        yield (r.time, r.l2, r.hs, r.xs, r.linf, r.w1inf, r.weighted.get(float(theta)),
               r.gronwall_integrand)


def ensure_dir(path: str | os.PathLike) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
