"""Equation parameters and time-stepping schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["EquationParams", "SolveSchedule"]


@dataclass(frozen=True)
class EquationParams:
    """Instance of (u_t + u^p u_x + H u_xx + α H u_yy)_x - γ u_yy = 0.

    Attributes:
        p: Nonlinearity power, a positive integer.
        alpha: Coefficient of the transverse Hilbert term.
        gamma: Coefficient of the transverse antiderivative term.
        s: Sobolev index used by diagnostics; must exceed 2.
    """

    p: int = 1
    alpha: float = 1.0
    gamma: float = 0.0
    s: float = 3.0

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        for name in ("alpha", "gamma", "s"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.s <= 2:
            raise ValueError(f"s must be greater than 2, got {self.s}")


@dataclass(frozen=True)
class SolveSchedule:
    """Time-stepping request.

    ``dt = None`` asks the solver to pick the largest step allowed by the
    stability guard at t = 0.  The step actually taken is adjusted down so
    that an integer number of steps lands on ``t_end``.
    """

    t_end: float
    dt: float | None = None
    snapshot_stride: int = 1
    cfl_guard: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if isinstance(self.snapshot_stride, bool) or int(self.snapshot_stride) != self.snapshot_stride \
                or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be an integer >= 1, got {self.snapshot_stride!r}")
        object.__setattr__(self, "snapshot_stride", int(self.snapshot_stride))
        if not (0 < self.cfl_guard <= 1):
            raise ValueError(f"cfl_guard must lie in (0, 1], got {self.cfl_guard!r}")
