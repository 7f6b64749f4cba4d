"""Pseudospectral laboratory for the 2D generalized Benjamin-Ono equation

    (u_t + u^p u_x + H u_xx + α H u_yy)_x - γ u_yy = 0,

with H the Hilbert transform in x.  Submodules:

* ``spectral``: grids, transforms, Fourier multipliers, dealiased products
* ``propagator``: the linear group by multiplier and by explicit kernel
* ``evolution``: integrating-factor RK4 solver and Duhamel residual
* ``diagnostics``: norms, decay fits, J(t), Gronwall and weighted envelopes
* ``inequalities``: empirical constants of commutator and product estimates
* ``scattering``: pulled-back profiles and scattering states
* ``storage``, ``config``, ``experiments``, ``cli``: files and orchestration
"""

__version__ = "0.1.0"

from .params import EquationParams, SolveSchedule
from .spectral import (
    Grid2D,
    Multiplier,
    SpectralField,
    apply_multiplier,
    dealias_product,
    inv_dx,
    inverse_transform,
    make_grid,
    transform,
)
from .propagator import dispersion_symbol, kernel_I, propagate, propagate_via_kernel
from .fresnel import fresnel_tail
from .evolution import Trajectory, duhamel_residual, evolve, nonlinear_rhs, step
from .diagnostics import NormReport, DecayFit, fit_decay, gronwall_envelope, j_integral, norms
from .scattering import ScatterRecord, pullback, scattering_state
from .inequalities import RatioReport, RatioSample, random_smooth_field, ratio_report
