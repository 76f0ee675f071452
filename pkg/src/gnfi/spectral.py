"""Periodic-cell sampling and discrete Fourier analysis/synthesis.

Coefficients are normalised so that ``analysis`` returns approximations of
the analytic Fourier series coefficients

    u_n = (1/|cell|) * integral u(rho) exp(-i alpha_n . rho) d rho,

i.e. the forward DFT carries ``1/(N1*N2)`` and the inverse carries nothing.
Coefficient arrays are stored in FFT order: array index ``k`` holds mode
``n = k`` for ``k < N/2`` and ``n = k - N`` otherwise, so the resolvable
set is ``[-N/2, N/2)`` with the Nyquist row on the negative side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidFieldError, ParameterError
from .kernels import dft_direct

__all__ = [
    "PeriodicGrid",
    "ComplexGrid",
    "SpectralGrid",
    "SurfaceProfile",
    "analysis",
    "synthesis",
    "direct_analysis",
    "profile_example1",
    "profile_example2",
    "tabulated_profile",
    "sample_profile",
    "psi_example1",
    "psi_example2",
    "refine",
    "downsample",
]


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform ``N1 x N2`` sampling of one period cell, endpoint excluded."""

    period1: float
    period2: float
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("n1", "n2"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ParameterError(f"{name} must be an even integer >= 4, got {n}")
            object.__setattr__(self, name, int(n))
        for name in ("period1", "period2"):
            p = float(getattr(self, name))
            if not np.isfinite(p) or p <= 0:
                raise ParameterError(f"{name} must be positive, got {p}")
            object.__setattr__(self, name, p)

    @property
    def shape(self):
        return (self.n1, self.n2)

    @property
    def size(self):
        return self.n1 * self.n2

    @property
    def spacing(self):
        return (self.period1 / self.n1, self.period2 / self.n2)

    @property
    def cell_area(self):
        h1, h2 = self.spacing
        return h1 * h2

    @property
    def x(self):
        return np.arange(self.n1) * (self.period1 / self.n1)

    @property
    def y(self):
        return np.arange(self.n2) * (self.period2 / self.n2)

    def nodes(self):
        """``(X, Y)`` arrays of shape ``(N1, N2)``, ``indexing='ij'``."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def mode_indices(self):
        """Integer mode arrays ``(n1, n2)`` of shape ``(N1, N2)`` in FFT order."""
        k1 = np.rint(np.fft.fftfreq(self.n1) * self.n1).astype(np.int64)
        k2 = np.rint(np.fft.fftfreq(self.n2) * self.n2).astype(np.int64)
        return np.meshgrid(k1, k2, indexing="ij")

    def index_of(self, n):
        """Array index holding mode ``n = (n1, n2)``; raises if not resolvable."""
        a, b = int(n[0]), int(n[1])
        if not (-self.n1 // 2 <= a < self.n1 // 2 and -self.n2 // 2 <= b < self.n2 // 2):
            raise ParameterError(f"mode {n} is not resolvable on a {self.n1}x{self.n2} grid")
        return (a % self.n1, b % self.n2)

    def refined(self, factor: int) -> "PeriodicGrid":
        return PeriodicGrid(self.period1, self.period2, self.n1 * factor, self.n2 * factor)


@dataclass(frozen=True)
class ComplexGrid:
    """Complex samples ``values[i, j] = u(x_i, y_j)`` on a periodic grid."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise InvalidFieldError(f"expected shape {self.grid.shape}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InvalidFieldError("field contains non-finite samples")
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def real(self):
        return self.values.real

    def __add__(self, other):
        return ComplexGrid(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return ComplexGrid(self.grid, self.values - _vals(other))

    def __mul__(self, a):
        return ComplexGrid(self.grid, self.values * a)

    __rmul__ = __mul__


def _vals(other):
    return other.values if isinstance(other, ComplexGrid) else other


@dataclass(frozen=True)
class SpectralGrid:
    """Fourier coefficients ``u_n`` of a field on ``grid``, FFT ordering."""

    grid: PeriodicGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise InvalidFieldError(f"expected shape {self.grid.shape}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidFieldError("coefficients contain non-finite values")
        object.__setattr__(self, "coeffs", _frozen(c))

    def __getitem__(self, n):
        return self.coeffs[self.grid.index_of(n)]

    def centered(self):
        """Coefficients reordered so that mode ``(0, 0)`` sits at ``(N1/2, N2/2)``."""
        return np.fft.fftshift(self.coeffs)


def analysis(fld: ComplexGrid) -> SpectralGrid:
    """Discrete Fourier analysis with the ``1/(N1*N2)`` normalisation."""
    vals = np.asarray(fld.values)
    if not np.all(np.isfinite(vals)):
        raise InvalidFieldError("field contains non-finite samples")
    return SpectralGrid(fld.grid, np.fft.fft2(vals) / fld.grid.size)


def synthesis(spec: SpectralGrid) -> ComplexGrid:
    """``u(rho) = sum_n u_n exp(i alpha_n . rho)`` on the grid nodes."""
    return ComplexGrid(spec.grid, np.fft.ifft2(spec.coeffs) * spec.grid.size)


def direct_analysis(fld: ComplexGrid) -> SpectralGrid:
    """Same result as :func:`analysis`, by explicit double summation."""
    return SpectralGrid(fld.grid, dft_direct(fld.values))


# --------------------------------------------------------------------------
# surface profiles

def psi_example1(x, y):
    return 0.5 * np.sin(3 * np.pi * x) * (np.cos(2 * np.pi * y) - np.cos(4 * np.pi * y))


def psi_example2(x, y):
    return np.abs(np.cos(2 * np.pi * x) * np.cos(2 * np.pi * y)) - np.abs(
        np.sin(np.pi * x) * np.sin(2 * np.pi * y)
    )


BUILTIN_PROFILES: dict[str, Callable] = {
    "builtin-example1": psi_example1,
    "builtin-example2": psi_example2,
}


@dataclass(frozen=True)
class SurfaceProfile:
    """Real surface shape ``psi`` sampled on a grid.

    ``kind`` is ``'builtin-example1'``, ``'builtin-example2'`` or
    ``'tabulated'``. The builtin shapes are defined in absolute coordinates,
    so they only have their intended meaning on the unit cell.
    """

    kind: str
    values: ComplexGrid

    def __post_init__(self):
        if self.kind not in BUILTIN_PROFILES and self.kind != "tabulated":
            raise ParameterError(f"unknown profile kind {self.kind!r}")
        if np.any(self.values.values.imag != 0):
            raise InvalidFieldError("surface profile must be real")

    @property
    def grid(self):
        return self.values.grid

    def spectrum(self) -> SpectralGrid:
        return analysis(self.values)


def _builtin(kind, grid):
    X, Y = grid.nodes()
    return SurfaceProfile(kind, ComplexGrid(grid, BUILTIN_PROFILES[kind](X, Y).astype(complex)))


def profile_example1(grid: PeriodicGrid) -> SurfaceProfile:
    """``psi = 0.5 sin(3 pi x) (cos 2 pi y - cos 4 pi y)`` at the grid nodes."""
    return _builtin("builtin-example1", grid)


def profile_example2(grid: PeriodicGrid) -> SurfaceProfile:
    """``psi = |cos 2 pi x cos 2 pi y| - |sin pi x sin 2 pi y|`` at the grid nodes."""
    return _builtin("builtin-example2", grid)


def tabulated_profile(fld: ComplexGrid) -> SurfaceProfile:
    """Wrap sampled surface values (e.g. a previous reconstruction); keeps the real part."""
    return SurfaceProfile("tabulated", ComplexGrid(fld.grid, fld.values.real.astype(complex)))


def sample_profile(profile: SurfaceProfile, grid: PeriodicGrid) -> SurfaceProfile:
    """The same surface on another grid of the same periods.

    Builtin shapes are re-evaluated pointwise; tabulated ones are
    trigonometrically interpolated (exact for band-limited data).
    """
    if grid == profile.grid:
        return profile
    if profile.kind in BUILTIN_PROFILES:
        return _builtin(profile.kind, grid)
    return tabulated_profile(refine(profile.values, grid))


def refine(fld: ComplexGrid, grid: PeriodicGrid) -> ComplexGrid:
    """Trigonometric interpolation of ``fld`` onto a finer grid (zero padding).

    The Nyquist rows of the coarse spectrum are split evenly between
    ``+N/2`` and ``-N/2`` so real fields stay real.
    """
    g0 = fld.grid
    if (grid.period1, grid.period2) != (g0.period1, g0.period2):
        raise ParameterError("refine needs identical periods")
    if grid.n1 < g0.n1 or grid.n2 < g0.n2:
        raise ParameterError("refine only goes to finer grids")
    c = np.fft.fftshift(analysis(fld).coeffs)
    m1, m2 = g0.n1, g0.n2
    # split Nyquist rows/cols symmetrically
    c = np.pad(c, ((0, 1), (0, 1)))
    c[m1, :] = c[0, :] / 2
    c[0, :] /= 2
    c[:, m2] = c[:, 0] / 2
    c[:, 0] /= 2
    out = np.zeros(grid.shape, dtype=complex)
    o1 = grid.n1 // 2 - m1 // 2
    o2 = grid.n2 // 2 - m2 // 2
    out[o1:o1 + m1 + 1, o2:o2 + m2 + 1] = c
    return synthesis(SpectralGrid(grid, np.fft.ifftshift(out)))


def downsample(fld: ComplexGrid, factor: int) -> ComplexGrid:
    """Keep every ``factor``-th sample in both directions (nodes coincide)."""
    g = fld.grid
    if g.n1 % factor or g.n2 % factor:
        raise ParameterError(f"grid {g.shape} not divisible by {factor}")
    coarse = PeriodicGrid(g.period1, g.period2, g.n1 // factor, g.n2 // factor)
    return ComplexGrid(coarse, fld.values[::factor, ::factor])
