"""Problem configuration, mode wavenumbers and the flat-interface solution.

Everything is parametrised by the two wavenumbers ``kappa_plus`` (upper
medium, where the incident wave lives) and ``kappa_minus`` (substrate).
Incidence is normal, ``E_inc = (p1, p2, 0) exp(-i kappa_plus z)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResonanceError
from .spectral import PeriodicGrid

__all__ = [
    "GratingConfig",
    "ModeBasis",
    "FresnelPair",
    "WOOD_TOL",
    "mode_basis",
    "branch_beta",
    "fresnel",
    "incident_trace",
    "zeroth_order",
    "zeroth_order_derivative",
]

#: relative tolerance on |beta_n| below which a mode counts as a Wood anomaly
WOOD_TOL = 1e-9

SIDES = ("above", "below")


@dataclass(frozen=True)
class GratingConfig:
    kappa_plus: float
    kappa_minus: float
    delta: float
    z_plus: float
    z_minus: float
    grid: PeriodicGrid
    polarization: tuple = (1.0, 0.0)

    def __post_init__(self):
        for name in ("kappa_plus", "kappa_minus"):
            k = getattr(self, name)
            if isinstance(k, complex) or np.iscomplexobj(k):
                raise ParameterError(f"{name} must be real (lossless media only)")
            k = float(k)
            if not np.isfinite(k) or k <= 0:
                raise ParameterError(f"{name} must be positive, got {k}")
            object.__setattr__(self, name, k)
        if not self.z_plus > 0:
            raise ParameterError(f"z_plus must be > 0, got {self.z_plus}")
        if not self.z_minus < 0:
            raise ParameterError(f"z_minus must be < 0, got {self.z_minus}")
        if not self.delta >= 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        p = tuple(float(v) for v in self.polarization)
        if len(p) == 3:
            if p[2] != 0:
                raise ParameterError("normal incidence requires p3 = 0")
            p = p[:2]
        if len(p) != 2 or abs(p[0] ** 2 + p[1] ** 2 - 1) > 1e-12:
            raise ParameterError(f"polarization must be a unit vector (p1, p2), got {p}")
        object.__setattr__(self, "polarization", p)
        object.__setattr__(self, "z_plus", float(self.z_plus))
        object.__setattr__(self, "z_minus", float(self.z_minus))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def wavelength(self):
        return 2 * np.pi / self.kappa_plus

    @property
    def p(self):
        """Polarization as a 3-vector."""
        return np.array([self.polarization[0], self.polarization[1], 0.0])

    def plane(self, side):
        """Measurement height for ``'above'``/``'reflection'`` or ``'below'``/``'transmission'``."""
        return self.z_plus if _side(side) == "above" else self.z_minus

    def kappa(self, side):
        return self.kappa_plus if _side(side) == "above" else self.kappa_minus

    def replace(self, **changes):
        kw = dict(
            kappa_plus=self.kappa_plus, kappa_minus=self.kappa_minus, delta=self.delta,
            z_plus=self.z_plus, z_minus=self.z_minus, grid=self.grid,
            polarization=self.polarization,
        )
        kw.update(changes)
        return GratingConfig(**kw)


def _side(side):
    s = {"reflection": "above", "transmission": "below", "+": "above", "-": "below"}.get(side, side)
    if s not in SIDES:
        raise ParameterError(f"side must be one of above/below/reflection/transmission, got {side!r}")
    return s


def branch_beta(kappa, alpha_abs2):
    """``sqrt(kappa^2 - |alpha|^2)`` on the branch with ``Re, Im >= 0``."""
    d = kappa**2 - np.asarray(alpha_abs2, dtype=float)
    root = np.sqrt(np.abs(d))
    return np.where(d >= 0, root + 0j, 1j * root)


@dataclass(frozen=True)
class ModeBasis:
    """Per-mode wavenumbers on the grid, arrays shaped like the grid (FFT order)."""

    grid: PeriodicGrid
    kappa_plus: float
    kappa_minus: float
    n1: np.ndarray = field(repr=False)
    n2: np.ndarray = field(repr=False)
    alpha1: np.ndarray = field(repr=False)
    alpha2: np.ndarray = field(repr=False)
    beta_plus: np.ndarray = field(repr=False)
    beta_minus: np.ndarray = field(repr=False)

    @property
    def alpha_abs2(self):
        return self.alpha1**2 + self.alpha2**2

    @property
    def alpha_abs(self):
        return np.sqrt(self.alpha_abs2)

    def beta(self, side):
        return self.beta_plus if _side(side) == "above" else self.beta_minus

    def at(self, n):
        """``(alpha1, alpha2, beta_plus, beta_minus)`` for a single mode."""
        idx = self.grid.index_of(n)
        return (
            float(self.alpha1[idx]), float(self.alpha2[idx]),
            complex(self.beta_plus[idx]), complex(self.beta_minus[idx]),
        )

    def modes(self, mask=None):
        """List of ``(n1, n2)`` tuples, optionally restricted by a boolean mask."""
        if mask is None:
            mask = np.ones(self.grid.shape, dtype=bool)
        return [(int(a), int(b)) for a, b in zip(self.n1[mask], self.n2[mask])]


def mode_values(n, period1, period2, kappa_plus, kappa_minus):
    """Wavenumbers of one mode, no grid needed; raises on a Wood anomaly."""
    a1 = 2 * np.pi * n[0] / period1
    a2 = 2 * np.pi * n[1] / period2
    bp = complex(branch_beta(kappa_plus, a1 * a1 + a2 * a2))
    bm = complex(branch_beta(kappa_minus, a1 * a1 + a2 * a2))
    if abs(bp) < WOOD_TOL * kappa_plus:
        raise ResonanceError(n, "upper", bp)
    if abs(bm) < WOOD_TOL * kappa_minus:
        raise ResonanceError(n, "lower", bm)
    return a1, a2, bp, bm


def mode_basis(cfg: GratingConfig) -> ModeBasis:
    """All resolvable modes of ``cfg.grid``; raises :class:`ResonanceError` on a Wood anomaly."""
    g = cfg.grid
    n1, n2 = g.mode_indices()
    a1 = 2 * np.pi * n1 / g.period1
    a2 = 2 * np.pi * n2 / g.period2
    a_abs2 = a1**2 + a2**2
    bp = branch_beta(cfg.kappa_plus, a_abs2)
    bm = branch_beta(cfg.kappa_minus, a_abs2)
    for beta, kappa, label in ((bp, cfg.kappa_plus, "upper"), (bm, cfg.kappa_minus, "lower")):
        bad = np.abs(beta) < WOOD_TOL * kappa
        if np.any(bad):
            i = np.argwhere(bad)[0]
            raise ResonanceError((n1[tuple(i)], n2[tuple(i)]), label, beta[tuple(i)])
    arrays = [n1, n2, a1, a2, bp, bm]
    for arr in arrays:
        arr.setflags(write=False)
    return ModeBasis(g, cfg.kappa_plus, cfg.kappa_minus, *arrays)


@dataclass(frozen=True)
class FresnelPair:
    r: float
    t: float


def fresnel(cfg_or_kappa_plus, kappa_minus=None) -> FresnelPair:
    """Normal-incidence reflection/transmission coefficients of the flat interface.

    Accepts either a :class:`GratingConfig` or the two wavenumbers.
    """
    if kappa_minus is None:
        kp, km = cfg_or_kappa_plus.kappa_plus, cfg_or_kappa_plus.kappa_minus
    else:
        kp, km = float(cfg_or_kappa_plus), float(kappa_minus)
    if not kp + km > 0:
        raise ParameterError("kappa_plus + kappa_minus must be positive")
    s = kp + km
    return FresnelPair(r=(kp - km) / s, t=2 * kp / s)


def incident_trace(cfg: GratingConfig, z):
    """``E_inc(z) = p exp(-i kappa_plus z)`` as a complex 3-vector."""
    return cfg.p * np.exp(-1j * cfg.kappa_plus * z)


def zeroth_order(cfg: GratingConfig, z, side):
    """Flat-interface field ``E^(0)(z)`` (3-vector), independent of rho."""
    fp = fresnel(cfg)
    if _side(side) == "above":
        k = cfg.kappa_plus
        return cfg.p * (np.exp(-1j * k * z) + fp.r * np.exp(1j * k * z))
    k = cfg.kappa_minus
    return cfg.p * fp.t * np.exp(-1j * k * z)


def zeroth_order_derivative(cfg: GratingConfig, z, side):
    """``d/dz`` of :func:`zeroth_order`."""
    fp = fresnel(cfg)
    if _side(side) == "above":
        k = cfg.kappa_plus
        return cfg.p * (-1j * k) * (np.exp(-1j * k * z) - fp.r * np.exp(1j * k * z))
    k = cfg.kappa_minus
    return cfg.p * fp.t * (-1j * k) * np.exp(-1j * k * z)
