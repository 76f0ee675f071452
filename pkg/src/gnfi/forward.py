"""Transformed-field-expansion solution through first order, and synthetic data.

For every Fourier mode ``n`` the first-order field is

    above:  E_jn(z) = A_jn exp(i beta+ z) - (i k+ p_j / z+) (z+ - z) (e^{-i k+ z} - r e^{i k+ z}) psi_n
    below:  E_jn(z) = B_jn exp(-i beta- z) - (i k- p_j / z-) (z- - z) t e^{-i k- z} psi_n

with ``A_jn = B_jn = C_jn psi_n`` for the tangential components and
``A_3n``, ``B_3n`` for the normal one. The map psi_n -> E_jn is diagonal in n.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SmallDivisorError
from .kernels import transfer_coefficients
from .physics import GratingConfig, ModeBasis, _side, fresnel, mode_basis, mode_values, zeroth_order
from .spectral import (
    ComplexGrid,
    SpectralGrid,
    SurfaceProfile,
    downsample,
    sample_profile,
    synthesis,
)

log = logging.getLogger(__name__)

__all__ = [
    "FirstOrderSolution",
    "SynthesisSpec",
    "DIVISOR_TOL",
    "solve_first_order",
    "c_coeff",
    "third_coeffs",
    "mode_field",
    "first_order_field",
    "clean_field",
    "apply_noise",
    "synthesize_data",
]

#: relative small-divisor tolerance; scaled by kappa_plus (beta sums) or kappa_plus**2
DIVISOR_TOL = 1e-9


def _divisor_eps(kappa_plus):
    return DIVISOR_TOL * kappa_plus, DIVISOR_TOL * kappa_plus**2


@dataclass(frozen=True)
class FirstOrderSolution:
    """Per-mode first-order amplitudes for unit ``psi_n``.

    ``c1``, ``c2`` are the tangential transfer coefficients (shared by both
    sides), ``a3``/``b3`` the normal-component amplitudes above/below.
    Modes with ``guarded`` False hit a small divisor and carry zeros.
    """

    cfg: GratingConfig
    basis: ModeBasis
    c1: np.ndarray = field(repr=False)
    c2: np.ndarray = field(repr=False)
    a3: np.ndarray = field(repr=False)
    b3: np.ndarray = field(repr=False)
    guarded: np.ndarray = field(repr=False)

    @property
    def excluded_modes(self):
        return self.basis.modes(~self.guarded)

    def amplitude(self, j, side):
        """Homogeneous amplitude per unit psi_n for component ``j`` on ``side``."""
        if j == 1:
            return self.c1
        if j == 2:
            return self.c2
        if j == 3:
            return self.a3 if _side(side) == "above" else self.b3
        raise ParameterError(f"component must be 1, 2 or 3, got {j}")

    def coefficient(self, j):
        if j not in (1, 2):
            raise ParameterError(f"transfer coefficient exists for j in {{1, 2}}, got {j}")
        return self.c1 if j == 1 else self.c2

    def scaled(self, factor):
        """Copy with every amplitude multiplied by ``factor`` (used to build bad solutions)."""
        return FirstOrderSolution(
            self.cfg, self.basis, self.c1 * factor, self.c2 * factor,
            self.a3 * factor, self.b3 * factor, self.guarded,
        )


def solve_first_order(cfg: GratingConfig, basis: ModeBasis | None = None) -> FirstOrderSolution:
    if basis is None:
        basis = mode_basis(cfg)
    eps_d, eps_q = _divisor_eps(cfg.kappa_plus)
    p1, p2 = cfg.polarization
    shape = basis.grid.shape
    out = transfer_coefficients(
        basis.alpha1.ravel(), basis.alpha2.ravel(),
        basis.beta_plus.ravel(), basis.beta_minus.ravel(),
        cfg.kappa_plus, cfg.kappa_minus, p1, p2, eps_d, eps_q,
    )
    c1, c2, a3, b3, ok = (a.reshape(shape) for a in out)
    sol = FirstOrderSolution(cfg, basis, c1, c2, a3, b3, ok)
    if not ok.all():
        log.warning("first order: %d mode(s) excluded by the small-divisor guard: %s",
                    int((~ok).sum()), sol.excluded_modes[:10])
    return sol


def _single_mode(n, cfg):
    a1, a2, bp, bm = mode_values(n, cfg.grid.period1, cfg.grid.period2,
                                 cfg.kappa_plus, cfg.kappa_minus)
    eps_d, eps_q = _divisor_eps(cfg.kappa_plus)
    if abs(bp + bm) < eps_d:
        raise SmallDivisorError(n, "beta+ + beta-", bp + bm)
    q = a1 * a1 + a2 * a2 + bp * bm
    p1, p2 = cfg.polarization
    c1, c2, a3, b3, ok = transfer_coefficients(
        [a1], [a2], [bp], [bm], cfg.kappa_plus, cfg.kappa_minus, p1, p2, eps_d, eps_q)
    if not ok[0]:
        raise SmallDivisorError(n, "|alpha|^2 + beta+ beta-", q)
    return complex(c1[0]), complex(c2[0]), complex(a3[0]), complex(b3[0])


def c_coeff(n, j, basis: ModeBasis | None, cfg: GratingConfig) -> complex:
    """Transfer coefficient ``C_jn`` (``j`` in 1, 2) of a single mode.

    ``basis`` is accepted for call-site symmetry; the mode need not be
    resolvable on the grid.
    """
    if j not in (1, 2):
        raise ParameterError(f"j must be 1 or 2, got {j}")
    return _single_mode(n, cfg)[j - 1]


def third_coeffs(n, basis: ModeBasis | None, cfg: GratingConfig):
    """``(A+_3n, B-_3n)`` per unit psi_n for a single mode."""
    c = _single_mode(n, cfg)
    return c[2], c[3]


def mode_field(cfg: GratingConfig, amp, beta, psi_n, z, side, j, derivative=False):
    """First-order mode values at height ``z`` (vectorised over modes).

    ``amp`` is the homogeneous amplitude per unit psi_n and ``beta`` the
    matching beta_n. Returns ``E`` or ``(E, dE/dz)``.
    """
    fp = fresnel(cfg)
    pj = cfg.p[j - 1]
    amp = np.asarray(amp)
    psi_n = np.asarray(psi_n)
    if _side(side) == "above":
        k, zp = cfg.kappa_plus, cfg.z_plus
        h = np.exp(1j * beta * z)
        em, ep = np.exp(-1j * k * z), np.exp(1j * k * z)
        pre = -1j * k * pj / zp
        e = amp * psi_n * h + pre * (zp - z) * (em - fp.r * ep) * psi_n
        if not derivative:
            return e
        de = (1j * beta * amp * psi_n * h
              + pre * (-(em - fp.r * ep) + (zp - z) * (-1j * k) * (em + fp.r * ep)) * psi_n)
        return e, de
    k, zm = cfg.kappa_minus, cfg.z_minus
    h = np.exp(-1j * beta * z)
    em = np.exp(-1j * k * z)
    pre = -1j * k * pj * fp.t / zm
    e = amp * psi_n * h + pre * (zm - z) * em * psi_n
    if not derivative:
        return e
    de = -1j * beta * amp * psi_n * h + pre * (-em + (zm - z) * (-1j * k) * em) * psi_n
    return e, de


def first_order_field(sol: FirstOrderSolution, psi_spec: SpectralGrid, z, side, j) -> SpectralGrid:
    """Coefficients ``E^(1)_jn(z)`` on ``side`` for the surface spectrum ``psi_spec``."""
    cfg = sol.cfg
    s = _side(side)
    lo, hi = (0.0, cfg.z_plus) if s == "above" else (cfg.z_minus, 0.0)
    slack = 1e-12 * max(abs(lo), abs(hi))
    if not lo - slack <= z <= hi + slack:
        raise ParameterError(f"z={z} outside [{lo}, {hi}] for side {s}")
    if psi_spec.grid != sol.basis.grid:
        raise ParameterError("surface spectrum and solution live on different grids")
    psi_n = np.where(sol.guarded, psi_spec.coeffs, 0.0)
    e = mode_field(cfg, sol.amplitude(j, s), sol.basis.beta(s), psi_n, z, s, j)
    return SpectralGrid(psi_spec.grid, e)


@dataclass(frozen=True)
class SynthesisSpec:
    """How to synthesise measurement data.

    ``side`` is ``'reflection'`` (plane ``z+``) or ``'transmission'``
    (plane ``z-``). ``fine_factor > 1`` computes the clean field on a grid
    that many times finer and keeps the coinciding nodes.
    """

    order: int = 1
    gamma: float = 0.0
    seed: int = 0
    side: str = "reflection"
    component: int = 1
    fine_factor: int = 1

    def __post_init__(self):
        if self.order not in (0, 1):
            raise ParameterError(f"order must be 0 or 1, got {self.order}")
        if not 0 <= self.gamma < 1:
            raise ParameterError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.component not in (1, 2, 3):
            raise ParameterError(f"component must be 1, 2 or 3, got {self.component}")
        if int(self.fine_factor) != self.fine_factor or self.fine_factor < 1:
            raise ParameterError(f"fine_factor must be a positive integer, got {self.fine_factor}")
        _side(self.side)


def clean_field(cfg: GratingConfig, psi: SurfaceProfile, side, j, order=1,
                sol: FirstOrderSolution | None = None) -> ComplexGrid:
    """Noise-free ``E^(0)_j + delta E^(1)_j`` at the measurement plane of ``side``."""
    if psi.grid != cfg.grid:
        raise ParameterError("profile and configuration use different grids")
    z = cfg.plane(side)
    e0 = zeroth_order(cfg, z, side)[j - 1]
    vals = np.full(cfg.grid.shape, e0, dtype=complex)
    if order == 1 and cfg.delta != 0:
        if sol is None:
            sol = solve_first_order(cfg)
        e1 = first_order_field(sol, psi.spectrum(), z, side, j)
        vals = vals + cfg.delta * synthesis(e1).values
    return ComplexGrid(cfg.grid, vals)


def apply_noise(fld: ComplexGrid, gamma, seed) -> ComplexGrid:
    """Multiply each sample by ``1 + gamma * U[-1, 1]``; one real draw per sample.

    Draws come from numpy's PCG64 generator seeded with ``seed`` and are taken
    in row-major order, so output depends only on ``(gamma, seed, shape)``.
    """
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    rand = rng.uniform(-1.0, 1.0, size=fld.grid.shape)
    return ComplexGrid(fld.grid, fld.values * (1.0 + gamma * rand))


def synthesize_data(cfg: GratingConfig, psi: SurfaceProfile, spec: SynthesisSpec) -> ComplexGrid:
    """Synthetic near-field data for one component at the plane selected by ``spec.side``."""
    f = int(spec.fine_factor)
    if f > 1:
        fine_cfg = cfg.replace(grid=cfg.grid.refined(f))
        fine_psi = sample_profile(psi, fine_cfg.grid)
        clean = downsample(clean_field(fine_cfg, fine_psi, spec.side, spec.component, spec.order), f)
    else:
        clean = clean_field(cfg, psi, spec.side, spec.component, spec.order)
    if spec.gamma == 0:
        return clean
    return apply_noise(clean, spec.gamma, spec.seed)
