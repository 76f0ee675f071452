"""Regularised FFT reconstruction of the surface from one field component.

The linearised data model gives, mode by mode,

    phi_n = [E_n - E^(0)_n] exp(-/+ i beta_n z) / C_jn,

and a hard spectral cut-off ``|alpha_n| <= omega`` keeps the exponential
back-propagation of evanescent modes below the signal-to-noise ratio.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, UnrecoverableComponentError
from .forward import FirstOrderSolution, solve_first_order
from .kernels import backpropagate
from .physics import GratingConfig, ModeBasis, _side, zeroth_order
from .spectral import ComplexGrid, SpectralGrid, analysis, synthesis

__all__ = [
    "ReconParams",
    "ReconResult",
    "snr",
    "cutoff",
    "characteristic_filter",
    "reconstruct",
    "relative_l2_error",
]


def snr(delta, gamma):
    """``min(delta**-2, 1/gamma)``; ``delta`` is dimensionless (wavelength units)."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    return min(delta**-2, np.inf if gamma == 0 else 1.0 / gamma)


def cutoff(z_abs, kappa, snr_value):
    """Cut-off frequency with ``exp(|z| sqrt(omega^2 - kappa^2)) = SNR``.

    >>> round(cutoff(0.2, np.pi, 100) / np.pi, 3)
    7.397
    """
    if not z_abs > 0:
        raise ParameterError(f"measurement distance must be positive, got {z_abs}")
    if not snr_value >= 1:
        raise ParameterError(f"SNR must be >= 1, got {snr_value}")
    if np.isinf(snr_value):
        return np.inf
    return kappa * np.sqrt(1.0 + (np.log(snr_value) / (kappa * z_abs)) ** 2)


def characteristic_filter(basis: ModeBasis, omega):
    """Boolean mask, True where ``|alpha_n| <= omega``."""
    return basis.alpha_abs <= omega


@dataclass(frozen=True)
class ReconParams:
    """Inversion settings.

    ``delta`` is the assumed deformation scale in length units; the SNR
    uses ``delta / wavelength``. ``eps_c`` defaults to ``1e-8 * kappa_plus``.
    """

    side: str = "reflection"
    component: int = 1
    delta: float | None = None
    gamma: float = 0.0
    snr_override: float | None = None
    cutoff_override: float | None = None
    eps_c: float | None = None

    def __post_init__(self):
        if _side(self.side) not in ("above", "below"):
            raise ParameterError(f"bad side {self.side!r}")
        if self.component not in (1, 2):
            raise ParameterError(f"component must be 1 or 2, got {self.component}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be non-negative, got {self.gamma}")
        if self.snr_override is None and self.cutoff_override is None:
            if self.delta is None or not self.delta > 0:
                raise ParameterError("delta > 0 is required unless an SNR or cut-off override is set")
        if self.snr_override is not None and not self.snr_override >= 1:
            raise ParameterError(f"snr_override must be >= 1, got {self.snr_override}")
        if self.cutoff_override is not None and not self.cutoff_override >= 0:
            raise ParameterError(f"cutoff_override must be >= 0, got {self.cutoff_override}")


@dataclass(frozen=True)
class ReconResult:
    surface: ComplexGrid
    spectrum: SpectralGrid = field(repr=False)
    omega_used: float = np.inf
    snr_used: float = np.inf
    retained_modes: list = field(default_factory=list, repr=False)
    excluded_modes: dict = field(default_factory=dict, repr=False)
    retained_mask: np.ndarray = field(default=None, repr=False)
    amplification: np.ndarray = field(default=None, repr=False)

    @property
    def estimate(self):
        """Real part of the reconstructed surface; the imaginary part is a diagnostic."""
        return self.surface.values.real

    @property
    def max_amplification(self):
        a = self.amplification[self.retained_mask]
        return float(a.max()) if a.size else 0.0


def reconstruct(data: ComplexGrid, cfg: GratingConfig, params: ReconParams,
                sol: FirstOrderSolution | None = None) -> ReconResult:
    """Recover ``phi = delta * psi`` from near-field data of component ``params.component``."""
    if data.grid != cfg.grid:
        raise ParameterError("data grid does not match configuration grid")
    side = _side(params.side)
    j = params.component
    if sol is None:
        sol = solve_first_order(cfg)
    basis = sol.basis
    z = cfg.plane(side)
    kappa = cfg.kappa(side)

    if params.snr_override is not None:
        snr_used = float(params.snr_override)
    elif params.delta is not None and params.delta > 0:
        snr_used = snr(params.delta / cfg.wavelength, params.gamma)
    else:
        snr_used = np.inf
    if params.cutoff_override is not None:
        omega = float(params.cutoff_override)
    else:
        omega = cutoff(abs(z), kappa, snr_used)

    eps_c = params.eps_c if params.eps_c is not None else 1e-8 * cfg.kappa_plus
    coeff = sol.coefficient(j)
    small_c = sol.guarded & (np.abs(coeff) < eps_c)
    if not np.any(sol.guarded & ~small_c):
        raise UnrecoverableComponentError(
            f"component {j} has |C_jn| < {eps_c:g} on every mode (p = {cfg.polarization})")
    within = characteristic_filter(basis, omega)
    keep = within & sol.guarded & ~small_c

    excluded = {
        "above-cutoff": basis.modes(~within),
        "small-C": basis.modes(within & small_c),
        "resonance-guard": basis.modes(within & ~sol.guarded),
    }

    # subtracting E^(0) before the FFT (it only touches n = 0) keeps the
    # transform's rounding proportional to the scattered part
    data_n = analysis(data - zeroth_order(cfg, z, side)[j - 1]).coeffs
    beta = basis.beta(side)
    sign = 1.0 if side == "above" else -1.0
    phi_n = backpropagate(data_n.ravel(), coeff.ravel(), beta.ravel(), z, sign, keep.ravel())
    phi_n = phi_n.reshape(cfg.grid.shape)
    spec = SpectralGrid(cfg.grid, phi_n)

    # |exp(-/+ i beta z)| = exp(Im(beta) |z|) for both sides
    amp = np.exp(np.minimum(beta.imag * abs(z), 700.0))
    return ReconResult(
        surface=synthesis(spec),
        spectrum=spec,
        omega_used=omega,
        snr_used=snr_used,
        retained_modes=basis.modes(keep),
        excluded_modes=excluded,
        retained_mask=keep,
        amplification=amp,
    )


def relative_l2_error(estimate, truth) -> float:
    """``||truth - estimate|| / ||truth||`` in the cell-area weighted discrete L2 norm.

    Accepts :class:`ComplexGrid` or plain arrays on the same grid.
    """
    if isinstance(estimate, ComplexGrid) and isinstance(truth, ComplexGrid):
        if estimate.grid != truth.grid:
            raise ParameterError("estimate and truth live on different grids")
        w = truth.grid.cell_area
    else:
        w = 1.0
    est = estimate.values if isinstance(estimate, ComplexGrid) else np.asarray(estimate)
    tru = truth.values if isinstance(truth, ComplexGrid) else np.asarray(truth)
    if est.shape != tru.shape:
        raise ParameterError("estimate and truth have different shapes")
    norm = np.sqrt(w * np.sum(np.abs(tru) ** 2))
    if norm == 0:
        raise ParameterError("relative error undefined for a zero truth")
    return float(np.sqrt(w * np.sum(np.abs(tru - est) ** 2)) / norm)
