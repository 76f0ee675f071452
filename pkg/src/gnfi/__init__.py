"""Near-field imaging of biperiodic dielectric gratings.

Forward model: transformed field expansion through first order in the
surface deformation. Inverse: explicit FFT reconstruction with a spectral
cut-off, from reflection-side or transmission-side data.
"""
from ._accel import USE_NUMBA
from .errors import (
    ConfigError,
    DumpFormatError,
    GratingError,
    InvalidFieldError,
    ParameterError,
    ResonanceError,
    SmallDivisorError,
    UnrecoverableComponentError,
)
from .forward import (
    FirstOrderSolution,
    SynthesisSpec,
    apply_noise,
    c_coeff,
    first_order_field,
    solve_first_order,
    synthesize_data,
    third_coeffs,
)
from .inverse import (
    ReconParams,
    ReconResult,
    characteristic_filter,
    cutoff,
    reconstruct,
    relative_l2_error,
    snr,
)
from .physics import (
    FresnelPair,
    GratingConfig,
    ModeBasis,
    fresnel,
    incident_trace,
    mode_basis,
    zeroth_order,
)
from .spectral import (
    ComplexGrid,
    PeriodicGrid,
    SpectralGrid,
    SurfaceProfile,
    analysis,
    profile_example1,
    profile_example2,
    synthesis,
    tabulated_profile,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexGrid",
    "ConfigError",
    "DumpFormatError",
    "FirstOrderSolution",
    "FresnelPair",
    "GratingConfig",
    "GratingError",
    "InvalidFieldError",
    "ModeBasis",
    "ParameterError",
    "PeriodicGrid",
    "ReconParams",
    "ReconResult",
    "ResonanceError",
    "SmallDivisorError",
    "SpectralGrid",
    "SurfaceProfile",
    "SynthesisSpec",
    "USE_NUMBA",
    "UnrecoverableComponentError",
    "analysis",
    "apply_noise",
    "c_coeff",
    "characteristic_filter",
    "cutoff",
    "first_order_field",
    "fresnel",
    "incident_trace",
    "mode_basis",
    "profile_example1",
    "profile_example2",
    "reconstruct",
    "relative_l2_error",
    "snr",
    "solve_first_order",
    "synthesis",
    "synthesize_data",
    "tabulated_profile",
    "third_coeffs",
    "zeroth_order",
]
