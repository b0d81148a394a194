"""Strong-perturbation series for quantum dynamics.

The dominant perturbation V generates an adiabatic leading order; the
unperturbed Hamiltonian H0 enters through a Dyson-type series in
U^dagger H0 U. Level shifts <n|H0|n> cause secular growth of the series
terms and can be resummed into the leading order.
"""

__version__ = "0.1.0"

from .adiabatic import SpectralPath, adiabatic_propagator, track_spectral_path, validity_ratio
from .core import (
    EigenSystem,
    bessel_j,
    bessel_j_table,
    expi_action,
    hermitian_eigendecompose,
)
from .dyson import (
    ConjugatedH0Sample,
    SeriesState,
    conjugated_h0,
    series_corrections,
    time_ordering_equivalence_check,
)
from .errors import (
    ConfigError,
    DegeneracyError,
    LevelMatchingError,
    NotHermitianError,
    NumericalError,
    StrongPertError,
    TruncationError,
)
from .oracle import Trajectory, evolve_exact, rabi_closed_form
from .secular import GrowthFit, fit_term_growth, secularity_report

__all__ = [
    "ConfigError",
    "ConjugatedH0Sample",
    "DegeneracyError",
    "EigenSystem",
    "GrowthFit",
    "LevelMatchingError",
    "NotHermitianError",
    "NumericalError",
    "SeriesState",
    "SpectralPath",
    "StrongPertError",
    "Trajectory",
    "TruncationError",
    "adiabatic_propagator",
    "bessel_j",
    "bessel_j_table",
    "conjugated_h0",
    "evolve_exact",
    "expi_action",
    "fit_term_growth",
    "hermitian_eigendecompose",
    "rabi_closed_form",
    "secularity_report",
    "series_corrections",
    "time_ordering_equivalence_check",
    "track_spectral_path",
    "validity_ratio",
]
