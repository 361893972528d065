"""Instanton calculus for one-dimensional potentials with non-equivalent minima."""
from .errors import (
    EnumerationTooLarge,
    FitDegenerate,
    FitUnstable,
    InstantonError,
    NonAdjacentWells,
    Nonconvergence,
    OverflowUnrepresentable,
    QuadratureFailure,
    ResolutionWarning,
    ToleranceNotMet,
    UnconvergedBoundary,
)
from .potentials import Equivalence, Family, PotentialModel, WellInfo
from .instanton import (
    InstantonProfile,
    Transform,
    ZeroMode,
    asymptotic_constants,
    closed_form_instanton,
    numeric_instanton,
    transform,
    zero_mode,
)
from .fluctuations import (
    DeterminantReport,
    LogScaled,
    StabilityOperator,
    determinant_report,
    gy_terminal,
    gy_terminal_zero_mode,
    harmonic_propagator,
    lowest_eigenvalue_analytic,
    lowest_eigenvalue_numeric,
    reference_terminal,
    second_solution,
)
from .dilute_gas import (
    DiluteGasSpectrum,
    count_configurations,
    extract_energies,
    instanton_density,
    predicted_spectrum,
    transition_amplitude,
)
from .spectral_oracle import (
    ComparisonTable,
    GridSpec,
    OracleSpectrum,
    Parity,
    compare_report,
    diagonalize,
    stability_eigenproduct_ratio,
)

__version__ = "0.1.0"
