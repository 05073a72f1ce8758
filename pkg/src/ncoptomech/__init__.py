"""Noncommutative phase-space probe with a pulsed opto-mechanical loop.

Submodules: ``units`` (parameters and conversions), ``fock`` (truncated
operators), ``loop`` (brute-force loop operator and photon-sum oracle),
``phase`` (closed-form observables), ``feasibility`` (sensitivity and sweeps)
and ``cli``.
"""

from .exceptions import (
    ConfigError,
    DomainError,
    LoopClosureError,
    OracleInfeasibleError,
    RangeWarning,
    SensitivityUnreachable,
    ToleranceError,
    TruncationError,
)
from .feasibility import (
    PRESETS,
    FeasibilityReport,
    Scenario,
    SweepGrid,
    detectable_theta_omega,
    snr,
    sweep,
    write_csv,
)
from .fock import FockSpec, OperatorMatrix, commutator_residuals, deformed_quadratures, unitary_from_generator
from .loop import LoopBuilder, extract_loop_phase, loop_unitary, mean_field_photon_sum, predicted_loop_phase
from .phase import gamma_from_experiment, mean_field_deformed, mean_field_qm, theta_magnitude, theta_phase
from .units import (
    CODATA2018,
    CavityParams,
    DeformationParams,
    MechanicalParams,
    PulseSequence,
    effective_interaction_length,
    minimal_length_in_planck_units,
    validate,
)

__version__ = "0.1.0"
