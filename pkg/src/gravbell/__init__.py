"""Stochastic weak-field gravitational backgrounds and their consequences.

The package samples random ensembles of transverse-traceless plane-wave
metric perturbations, integrates the geodesic-deviation oscillations
they induce on particle pairs, maps oscillation intervals and actions to
Gaussian probabilities and complex amplitudes with PDE-residual
consistency checks, and evaluates a metric-weighted Bell-type observable
whose analytic bound is sqrt(2).
"""

from .background import (
    MINKOWSKI,
    BackgroundEnsemble,
    GwMode,
    calibrate_action,
    ensemble_from_dict,
    ensemble_residuals,
    ensemble_to_dict,
    evaluate_h,
    gauge_residuals,
    load_ensemble,
    metric_at,
    mode_action,
    plane_wave_residuals,
    polarization_tensor,
    riemann_r1010,
    sample_ensemble,
    save_ensemble,
    spatial_strain,
    total_action,
    transverse_basis,
    validate_ensemble,
    validate_mode,
    wave_vector,
)
from .bell import (
    SQRT2,
    BellSettings,
    BoundCheck,
    CorrelationEstimate,
    PolarizerSetting,
    bell_observable,
    check_bound,
    correlation_analytic,
    correlation_mc,
    cosine_correlator,
    maximize_observable,
)
from .deviation import (
    DeviationState,
    PhaseRecord,
    Trajectory,
    accumulated_phase,
    closed_form_deviation,
    integrate_deviation,
    mode_frequency,
    phase_correlation,
    phase_records,
    write_trajectory_csv,
)
from .errors import (
    CalibrationError,
    GravbellError,
    NormalizationError,
    NumericalError,
    ParameterError,
    StepSizeError,
    UndefinedCorrelationError,
)
from .probability import (
    AxiomReport,
    AxiomTriple,
    ClassicalField,
    Grid1D,
    IntervalModel,
    WaveField,
    action_probability,
    amplitude,
    check_probability_axioms,
    continuity_residual,
    free_particle_classical,
    hamilton_jacobi_residual,
    interval_probability,
    normalize_wavefield,
    plane_wave_field,
    schrodinger_residual,
    weighted_norm,
    write_wavefield_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MINKOWSKI",
    "SQRT2",
    "GwMode",
    "BackgroundEnsemble",
    "DeviationState",
    "Trajectory",
    "PhaseRecord",
    "Grid1D",
    "IntervalModel",
    "WaveField",
    "ClassicalField",
    "AxiomReport",
    "AxiomTriple",
    "PolarizerSetting",
    "BellSettings",
    "CorrelationEstimate",
    "BoundCheck",
    "GravbellError",
    "ParameterError",
    "StepSizeError",
    "CalibrationError",
    "UndefinedCorrelationError",
    "NumericalError",
    "NormalizationError",
    "sample_ensemble",
    "validate_mode",
    "validate_ensemble",
    "transverse_basis",
    "polarization_tensor",
    "wave_vector",
    "plane_wave_residuals",
    "evaluate_h",
    "spatial_strain",
    "metric_at",
    "gauge_residuals",
    "ensemble_residuals",
    "riemann_r1010",
    "mode_action",
    "total_action",
    "calibrate_action",
    "ensemble_to_dict",
    "ensemble_from_dict",
    "save_ensemble",
    "load_ensemble",
    "mode_frequency",
    "integrate_deviation",
    "closed_form_deviation",
    "accumulated_phase",
    "phase_records",
    "phase_correlation",
    "write_trajectory_csv",
    "interval_probability",
    "action_probability",
    "amplitude",
    "plane_wave_field",
    "free_particle_classical",
    "normalize_wavefield",
    "weighted_norm",
    "hamilton_jacobi_residual",
    "continuity_residual",
    "schrodinger_residual",
    "check_probability_axioms",
    "write_wavefield_csv",
    "correlation_analytic",
    "cosine_correlator",
    "correlation_mc",
    "bell_observable",
    "check_bound",
    "maximize_observable",
]
