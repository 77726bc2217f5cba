"""Simulation and security analysis of spatially entangled photon-pair QKD.

The package models parametric down-conversion pairs entangled in their
transverse degrees of freedom, the information shared through position
and momentum measurements on pixelated detector arrays, dark-count and
loss effects on the conditional-variance entanglement witness, and the
information balance against a partial intercept-resend eavesdropper,
both in closed form and by pulse-level Monte Carlo.
"""

__version__ = "0.1.0"

from .adversary import (AttackParams, LogNegativityReport, SecurityCurve,
                        SecurityPoint, attacked_pixel_joint, delta_i_min,
                        lambda_max, log_negativity, negativity_curve,
                        security_curve)
from .detection import (ChannelParams, DetectorArrayParams,
                        EventProbabilities, PixelJointDistribution,
                        ThresholdScanResult, bin_distribution,
                        bin_source_distribution, event_probabilities,
                        noisy_pixel_joint, witness_threshold_scan)
from .errors import (ConfigurationError, CoverageError, GridResolutionError,
                     NoAcceptedEventsError, NormalizationError,
                     NumericalModelError, ResolutionBudgetError)
from .infotheory import (KeyRateReport, WitnessReport, conditional_variance,
                         cross_basis_mutual_information,
                         cross_basis_mutual_information_source,
                         differential_entropy, discrete_mutual_information,
                         keyrate_lower_bound, keyrate_lower_bound_source,
                         mutual_information, pure_state_witness)
from .montecarlo import (SimConfig, SimulationResult, estimate_statistics,
                         hiding_report, simulate_pulses)
from .pdc_model import (Grid1D, JointAmplitude, JointDistribution,
                        SchmidtDecomposition, SourceParams, auto_grid,
                        basis_mutual_information, build_amplitude,
                        degenerate_wavenumber, schmidt_decompose,
                        schmidt_decompose_separable, to_distribution,
                        to_position_basis, transverse_entropies,
                        waist_from_fwhm)

__all__ = [
    "__version__",
    "AttackParams", "LogNegativityReport", "SecurityCurve", "SecurityPoint",
    "attacked_pixel_joint", "delta_i_min", "lambda_max", "log_negativity",
    "negativity_curve", "security_curve",
    "ChannelParams", "DetectorArrayParams", "EventProbabilities",
    "PixelJointDistribution", "ThresholdScanResult", "bin_distribution",
    "bin_source_distribution", "event_probabilities", "noisy_pixel_joint",
    "witness_threshold_scan",
    "ConfigurationError", "CoverageError", "GridResolutionError",
    "NoAcceptedEventsError", "NormalizationError", "NumericalModelError",
    "ResolutionBudgetError",
    "KeyRateReport", "WitnessReport", "conditional_variance",
    "cross_basis_mutual_information", "cross_basis_mutual_information_source",
    "differential_entropy", "discrete_mutual_information",
    "keyrate_lower_bound", "keyrate_lower_bound_source", "mutual_information",
    "pure_state_witness",
    "SimConfig", "SimulationResult", "estimate_statistics", "hiding_report",
    "simulate_pulses",
    "Grid1D", "JointAmplitude", "JointDistribution", "SchmidtDecomposition",
    "SourceParams", "auto_grid", "basis_mutual_information",
    "build_amplitude", "degenerate_wavenumber", "schmidt_decompose",
    "schmidt_decompose_separable", "to_distribution", "to_position_basis",
    "transverse_entropies", "waist_from_fwhm",
]
