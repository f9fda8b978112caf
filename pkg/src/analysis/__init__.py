"""
Locally linear sensitivity analysis: Jacobians, gain spectra, filter pair
statistics and sensitivity histograms.
"""

from src.analysis.filters import (
    FilterPair,
    PairReport,
    filter_pair_stats,
    normalized_mean,
    overlap_distribution,
)
from src.analysis.histogram import SensitivityHistogram, draw_direction, sensitivity_histogram
from src.analysis.jacobian import ActiveJacobian, active_jacobian, directional_derivative, pair_gain
from src.analysis.spectrum import (
    Cancellation,
    GainSpectrum,
    RIPReport,
    amplitude_spectrum,
    max_cancellation,
    norm_ratio,
    power_spectrum,
    rip_range,
    svd_gain_spectrum,
)

__all__ = [
    "FilterPair",
    "PairReport",
    "filter_pair_stats",
    "normalized_mean",
    "overlap_distribution",
    "SensitivityHistogram",
    "draw_direction",
    "sensitivity_histogram",
    "ActiveJacobian",
    "active_jacobian",
    "directional_derivative",
    "pair_gain",
    "Cancellation",
    "GainSpectrum",
    "RIPReport",
    "amplitude_spectrum",
    "max_cancellation",
    "norm_ratio",
    "power_spectrum",
    "rip_range",
    "svd_gain_spectrum",
]
