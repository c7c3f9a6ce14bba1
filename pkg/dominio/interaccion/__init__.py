"""
Self-interaction of a doublet: quadruplet classification, phases, the
quadrature oracle, its expansions and the time-harmonic susceptibility series.
"""

from .armonicos import HarmonicExpansion, convolution_oracle, harmonic_expand, multi_indices
from .cuadratura import (
    InteractionIntegrand,
    OracleResult,
    SpatialIntegral,
    Support,
    find_support,
    quad_oracle,
    spatial_integral,
)
from .cuadrupletes import (
    CLASIFICACIONES,
    FM,
    NO_FM_OPUESTO,
    NO_FM_TERCER_ARMONICO,
    VIOLA_VELOCIDAD,
    Mode,
    Quadruplet,
    QuadrupletClass,
    classify_quadruplet,
    phase_value,
)
from .expansiones import (
    NonFmEstimate,
    RectifiedIntegral,
    SphmExpansion,
    WeakDispersionResult,
    boundary_terms,
    nonfm_estimate,
    rectified_integral,
    sphm_expand,
    split_time,
    stationary_phase_coefficients,
    weak_dispersion_expand,
)
from .fase import CriticalPointReport, PhaseEvaluation, ScaledPhase, critical_point, phase_evaluation
from .integrandos import amplitude_polynomial, fm_integrand, nonfm_integrand

__all__ = [
    "FM",
    "NO_FM_OPUESTO",
    "NO_FM_TERCER_ARMONICO",
    "VIOLA_VELOCIDAD",
    "CLASIFICACIONES",
    "Mode",
    "Quadruplet",
    "QuadrupletClass",
    "classify_quadruplet",
    "phase_value",
    "ScaledPhase",
    "PhaseEvaluation",
    "phase_evaluation",
    "CriticalPointReport",
    "critical_point",
    "InteractionIntegrand",
    "Support",
    "find_support",
    "SpatialIntegral",
    "spatial_integral",
    "OracleResult",
    "quad_oracle",
    "amplitude_polynomial",
    "fm_integrand",
    "nonfm_integrand",
    "RectifiedIntegral",
    "rectified_integral",
    "stationary_phase_coefficients",
    "SphmExpansion",
    "split_time",
    "sphm_expand",
    "WeakDispersionResult",
    "weak_dispersion_expand",
    "NonFmEstimate",
    "boundary_terms",
    "nonfm_estimate",
    "HarmonicExpansion",
    "multi_indices",
    "harmonic_expand",
    "convolution_oracle",
]
