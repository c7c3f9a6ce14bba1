"""
Excitation currents: slow-time ramps, envelope profiles, doublet currents
and the corrective current of the source form.
"""

from .envolvente import BUMP_INTEGRAL, EnvelopeSpec, bump, cutoff, smooth_step
from .perfiles import BaseProfile, FactoryPerfil, GaussianProfile, SechProfile, SuperGaussianProfile, soliton_amplitude
from .corriente import (
    DoubletExcitation,
    FactoryExcitacion,
    bidirectional_current,
    check_disjoint_cutoffs,
    current_amplitude,
    envelope_source_data,
    linear_response,
    linear_response_full,
    measure_bandwidth,
    window_profile,
    wrap_zone,
)
from .correctiva import corrective_current, corrective_response

__all__ = [
    "BUMP_INTEGRAL",
    "EnvelopeSpec",
    "bump",
    "cutoff",
    "smooth_step",
    "BaseProfile",
    "GaussianProfile",
    "SechProfile",
    "SuperGaussianProfile",
    "FactoryPerfil",
    "soliton_amplitude",
    "DoubletExcitation",
    "FactoryExcitacion",
    "current_amplitude",
    "linear_response",
    "linear_response_full",
    "window_profile",
    "bidirectional_current",
    "check_disjoint_cutoffs",
    "envelope_source_data",
    "measure_bandwidth",
    "wrap_zone",
    "corrective_current",
    "corrective_response",
]
