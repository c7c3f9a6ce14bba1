"""
Dispersion models: band structures, modal susceptibilities, causal kernels
and Taylor jets.
"""

from .dispersion import DispersionModel, FactoryDispersion, SyntheticBand, make_synthetic
from .hill import HillOverlapSusceptibility, HillSolver, hill_bands
from .jet import GenericityReport, TaylorJet, check_generic, jet_at
from .nucleos import ExponentialKernel, FactoryKernel, InstantaneousKernel, TabulatedKernel
from .susceptibilidad import (
    FactorySusceptibility,
    SusceptibilityProvider,
    SyntheticSusceptibility,
    constant_susceptibility,
)

__all__ = [
    "DispersionModel",
    "FactoryDispersion",
    "SyntheticBand",
    "make_synthetic",
    "HillSolver",
    "HillOverlapSusceptibility",
    "hill_bands",
    "TaylorJet",
    "GenericityReport",
    "jet_at",
    "check_generic",
    "ExponentialKernel",
    "InstantaneousKernel",
    "TabulatedKernel",
    "FactoryKernel",
    "SusceptibilityProvider",
    "SyntheticSusceptibility",
    "FactorySusceptibility",
    "constant_susceptibility",
]
