"""
Lattice envelope equation: trigonometric symbols, difference operators,
integrator and lattice Fourier transform.
"""

from .integrador import (
    LatticeSpectrum,
    LatticeState,
    integrate_lattice_nls,
    lattice_fourier,
    lattice_state,
    profile_state,
)
from .simbolos import (
    SIMBOLOS,
    apply_gamma2,
    apply_symbol,
    delta_minus,
    delta_plus,
    lattice_symbol,
    shift,
    signed_lattice_symbol,
)

__all__ = [
    "SIMBOLOS",
    "lattice_symbol",
    "signed_lattice_symbol",
    "shift",
    "delta_minus",
    "delta_plus",
    "apply_gamma2",
    "apply_symbol",
    "LatticeState",
    "lattice_state",
    "profile_state",
    "integrate_lattice_nls",
    "LatticeSpectrum",
    "lattice_fourier",
]
