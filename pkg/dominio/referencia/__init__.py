"""
Modal reference solution, approximate solution assembly, error norms and
space-domain reconstruction.
"""

from .aproximacion import ApproxSolution, ErrorNorms, assemble_uz, error_norm, quasi_static_response
from .espacio import (
    BaseModes,
    ConstantModes,
    FactoryModos,
    HillModes,
    SpaceField,
    SurrogateModes,
    reconstruct_space,
)
from .modal import (
    ModalField,
    ModalSystem,
    Mode,
    default_modes,
    from_sites,
    integrate_modal_nlm,
    matched_source_data,
    modal_fnlr,
    reference_grid,
    to_sites,
)

__all__ = [
    "Mode",
    "ModalField",
    "ModalSystem",
    "default_modes",
    "reference_grid",
    "matched_source_data",
    "integrate_modal_nlm",
    "modal_fnlr",
    "to_sites",
    "from_sites",
    "ApproxSolution",
    "assemble_uz",
    "quasi_static_response",
    "ErrorNorms",
    "error_norm",
    "BaseModes",
    "ConstantModes",
    "SurrogateModes",
    "HillModes",
    "FactoryModos",
    "SpaceField",
    "reconstruct_space",
]
