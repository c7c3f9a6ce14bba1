"""
Envelope equations: coefficient extraction, split-step integration,
bidirectional coupling, source form, reduced scalings and the first
nonlinear response.
"""

from .bidireccional import BidirectionalSolver, integrate_bidirectional
from .coeficientes import ALPHA_UNIDAD, EnlsCoefficients, alpha_pi, extract_coeffs, monomials, nls_coefficients
from .escalas import ReducedEquation, Term, integrate_transport, reduce_scaling, rescale, rescale_coefficients, unscale
from .estado import FRAMES, EnvelopeGrid, EnvelopeState, Snapshot, frame_phase, initial_state
from .fuente import SourcedRun, to_source_form
from .integrador import EnvelopeSolver, LinearRampSource, OrderSpec, integrate_enls, rational_form_residual
from .respuesta import FirstNonlinearResponse

__all__ = [
    "ALPHA_UNIDAD",
    "EnlsCoefficients",
    "alpha_pi",
    "extract_coeffs",
    "monomials",
    "nls_coefficients",
    "FRAMES",
    "EnvelopeGrid",
    "EnvelopeState",
    "Snapshot",
    "frame_phase",
    "initial_state",
    "OrderSpec",
    "EnvelopeSolver",
    "LinearRampSource",
    "integrate_enls",
    "rational_form_residual",
    "BidirectionalSolver",
    "integrate_bidirectional",
    "SourcedRun",
    "to_source_form",
    "Term",
    "ReducedEquation",
    "reduce_scaling",
    "integrate_transport",
    "rescale_coefficients",
    "rescale",
    "unscale",
    "FirstNonlinearResponse",
]
