"""
Integrands of the self-interaction of a doublet and of non-FM quadruplets.
"""

from typing import Any, Dict

import numpy as np
import sympy

from dominio.enls.coeficientes import EnlsCoefficients
from dominio.exceptions import PreconditionException
from dominio.excitacion.corriente import DoubletExcitation
from dominio.modelo.dispersion import DispersionModel

from .cuadratura import InteractionIntegrand
from .cuadrupletes import Quadruplet
from .fase import Q1, Q2, ScaledPhase

_T = sympy.Symbol("t", real=True)


def _complex(value: complex) -> sympy.Expr:
    return sympy.Float(value.real) + sympy.I * sympy.Float(value.imag)


def amplitude_polynomial(coeffs: EnlsCoefficients, sign: int, sigma: int) -> Dict[tuple, complex]:
    """Monomials of p_s truncated at total degree ``sigma``."""
    if sigma > coeffs.sigma:
        raise PreconditionException(
            operation="rectified_integral",
            invariant="susceptibility Taylor data available to order sigma",
            context={"sigma": sigma, "available": coeffs.sigma},
        )
    return {m: c for m, c in coeffs.amplitudes[sign].items() if sum(m) <= sigma}


def fm_integrand(
    coeffs: EnlsCoefficients,
    exc: DoubletExcitation,
    sigma: int = 0,
    sign: int = 1,
    q: float = 0.0,
) -> InteractionIntegrand:
    """
    Integrand of the rectified FM integral of the member ``sign``.

    Phase: scaled polynomial phase. Amplitude:
    p_s(beta q', beta q'', beta q''') h_s(q') h_s(q'') h_-s(q''').

    Raises:
        PreconditionException: sigma above nu - 2 or above the available
            Taylor order of the susceptibility.
    """
    if sigma > max(coeffs.nu - 2, 0):
        raise PreconditionException(operation="rectified_integral", invariant="sigma <= nu - 2")
    poly = amplitude_polynomial(coeffs, sign, sigma)
    phase = ScaledPhase(gammas=coeffs.gammas, beta=exc.beta, sign=sign, q=q)
    beta = exc.beta
    meta: Dict[str, Any] = {"sigma": sigma, "sign": sign, "q": q, "beta": beta, "nu": coeffs.nu}

    profile = exc.profile
    h_same = profile.symbolic_signed_h_hat(sign, _T)
    h_mirror = profile.symbolic_signed_h_hat(-sign, _T)
    if h_same is not None and h_mirror is not None:
        q3 = q - Q1 - Q2
        b = sympy.Float(beta)
        p = sum(
            (_complex(c) * (b * Q1) ** m[0] * (b * Q2) ** m[1] * (b * q3) ** m[2] for m, c in poly.items()),
            sympy.Integer(0),
        )
        amplitude = p * h_same.subs(_T, Q1) * h_same.subs(_T, Q2) * h_mirror.subs(_T, q3)
        integrand = InteractionIntegrand.from_sympy(
            phase.symbolic(), amplitude, center=(q, q), label="fm", metadata=meta
        )
        return integrand

    def numeric_amplitude(q1: Any, q2: Any) -> np.ndarray:
        q1 = np.asarray(q1, dtype=float)
        q2 = np.asarray(q2, dtype=float)
        q3 = q - q1 - q2
        p = np.zeros(np.broadcast(q1, q2).shape, dtype=complex)
        for m, c in poly.items():
            p = p + c * (beta * q1) ** m[0] * (beta * q2) ** m[1] * (beta * q3) ** m[2]
        return p * exc.h_hat(sign, q1) * exc.h_hat(sign, q2) * exc.h_hat(-sign, q3)

    return InteractionIntegrand(
        phase=lambda a, b: np.asarray(phase(a, b), dtype=float),
        amplitude=numeric_amplitude,
        center=(q, q),
        label="fm",
        metadata=meta,
    )


def nonfm_integrand(
    model: DispersionModel,
    quad: Quadruplet,
    exc: DoubletExcitation,
    q: float = 0.0,
) -> InteractionIntegrand:
    """
    Integrand of a quadruplet around its nominal quasimomenta.

    Origins sit at k_i + beta q_i with q''' = q - q' - q'', the end at
    k + beta q. The phase is the unscaled mismatch phi, so the oscillation
    parameter of this integrand is tau / rho.
    """
    beta = exc.beta
    signs, bands = quad.signs, quad.bands
    centers = (quad.end.k,) + tuple(m.k for m in quad.origins)

    def offsets(q1: Any, q2: Any):
        q1 = np.asarray(q1, dtype=float)
        q2 = np.asarray(q2, dtype=float)
        shape = np.broadcast(q1, q2).shape
        return (np.full(shape, q), np.broadcast_to(q1, shape), np.broadcast_to(q2, shape), q - q1 - q2)

    def ks(q1: Any, q2: Any):
        return tuple(c + beta * o for c, o in zip(centers, offsets(q1, q2)))

    def phase(q1: Any, q2: Any) -> np.ndarray:
        k = ks(q1, q2)
        total = model.signed_omega(signs[0], bands[0], k[0])
        for s, n, kk in zip(signs[1:], bands[1:], k[1:]):
            total = total - model.signed_omega(s, n, kk)
        return np.asarray(total, dtype=float)

    def amplitude(q1: Any, q2: Any) -> np.ndarray:
        k = ks(q1, q2)
        o = offsets(q1, q2)
        value = np.asarray(model.mode_overlap(signs, bands, k), dtype=complex)
        for s, off in zip(signs[1:], o[1:]):
            value = value * exc.h_hat(s, off)
        return value

    return InteractionIntegrand(
        phase=phase,
        amplitude=amplitude,
        center=(0.0, 0.0),
        label="nonfm",
        metadata={"quadruplet": quad.describe(), "beta": beta, "q": q},
    )


__all__ = ["fm_integrand", "nonfm_integrand", "amplitude_polynomial"]
