"""
Corrective current J1 of the envelope source form.

Expanding the source f = -rho psi' Z - alpha_pi (psi - psi**3) p[Z] to first
order in alpha around the linear response gives f = f0 + alpha f1 with

    f1 = -rho psi'(tau) Z1 - (alpha_pi / alpha) (psi - psi**3) p[Z0].

The modal counterpart is read off in rectified coordinates: at quasimomentum
k = s k_star + eta the slow amplitude is the interaction-picture spectrum of
f1 at xi = Y_s^{-1}(eta), multiplied by the cutoff Psi0(eta).
"""

from typing import Any, Optional

import numpy as np

from config.logging_config import get_logger
from dominio.enls.coeficientes import EnlsCoefficients
from dominio.enls.estado import EnvelopeGrid
from dominio.enls.integrador import OrderSpec
from dominio.enls.respuesta import FirstNonlinearResponse
from dominio.rectificacion.rectificador import RectifyMap

from .corriente import DoubletExcitation, envelope_source_data, wrap_zone
from .envolvente import cutoff

logger = get_logger(__name__)

PUNTOS_RESPUESTA = 2048


def corrective_response(
    exc: DoubletExcitation,
    rect: RectifyMap,
    coeffs: EnlsCoefficients,
    n_points: int = PUNTOS_RESPUESTA,
    dt: float = 0.5,
    order: Optional[OrderSpec] = None,
) -> FirstNonlinearResponse:
    """First nonlinear response driven by the envelope data of ``exc``."""
    grid = EnvelopeGrid.for_beta(exc.beta, n_points)
    h_hat = {s: envelope_source_data(exc, rect, s, grid.xi) for s in (1, -1)}
    return FirstNonlinearResponse(coeffs, grid, h_hat, order=order, dt=dt)


def corrective_current(
    exc: DoubletExcitation,
    rect: RectifyMap,
    enls: EnlsCoefficients,
    sign: int,
    k: Any,
    tau: float,
    response: Optional[FirstNonlinearResponse] = None,
) -> np.ndarray:
    """
    alpha-weighted corrective amplitude alpha * j1_s(k, tau).

    Zero when alpha = 0, outside the cutoff window and for tau outside
    (0, tau0), where psi' = 0 and psi = psi**3. Pass ``response`` to reuse
    one first nonlinear response across calls.
    """
    k = np.asarray(k, dtype=float)
    values = np.zeros(k.shape, dtype=complex)
    if exc.alpha == 0.0 or tau <= 0.0 or tau >= exc.envelope.tau0:
        return values
    eta = wrap_zone(k - sign * exc.k_star)
    inside = np.abs(eta) < exc.pi0
    if not inside.any():
        return values
    if response is None:
        response = corrective_response(exc, rect, enls)
    t = tau / exc.rho
    xi = rect.signed_inverse(sign, eta[inside])
    ramp = float(exc.envelope.psi0(tau))
    psi = float(exc.envelope.psi(tau))
    bracket = -exc.rho * ramp * response.spectrum_at(sign, xi, t)
    if psi != psi**3:
        bracket = bracket - (psi - psi**3) * response.forcing_at(sign, xi, t)
    values[inside] = exc.alpha * cutoff(eta[inside], exc.pi0) * bracket
    return values
