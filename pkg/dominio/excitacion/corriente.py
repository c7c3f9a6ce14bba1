"""
Almost single-mode excitation currents and the linear response they create.

A doublet excitation drives the two modes (+, n0, k_star) and (-, n0, -k_star)
with slow amplitudes

    j_s(k, tau) = -rho * psi0(tau) * Psi0(eta) * h_hat_s(Y_s^{-1}(eta) / beta) / beta,

where eta = k - s k_star. The modal coefficient of the current is
exp(-i s omega_{n0}(k) t) j_s(k, rho t); the linear response is its
integral, u0 = -(1/rho) * integral of j over slow time.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import PreconditionException, ValidationException
from dominio.modelo.dispersion import DispersionModel
from dominio.rectificacion.rectificador import RectifyMap

from .envolvente import EnvelopeSpec, cutoff
from .perfiles import BaseProfile, FactoryPerfil

logger = get_logger(__name__)

RADIO_CORTE = 0.1
FRACCION_ENERGIA = 0.99


def wrap_zone(k: Any) -> np.ndarray:
    """Fold quasimomenta into [-pi, pi)."""
    k = np.asarray(k, dtype=float)
    return np.mod(k + np.pi, 2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class DoubletExcitation:
    """
    Excitation of one doublet.

    Attributes:
        profile: Envelope profile h_plus and its transform.
        envelope: Slow-time ramp psi0 / psi.
        k_star: Carrier quasimomentum of the positive-frequency member.
        n0: Band number.
        alpha: Nonlinearity strength.
        beta: Quasimomentum spread.
        rho: Inverse pulse duration (slow time tau = rho t).
        pi0: Cutoff radius, shared with the rectifying map.
    """

    profile: BaseProfile
    envelope: EnvelopeSpec = field(default_factory=EnvelopeSpec)
    k_star: float = np.pi / 3.0
    n0: int = 1
    alpha: float = 0.0
    beta: float = 0.05
    rho: float = 0.0025
    pi0: float = RADIO_CORTE

    def __post_init__(self) -> None:
        for name in ("beta", "rho", "pi0"):
            if getattr(self, name) <= 0.0:
                raise ValidationException(field=f"excitation.{name}", value=getattr(self, name), rule=f"{name} > 0")
        if self.alpha < 0.0:
            raise ValidationException(field="excitation.alpha", value=self.alpha, rule="alpha >= 0")

    @property
    def theta(self) -> float:
        """Inverse dispersion parameter rho / beta**2."""
        return self.rho / self.beta**2

    def h_hat(self, sign: int, q: Any) -> np.ndarray:
        return self.profile.signed_h_hat(sign, q)

    def initial_data(self, sign: int, x: Any) -> np.ndarray:
        """Envelope initial data h_s(beta x)."""
        return self.profile.signed_h(sign, self.beta * np.asarray(x, dtype=float))

    def center(self, sign: int) -> float:
        return sign * self.k_star

    def with_scales(self, **changes: float) -> "DoubletExcitation":
        values = {
            "profile": self.profile, "envelope": self.envelope, "k_star": self.k_star, "n0": self.n0,
            "alpha": self.alpha, "beta": self.beta, "rho": self.rho, "pi0": self.pi0,
        }
        values.update(changes)
        return DoubletExcitation(**values)

    def describe(self) -> Dict[str, Any]:
        return {
            "h": self.profile.describe(),
            "psi0": self.envelope.describe(),
            "k_star": self.k_star,
            "n0": self.n0,
            "alpha": self.alpha,
            "beta": self.beta,
            "rho": self.rho,
            "pi0": self.pi0,
        }


def _check_window(exc: DoubletExcitation, rect: RectifyMap) -> None:
    if rect.domain_radius + 1e-15 < exc.pi0:
        raise PreconditionException(
            operation="excitation", invariant="rectifying domain covers the cutoff radius pi0",
            context={"pi0": exc.pi0, "domain_radius": rect.domain_radius},
        )
    if abs(rect.jet.k_star - exc.k_star) > 1e-12 or rect.jet.n0 != exc.n0:
        raise PreconditionException(
            operation="excitation", invariant="rectifying map built at the excitation carrier (n0, k_star)",
            context={"k_star": exc.k_star, "jet_k_star": rect.jet.k_star},
        )


def window_profile(exc: DoubletExcitation, rect: RectifyMap, sign: int, k: Any) -> np.ndarray:
    """Psi0(eta) * h_hat_s(Y_s^{-1}(eta) / beta) / beta, zero for |eta| >= pi0."""
    _check_window(exc, rect)
    k = np.asarray(k, dtype=float)
    eta = wrap_zone(k - sign * exc.k_star)
    values = np.zeros(eta.shape, dtype=complex)
    inside = np.abs(eta) < exc.pi0
    if inside.any():
        xi = rect.signed_inverse(sign, eta[inside])
        values[inside] = cutoff(eta[inside], exc.pi0) * exc.h_hat(sign, xi / exc.beta) / exc.beta
    return values


def current_amplitude(exc: DoubletExcitation, rect: RectifyMap, sign: int, k: Any, tau: float) -> np.ndarray:
    """Slow current amplitude j_s(k, tau); zero outside [0, tau0]."""
    ramp = float(exc.envelope.psi0(tau))
    if ramp == 0.0:
        return np.zeros(np.shape(k), dtype=complex)
    return -exc.rho * ramp * window_profile(exc, rect, sign, k)


def linear_response(exc: DoubletExcitation, rect: RectifyMap, sign: int, k: Any, tau: float) -> np.ndarray:
    """Slow linear response u0 = psi(tau) * Psi0 * h_hat_s(Y_s^{-1}/beta) / beta."""
    return float(exc.envelope.psi(tau)) * window_profile(exc, rect, sign, k)


def linear_response_full(
    exc: DoubletExcitation,
    rect: RectifyMap,
    model: DispersionModel,
    sign: int,
    k: Any,
    t: float,
) -> np.ndarray:
    """Modal coefficient exp(-i s omega_{n0}(k) t) u0(k, rho t)."""
    k = np.asarray(k, dtype=float)
    phase = np.exp(-1j * sign * model.omega(exc.n0, k) * t)
    return phase * linear_response(exc, rect, sign, k, exc.rho * t)


def check_disjoint_cutoffs(k_star: float, pi0_plus: float, pi0_minus: float) -> None:
    """Reject doublet pairs at +-k_star whose cutoff windows overlap."""
    separation = min(2.0 * abs(k_star), 2.0 * np.pi - 2.0 * abs(k_star))
    if pi0_plus + pi0_minus > separation:
        raise PreconditionException(
            operation="bidirectional_current",
            invariant="cutoff windows around +k_star and -k_star are disjoint (pi0 too large for |k_star|)",
            context={"k_star": k_star, "pi0_plus": pi0_plus, "pi0_minus": pi0_minus, "separation": separation},
        )


def bidirectional_current(
    exc_plus: DoubletExcitation,
    exc_minus: DoubletExcitation,
    rect_plus: RectifyMap,
    rect_minus: RectifyMap,
    sign: int,
    k: Any,
    tau: float,
) -> np.ndarray:
    """
    Current of the quadruplet: the doublet at k_star plus the doublet at -k_star.

    ``exc_minus`` is the excitation whose positive-frequency member sits at
    -k_star; ``rect_minus`` is its rectifying map.
    """
    if abs(exc_minus.k_star + exc_plus.k_star) > 1e-12:
        raise PreconditionException(
            operation="bidirectional_current", invariant="second doublet centred at -k_star",
            context={"k_star_plus": exc_plus.k_star, "k_star_minus": exc_minus.k_star},
        )
    check_disjoint_cutoffs(exc_plus.k_star, exc_plus.pi0, exc_minus.pi0)
    return current_amplitude(exc_plus, rect_plus, sign, k, tau) + current_amplitude(
        exc_minus, rect_minus, sign, k, tau
    )


def envelope_source_data(exc: DoubletExcitation, rect: RectifyMap, sign: int, xi: Any) -> np.ndarray:
    """
    Envelope Fourier data H_s(xi) = Psi0(Y_s(xi)) * h_hat_s(xi / beta) / beta.

    It is the envelope-side image of the modal window, so a sourced envelope
    run and the modal reference see the same excitation. Zero for |xi| > pi0.
    """
    _check_window(exc, rect)
    xi = np.asarray(xi, dtype=float)
    values = np.zeros(xi.shape, dtype=complex)
    inside = np.abs(xi) <= exc.pi0
    if inside.any():
        eta = rect.signed_forward(sign, xi[inside])
        values[inside] = cutoff(eta, exc.pi0) * exc.h_hat(sign, xi[inside] / exc.beta) / exc.beta
    return values


def measure_bandwidth(
    envelope: EnvelopeSpec,
    rho: float,
    omega0: float = 0.0,
    fraction: float = FRACCION_ENERGIA,
    n_samples: int = 2048,
    padding: int = 16,
    span: float = 4.0,
) -> Dict[str, float]:
    """
    Half-width of the band holding ``fraction`` of the energy of a ramped carrier.

    The signal is a(t) = exp(-i omega0 t) psi(rho t) psi(T - rho t) on
    rho t in [0, T], T = span * tau0, so that it is compactly supported.

    Returns:
        ``{"rho", "halfwidth", "C"}`` with halfwidth <= C * rho.
    """
    total_tau = span * envelope.tau0
    tau = np.linspace(0.0, total_tau, n_samples, endpoint=False)
    dt = (tau[1] - tau[0]) / rho
    t = tau / rho
    signal = np.exp(-1j * omega0 * t) * envelope.psi(tau) * envelope.psi(total_tau - tau)
    spectrum = np.fft.fft(signal, n=padding * n_samples)
    omega = 2.0 * np.pi * np.fft.fftfreq(padding * n_samples, d=dt)
    energy = np.abs(spectrum) ** 2
    order = np.argsort(np.abs(omega + omega0))
    cumulative = np.cumsum(energy[order]) / np.sum(energy)
    index = int(np.searchsorted(cumulative, fraction))
    halfwidth = float(np.abs(omega + omega0)[order][min(index, order.size - 1)])
    logger.debug("Ancho de banda medido", extra={"rho": rho, "halfwidth": halfwidth})
    return {"rho": rho, "halfwidth": halfwidth, "C": halfwidth / rho}


class FactoryExcitacion:
    """Builds a doublet excitation from the ``excitation`` configuration block."""

    @staticmethod
    def obtener_excitacion(
        spec: Mapping[str, Any],
        alpha: Optional[float] = None,
        beta: Optional[float] = None,
        rho: Optional[float] = None,
    ) -> DoubletExcitation:
        return DoubletExcitation(
            profile=FactoryPerfil.obtener_perfil(spec.get("h")),
            envelope=EnvelopeSpec(tau0=float(spec.get("tau0", 0.1))),
            k_star=float(spec.get("k_star", np.pi / 3.0)),
            n0=int(spec.get("n0", 1)),
            alpha=float(alpha if alpha is not None else spec.get("alpha", 0.0)),
            beta=float(beta if beta is not None else spec.get("beta", 0.05)),
            rho=float(rho if rho is not None else spec.get("rho", 0.0025)),
            pi0=float(spec.get("pi0", RADIO_CORTE)),
        )
