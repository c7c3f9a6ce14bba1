"""
Reduced scalings and scaled variables.

With alpha = rho = beta**varkappa1 a term of absolute size beta**a acting
over the time window 1/rho contributes beta**(a - varkappa1) to the
solution. Terms whose contribution is at least the declared accuracy order
are dropped. gamma0 and gamma1 are removed by the rotating and comoving
frames and never dropped.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import PreconditionException, ValidationException

from .coeficientes import EnlsCoefficients
from .estado import EnvelopeGrid, EnvelopeState
from .integrador import OrderSpec

logger = get_logger(__name__)

EXACTITUD_POR_DEFECTO = 1.0


@dataclass(frozen=True)
class Term:
    """One term of the envelope equation with its absolute order in beta."""

    name: str
    absolute_order: float
    role: str

    def accumulated(self, varkappa1: float) -> float:
        return self.absolute_order - varkappa1

    def to_dict(self, varkappa1: float) -> Dict[str, Any]:
        return {
            "term": self.name,
            "order": self.absolute_order,
            "accumulated_order": self.accumulated(varkappa1),
            "role": self.role,
        }


@dataclass(frozen=True)
class ReducedEquation:
    """
    Terms surviving a scaling at a declared accuracy.

    Attributes:
        varkappa1: Exponent of rho = beta**varkappa1.
        accuracy: Terms with accumulated order >= accuracy are dropped.
        kept: Retained terms.
        dropped: Dropped terms, each tagged with its order.
        kind: transport, nls or enls.
    """

    varkappa1: float
    accuracy: float
    kept: Tuple[Term, ...]
    dropped: Tuple[Term, ...]
    kind: str
    nu: int
    sigma: int
    quintic: bool
    coupling: bool

    def keeps(self, name: str) -> bool:
        return any(t.name == name for t in self.kept)

    @property
    def order_spec(self) -> OrderSpec:
        return OrderSpec(nu=self.nu, sigma=self.sigma, quintic=self.quintic)

    def apply(self, coeffs: EnlsCoefficients) -> EnlsCoefficients:
        """Coefficient set restricted to the kept terms."""
        reduced = coeffs.truncated(nu=self.nu, sigma=self.sigma)
        if not self.coupling:
            reduced = replace(reduced, delta_cross={1: 0j, -1: 0j})
        return reduced

    def to_dict(self) -> Dict[str, Any]:
        return {
            "varkappa1": self.varkappa1,
            "accuracy": self.accuracy,
            "kind": self.kind,
            "nu": self.nu,
            "sigma": self.sigma,
            "quintic": self.quintic,
            "kept": [t.to_dict(self.varkappa1) for t in self.kept],
            "dropped": [t.to_dict(self.varkappa1) for t in self.dropped],
        }


def _terms(varkappa1: float, nu: int) -> List[Term]:
    terms = [Term("gamma0", 0.0, "gauge"), Term("gamma1", 1.0, "frame")]
    terms += [Term(f"gamma{j}", float(j), "dispersion") for j in range(2, nu + 1)]
    terms += [
        Term("Q", varkappa1, "cubic"),
        Term("a1", varkappa1 + 1.0, "susceptibility"),
        Term("p2", varkappa1 + 2.0, "susceptibility"),
        Term("delta5", 2.0 * varkappa1, "quintic"),
        Term("delta_cross", 2.0 * varkappa1, "coupling"),
    ]
    return terms


def reduce_scaling(
    coeffs: EnlsCoefficients,
    scaling: Union[Mapping[str, Any], float],
    accuracy: float = EXACTITUD_POR_DEFECTO,
) -> ReducedEquation:
    """
    Term list of the envelope equation at rho = beta**varkappa1.

    Args:
        coeffs: Coefficient set whose orders bound the available terms.
        scaling: ``{"varkappa1": value}`` or the value itself.
        accuracy: Declared accuracy order.

    Raises:
        ValidationException: varkappa1 not positive.
    """
    varkappa1 = float(scaling["varkappa1"] if isinstance(scaling, Mapping) else scaling)
    if varkappa1 <= 0.0:
        raise ValidationException(field="scaling.varkappa1", value=varkappa1, rule="varkappa1 > 0")
    kept: List[Term] = []
    dropped: List[Term] = []
    for term in _terms(varkappa1, max(coeffs.nu, 4)):
        if term.role in ("gauge", "frame") or term.accumulated(varkappa1) < accuracy:
            kept.append(term)
        else:
            dropped.append(term)
    names = {t.name for t in kept}
    nu = max([1] + [int(t.name[5:]) for t in kept if t.role == "dispersion"])
    nu = min(nu, coeffs.nu)
    sigma = 2 if "p2" in names else 1 if "a1" in names else 0
    sigma = min(sigma, coeffs.sigma)
    kind = "transport" if nu == 1 else "nls" if nu == 2 and sigma == 0 and "delta5" not in names else "enls"
    reduced = ReducedEquation(
        varkappa1=varkappa1,
        accuracy=accuracy,
        kept=tuple(kept),
        dropped=tuple(dropped),
        kind=kind,
        nu=nu,
        sigma=sigma,
        quintic="delta5" in names,
        coupling="delta_cross" in names,
    )
    logger.debug("Escala reducida", extra={"varkappa1": varkappa1, "kind": kind, "dropped": len(dropped)})
    return reduced


def integrate_transport(coeffs: EnlsCoefficients, state: EnvelopeState, t_end: float) -> EnvelopeState:
    """
    Exact solution of the first-order reduced equation (dispersion order 1, cubic term).

    The pointwise cubic flow and the translation by gamma1 t commute: with
    P = Z_+ Z_- one has P(t) = P0 / (1 - c P0 t), c = alpha_pi (Q_+ + Q_-),
    and Z_s(t) = Z_s(0) * (1 - c P0 t)**(-alpha_pi Q_s / c).
    """
    if state.frame != "lab":
        raise PreconditionException(operation="integrate_transport", invariant="state given in the lab frame")
    a = coeffs.alpha_pi
    t = float(t_end) - state.t
    zp, zm = state.z_plus, state.z_minus
    p0 = zp * zm
    c = a * (coeffs.Q_plus + coeffs.Q_minus)
    if abs(c) < 1e-14:
        exponents = {s: a * coeffs.Q(s) * p0 * t for s in (1, -1)}
    else:
        base = 1.0 - c * p0 * t
        if np.any(np.abs(base) < 1e-12):
            raise PreconditionException(
                operation="integrate_transport", invariant="no blow-up of the cubic flow before t_end",
            )
        log_base = np.log(base.astype(complex))
        exponents = {s: -a * coeffs.Q(s) / c * log_base for s in (1, -1)}
    flowed = {1: zp * np.exp(exponents[1]), -1: zm * np.exp(exponents[-1])}
    grid = state.grid
    fields = []
    for sign in (1, -1):
        symbol = coeffs.symbol(sign, grid.xi, 1)
        fields.append(grid.inverse(np.exp(-1j * symbol * t) * grid.fourier(flowed[sign])))
    return replace(state, z_plus=fields[0], z_minus=fields[1], t=float(t_end), snapshots=())


def rescale_coefficients(coeffs: EnlsCoefficients, beta: float, rho: float) -> EnlsCoefficients:
    """
    Coefficients of the equation in y = beta x, tau = rho t.

    gamma_j -> gamma_j beta**j / rho, monomial coefficients c_m -> c_m beta**|m|,
    alpha_pi -> alpha_pi / rho and the quintic-side coefficients -> rho times themselves.
    """
    if beta <= 0.0 or rho <= 0.0:
        raise ValidationException(field="scales", value=(beta, rho), rule="beta > 0 and rho > 0")
    gammas = tuple(g * beta**j / rho for j, g in enumerate(coeffs.gammas))
    amplitudes = {
        s: {m: c * beta ** sum(m) for m, c in amp.items()} for s, amp in coeffs.amplitudes.items()
    }
    return replace(
        coeffs,
        gammas=gammas,
        amplitudes=amplitudes,
        alpha_pi=coeffs.alpha_pi / rho,
        delta1={s: v * rho for s, v in coeffs.delta1.items()},
        delta2={s: v * rho for s, v in coeffs.delta2.items()},
        q5={s: v * rho for s, v in coeffs.q5.items()},
    )


def rescale(
    coeffs: EnlsCoefficients, state: EnvelopeState, beta: float, rho: float
) -> Tuple[EnlsCoefficients, EnvelopeState]:
    """Coefficients and state in the scaled variables (y, tau)."""
    scaled = rescale_coefficients(coeffs, beta, rho)
    grid = EnvelopeGrid(length=beta * state.grid.length, n_points=state.grid.n_points)
    return scaled, replace(state, grid=grid, t=rho * state.t, gammas=scaled.gammas, snapshots=(), diagnostics={})


def unscale(state: EnvelopeState, beta: float, rho: float, gammas: Optional[Tuple[float, ...]] = None) -> EnvelopeState:
    """Inverse of ``rescale`` for a state."""
    grid = EnvelopeGrid(length=state.grid.length / beta, n_points=state.grid.n_points)
    return replace(
        state, grid=grid, t=state.t / rho, gammas=gammas if gammas is not None else state.gammas,
        snapshots=(), diagnostics=dict(state.diagnostics),
    )
