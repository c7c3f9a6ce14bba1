"""
Rectified and scaled phase of the frequency-matched self-interaction.

With the rectifying variables the band of the doublet member s becomes its
Taylor polynomial gamma(eta) = sum_j gamma_j eta**j, and the phase of the
quadruplet (s; s, s, -s) at origin offsets (q', q'', q''') is

    Phi(q', q'') = s * [gamma(s b q) - gamma(s b q') - gamma(s b q'') + gamma(-s b q''')],

with b = beta and q''' = q - q' - q''. The scaled phase is Phi / beta**2; it
vanishes together with its gradient at q' = q'' = q.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import sympy
from numpy.polynomial import Polynomial
from scipy import optimize

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, PreconditionException, ValidationException
from dominio.excitacion.corriente import RADIO_CORTE
from dominio.modelo.dispersion import DispersionModel
from dominio.modelo.jet import TaylorJet
from dominio.rectificacion.rectificador import RectifyMap

logger = get_logger(__name__)

Q1, Q2 = sympy.symbols("q1 q2", real=True)

TOLERANCIA_GRADIENTE = 1e-10
RADIO_SONDEO = 0.05


@dataclass(frozen=True)
class ScaledPhase:
    """
    Scaled phase in the variables (q', q'') for the end offset ``q``.

    Attributes:
        gammas: gamma_0..gamma_nu of the band at the carrier.
        beta: Quasimomentum spread.
        sign: Frequency sign s of the end mode.
        q: End offset (scaled quasimomentum).
    """

    gammas: Tuple[float, ...]
    beta: float
    sign: int = 1
    q: float = 0.0

    def __post_init__(self) -> None:
        if self.beta <= 0.0:
            raise ValidationException(field="beta", value=self.beta, rule="beta > 0")
        if self.sign not in (1, -1):
            raise ValidationException(field="sign", value=self.sign, rule="sign in {+1, -1}")

    @property
    def nu(self) -> int:
        return len(self.gammas) - 1

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.gammas)

    @property
    def flat_point(self) -> Tuple[float, float]:
        return (self.q, self.q)

    def _origins(self, q1: Any, q2: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        q1 = np.asarray(q1, dtype=float)
        q2 = np.asarray(q2, dtype=float)
        return q1, q2, self.q - q1 - q2

    def rectified(self, q1: Any, q2: Any) -> np.ndarray:
        """Unscaled phase Phi at beta * (q', q'', q''')."""
        g, s, b = self.polynomial, self.sign, self.beta
        q1, q2, q3 = self._origins(q1, q2)
        return s * (g(s * b * self.q) - g(s * b * q1) - g(s * b * q2) + g(-s * b * q3))

    def __call__(self, q1: Any, q2: Any) -> np.ndarray:
        return self.rectified(q1, q2) / self.beta**2

    def gradient(self, q1: Any, q2: Any) -> np.ndarray:
        dg, s, b = self.polynomial.deriv(1), self.sign, self.beta
        q1, q2, q3 = self._origins(q1, q2)
        mirror = dg(-s * b * q3)
        return np.stack([(mirror - dg(s * b * q1)) / b, (mirror - dg(s * b * q2)) / b])

    def hessian(self, q1: Any, q2: Any) -> np.ndarray:
        d2, s, b = self.polynomial.deriv(2), self.sign, self.beta
        q1, q2, q3 = self._origins(q1, q2)
        mirror = s * d2(-s * b * q3)
        return np.array(
            [
                [mirror - s * d2(s * b * q1), mirror],
                [mirror, mirror - s * d2(s * b * q2)],
            ],
            dtype=float,
        )

    def symbolic(self) -> sympy.Expr:
        """The scaled phase as a polynomial in the sympy symbols q1, q2."""
        eta = sympy.Symbol("eta")
        gamma = sum((sympy.Float(c) * eta**j for j, c in enumerate(self.gammas)), sympy.Integer(0))
        s, b = self.sign, sympy.Float(self.beta)
        q3 = self.q - Q1 - Q2
        expr = s * (
            gamma.subs(eta, s * b * self.q)
            - gamma.subs(eta, s * b * Q1)
            - gamma.subs(eta, s * b * Q2)
            + gamma.subs(eta, -s * b * q3)
        )
        return sympy.expand(expr / b**2)

    @classmethod
    def from_jet(cls, jet: TaylorJet, nu: int, beta: float, sign: int = 1, q: float = 0.0) -> "ScaledPhase":
        # el jet se toma en +k_star; el miembro espejo usa gamma(s eta)
        return cls(gammas=jet.gammas(nu), beta=beta, sign=sign, q=q)


@dataclass(frozen=True)
class PhaseEvaluation:
    """
    Phase of the self-interaction at one point (q', q'').

    Attributes:
        phi: Exact mismatch of the band at the rectified quasimomenta.
        rectified_phi: Polynomial phase Phi.
        scaled_phi: Phi / beta**2.
        hessian: Hessian of the scaled phase in (q', q'').
    """

    phi: float
    rectified_phi: float
    scaled_phi: float
    hessian: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phi": self.phi,
            "rectified_phi": self.rectified_phi,
            "scaled_phi": self.scaled_phi,
            "hessian": self.hessian.tolist(),
        }


def phase_evaluation(
    model: DispersionModel,
    rect: RectifyMap,
    nu: int,
    beta: float,
    q1: float,
    q2: float,
    sign: int = 1,
    q: float = 0.0,
) -> PhaseEvaluation:
    """
    Exact and polynomial phase at origin offsets (q1, q2, q - q1 - q2).

    Origins sit at s k_star + Y_s(beta q_j) (the mirrored one at -s k_star),
    and the end at their sum, so the gap between ``phi`` and
    ``rectified_phi`` is the phase-replacement error.
    """
    phase = ScaledPhase.from_jet(rect.jet, nu, beta, sign, q)
    n0, k_star = rect.jet.n0, rect.jet.k_star
    q3 = q - q1 - q2
    origins = (
        (sign, sign * k_star + float(rect.signed_forward(sign, beta * q1))),
        (sign, sign * k_star + float(rect.signed_forward(sign, beta * q2))),
        (-sign, -sign * k_star + float(rect.signed_forward(-sign, beta * q3))),
    )
    k_end = sum(k for _, k in origins)
    exact = sign * float(model.omega(n0, np.array([k_end]))[0]) - sum(
        s * float(model.omega(n0, np.array([k]))[0]) for s, k in origins
    )
    rectified = float(phase.rectified(q1, q2))
    return PhaseEvaluation(
        phi=exact,
        rectified_phi=rectified,
        scaled_phi=rectified / beta**2,
        hessian=phase.hessian(q1, q2),
    )


@dataclass(frozen=True)
class CriticalPointReport:
    """
    Critical point q_flat = (q, q, q, -q) of the scaled phase and its Hessian.

    Attributes:
        q_flat: The critical quadruplet of offsets.
        gradient_residual: Norm of the gradient at q_flat.
        hessian: 2x2 Hessian in (q', q'').
        determinant: det of the Hessian.
        off_diagonal: Hessian entry d2/dq'dq''.
        expected_off_diagonal: s * gamma''(s beta q).
        probe_distance: Distance from q_flat of the minimizer of |grad|**2
            started inside the probing ball.
        ring_gradient: Smallest gradient norm on the probing circle.
    """

    q_flat: Tuple[float, float, float, float]
    gradient_residual: float
    hessian: np.ndarray
    determinant: float
    off_diagonal: float
    expected_off_diagonal: float
    probe_distance: float
    ring_gradient: float

    @property
    def unique(self) -> bool:
        return self.probe_distance < 1e-6 and self.ring_gradient > 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q_flat": list(self.q_flat),
            "gradient_residual": self.gradient_residual,
            "hessian": self.hessian.tolist(),
            "determinant": self.determinant,
            "off_diagonal": self.off_diagonal,
            "expected_off_diagonal": self.expected_off_diagonal,
            "probe_distance": self.probe_distance,
            "ring_gradient": self.ring_gradient,
        }


def critical_point(
    jet: TaylorJet,
    nu: int,
    q: float,
    beta: float,
    sign: int = 1,
    pi0: float = RADIO_CORTE,
    tolerance: float = TOLERANCIA_GRADIENTE,
    probe_radius: float = RADIO_SONDEO,
    seed: Optional[int] = 0,
) -> CriticalPointReport:
    """
    Verify the critical point of the scaled phase and its nondegeneracy.

    Args:
        jet: Taylor jet of the band at the carrier.
        nu: Dispersion order.
        q: End offset.
        beta: Quasimomentum spread.
        sign: Frequency sign of the end mode.
        pi0: Admissible radius of beta * q.
        tolerance: Accepted gradient residual.
        probe_radius: Radius of the uniqueness probe.
        seed: Seed of the perturbed start.

    Raises:
        PreconditionException: |beta q| above pi0.
        ConvergenceException: Gradient residual above ``tolerance``.
    """
    if abs(beta * q) > pi0:
        raise PreconditionException(
            operation="critical_point", invariant="|beta q| <= pi0", context={"beta_q": beta * q, "pi0": pi0}
        )
    phase = ScaledPhase.from_jet(jet, nu, beta, sign, q)
    residual = float(np.linalg.norm(phase.gradient(q, q)))
    if residual > tolerance:
        raise ConvergenceException(operation="critical_point", residual=residual, tolerance=tolerance)
    hessian = phase.hessian(q, q)
    expected = sign * float(phase.polynomial.deriv(2)(sign * beta * q))

    def grad_norm2(x: np.ndarray) -> float:
        return float(np.sum(phase.gradient(x[0], x[1]) ** 2))

    rng = np.random.default_rng(seed)
    direction = rng.normal(size=2)
    start = np.array([q, q]) + 0.5 * probe_radius * direction / np.linalg.norm(direction)
    found = optimize.minimize(grad_norm2, start, method="BFGS", options={"gtol": 1e-14})
    distance = float(np.linalg.norm(found.x - np.array([q, q])))

    angles = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    ring = np.array([q, q])[:, None] + probe_radius * np.stack([np.cos(angles), np.sin(angles)])
    ring_gradient = float(np.min(np.linalg.norm(phase.gradient(ring[0], ring[1]), axis=0)))

    report = CriticalPointReport(
        q_flat=(q, q, q, -q),
        gradient_residual=residual,
        hessian=hessian,
        determinant=float(np.linalg.det(hessian)),
        off_diagonal=float(hessian[0, 1]),
        expected_off_diagonal=expected,
        probe_distance=distance,
        ring_gradient=ring_gradient,
    )
    logger.debug("Punto crítico verificado", extra={"q": q, "beta": beta, "det": report.determinant})
    return report
