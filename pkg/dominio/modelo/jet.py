"""
Taylor jets of a band at a carrier quasimomentum and genericity checks.
"""

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, Optional, Tuple

import numpy as np

from config.logging_config import get_logger
from dominio.exceptions import ConvergenceException, DegenerateBandException, PreconditionException

from .diferencias import central_derivative
from .dispersion import PASO_DERIVADA_GRILLA, DispersionModel

logger = get_logger(__name__)

ORDEN_JET = 4
TOLERANCIA_JET = 1e-5
UMBRAL_GENERICIDAD = 1e-6
UMBRAL_DEGENERACION = 1e-6
NIVELES_RICHARDSON = 2


@dataclass(frozen=True)
class TaylorJet:
    """
    Derivatives of omega_{n0} at k_star.

    Attributes:
        k_star: Carrier quasimomentum.
        n0: Band number.
        derivs: omega^(j)(k_star) for j = 0..4.
        errors: Error estimate per derivative (zero for analytic bands).
        analytic: True when the derivatives are exact.
    """

    k_star: float
    n0: int
    derivs: Tuple[float, ...]
    errors: Tuple[float, ...] = (0.0,) * (ORDEN_JET + 1)
    analytic: bool = True

    def gamma(self, j: int) -> float:
        """Taylor coefficient omega^(j)(k_star) / j!."""
        return self.derivs[j] / factorial(j)

    def gammas(self, nu: int) -> Tuple[float, ...]:
        return tuple(self.gamma(j) for j in range(nu + 1))

    @property
    def omega(self) -> float:
        return self.derivs[0]

    @property
    def velocity(self) -> float:
        return self.derivs[1]

    @property
    def curvature(self) -> float:
        return self.derivs[2]

    def mirrored(self) -> "TaylorJet":
        """Jet at -k_star implied by inversion symmetry."""
        return TaylorJet(
            k_star=-self.k_star,
            n0=self.n0,
            derivs=tuple((-1) ** j * d for j, d in enumerate(self.derivs)),
            errors=self.errors,
            analytic=self.analytic,
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "k_star": self.k_star,
            "n0": self.n0,
            "derivs": list(self.derivs),
            "errors": list(self.errors),
            "analytic": self.analytic,
        }


def _check_isolated(model: DispersionModel, n0: int, k: np.ndarray) -> None:
    own = model.omega(n0, k)
    for n in (n0 - 1, n0 + 1):
        if 1 <= n <= model.n_bands:
            gaps = np.abs(model.omega(n, k) - own)
            if float(np.min(gaps)) < UMBRAL_DEGENERACION:
                i = int(np.argmin(gaps))
                raise DegenerateBandException(band=n0, k=float(k[i]), gap=float(gaps[i]))


def jet_at(
    model: DispersionModel,
    n0: int,
    k_star: float,
    order: int = ORDEN_JET,
    tolerance: float = TOLERANCIA_JET,
    step: Optional[float] = None,
) -> TaylorJet:
    """
    Derivatives of omega_{n0} at k_star up to fourth order.

    Synthetic bands are differentiated symbolically. Other bands use 5-point
    central stencils with two Richardson levels; their error estimates are
    reported and must stay below ``tolerance``.

    Raises:
        PreconditionException: k_star not interior, or stencil leaving the zone.
        DegenerateBandException: A neighbouring band is closer than 1e-6.
        ConvergenceException: A derivative error estimate exceeds ``tolerance``.
    """
    if not 1 <= order <= ORDEN_JET:
        raise PreconditionException(operation="jet_at", invariant="1 <= order <= 4")
    if not -np.pi < k_star < np.pi:
        raise PreconditionException(operation="jet_at", invariant="k_star interior to [-pi, pi]")
    band = model.band(n0)

    if band.analytic:
        derivs = tuple(float(band.derivative(k_star, j)) for j in range(ORDEN_JET + 1))
        _check_isolated(model, n0, np.array([k_star]))
        return TaylorJet(k_star=float(k_star), n0=n0, derivs=derivs)

    h = step or PASO_DERIVADA_GRILLA
    radius = 2.0 * h * 2.0**NIVELES_RICHARDSON
    if abs(k_star) + radius >= np.pi:
        raise PreconditionException(
            operation="jet_at", invariant="finite-difference stencil inside the zone",
            context={"k_star": k_star, "radius": radius},
        )
    _check_isolated(model, n0, np.linspace(k_star - radius, k_star + radius, 9))

    derivs = [float(band(np.array([k_star]))[0])]
    errors = [0.0]
    for j in range(1, ORDEN_JET + 1):
        value, error = central_derivative(band, k_star, j, h, NIVELES_RICHARDSON)
        if j <= order and error > tolerance:
            raise ConvergenceException(
                operation=f"jet_at derivative {j}", residual=error, tolerance=tolerance,
                context={"k_star": k_star, "n0": n0},
            )
        derivs.append(float(value.real))
        errors.append(error)
    logger.debug("Jet numérico calculado", extra={"k_star": k_star, "n0": n0, "errors": errors})
    return TaylorJet(
        k_star=float(k_star), n0=n0, derivs=tuple(derivs), errors=tuple(errors), analytic=False
    )


@dataclass(frozen=True)
class GenericityReport:
    """Margins of the genericity conditions at (n0, k_star) and their verdicts."""

    k_star: float
    n0: int
    margins: Dict[str, float] = field(default_factory=dict)
    threshold: float = UMBRAL_GENERICIDAD

    @property
    def verdicts(self) -> Dict[str, bool]:
        return {name: value > self.threshold for name, value in self.margins.items()}

    @property
    def generic(self) -> bool:
        return all(self.verdicts.values())

    def failed(self) -> Tuple[str, ...]:
        return tuple(name for name, ok in self.verdicts.items() if not ok)

    def to_dict(self) -> Dict[str, object]:
        return {
            "k_star": self.k_star,
            "n0": self.n0,
            "margins": dict(self.margins),
            "verdicts": self.verdicts,
            "generic": self.generic,
        }


def check_generic(
    model: DispersionModel,
    n0: int,
    k_star: float,
    jet: Optional[TaylorJet] = None,
    threshold: float = UMBRAL_GENERICIDAD,
) -> GenericityReport:
    """
    Evaluate every genericity condition at (n0, k_star); report only.

    Margins: ``modpi`` distance of 2k_star from 2 pi Z; ``third_harmonic``
    min_n |3 omega_{n0}(k) - omega_n(3k)|; ``third_harmonic_velocity``
    min_n min(|omega'_{n0}(k) -+ omega'_n(3k)|); ``band_gap`` and
    ``velocity_gap`` against the other bands; ``omega``, ``velocity`` and
    ``curvature`` of the jet.
    """
    jet = jet or jet_at(model, n0, k_star)
    k3 = np.array([3.0 * k_star])
    k1 = np.array([k_star])
    two_pi = 2.0 * np.pi
    margins: Dict[str, float] = {
        "modpi": float(abs(2.0 * k_star - two_pi * np.round(2.0 * k_star / two_pi))),
    }
    third, third_velocity = [], []
    band_gap, velocity_gap = [], []
    for n in range(1, model.n_bands + 1):
        third.append(abs(3.0 * jet.omega - float(model.omega(n, k3)[0])))
        v3 = float(model.derivative(n, k3, 1)[0])
        third_velocity.append(min(abs(jet.velocity - v3), abs(jet.velocity + v3)))
        if n != n0:
            band_gap.append(abs(jet.omega - float(model.omega(n, k1)[0])))
            vp = float(model.derivative(n, k1, 1)[0])
            velocity_gap.append(min(abs(jet.velocity - vp), abs(jet.velocity + vp)))
    margins["third_harmonic"] = float(min(third))
    margins["third_harmonic_velocity"] = float(min(third_velocity))
    if band_gap:
        margins["band_gap"] = float(min(band_gap))
        margins["velocity_gap"] = float(min(velocity_gap))
    margins["omega"] = abs(jet.omega)
    margins["velocity"] = abs(jet.velocity)
    margins["curvature"] = abs(jet.curvature)
    report = GenericityReport(k_star=float(k_star), n0=n0, margins=margins, threshold=threshold)
    if not report.generic:
        logger.info("Punto no genérico", extra={"k_star": k_star, "failed": list(report.failed())})
    return report
